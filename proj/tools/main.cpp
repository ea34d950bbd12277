#include <iostream>

#include <CLI11.hpp>

#include "rbal/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Risk-based active learning with multiclass relevance vector machines"};
  app.require_subcommand(1);

  rbal::CommandOptions options;
  std::optional<std::string> config, out;
  int runs = 0, workers = 0;
  std::uint64_t seed = 0;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "Experiment JSON file");
    cmd->add_flag("--renormalize", options.renormalize,
                  "Rescale transition rows that miss unit sum by up to 0.05");
  };

  auto* generate = app.add_subcommand("generate", "Write a synthetic Z24-analog stream");
  add_config(generate);
  generate->add_option("--out", out, "Feature CSV path (labels go to <stem>.labels.csv)");
  auto* generate_seed = generate->add_option("--seed", seed, "Generator seed");

  auto* run = app.add_subcommand("run", "Run seeded campaigns for each classifier");
  add_config(run);
  run->add_option("--out", out, "Output directory");
  auto* run_runs = run->add_option("--runs", runs, "Runs per classifier")->check(CLI::PositiveNumber);
  auto* run_seed = run->add_option("--seed", seed, "Base seed; run i uses seed + i");
  run->add_option("--classifier", options.classifiers, "gmm, mrvm1 or mrvm2 (repeatable)")
      ->check(CLI::IsMember({"gmm", "mrvm1", "mrvm2"}));
  auto* run_workers = run->add_option("--workers", workers, "Parallel campaigns (0: all cores)")
                          ->check(CLI::NonNegativeNumber);

  auto* aggregate = app.add_subcommand("aggregate", "Median/IQR curves, histograms and frequencies");
  add_config(aggregate);
  aggregate->add_option("--out", out, "Directory holding manifest.json");

  auto* plot = app.add_subcommand("plot", "SVG figures from a finished run");
  add_config(plot);
  plot->add_option("--out", out, "Directory holding manifest.json");

  std::vector<double> belief;
  auto* demo = app.add_subcommand("demo-evpi", "EVPI report for one belief");
  add_config(demo);
  demo->add_option("belief", belief, "Belief weights, one per health state")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rbal::kExitOk : rbal::kExitConfigError;
  }

  options.config = config;
  options.out = out;
  if (*run_runs) options.runs = runs;
  if (*run_workers) options.workers = workers;
  if (*generate_seed || *run_seed) options.seed = seed;

  if (*generate) return rbal::cmd_generate(options, std::cout, std::cerr);
  if (*run) return rbal::cmd_run(options, std::cout, std::cerr);
  if (*aggregate) return rbal::cmd_aggregate(options, std::cout, std::cerr);
  if (*plot) return rbal::cmd_plot(options, std::cout, std::cerr);
  return rbal::cmd_demo_evpi(belief, options, std::cout, std::cerr);
}
