#include "rbal/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "rbal/decision.hpp"
#include "rbal/errors.hpp"
#include "rbal/experiment.hpp"
#include "rbal/format.hpp"
#include "rbal/plot.hpp"

namespace rbal {

namespace {

ExperimentConfig experiment_from(const CommandOptions& options) {
  ExperimentConfig config = options.config
                                ? ExperimentConfig::load(*options.config, options.renormalize)
                                : ExperimentConfig{};
  if (options.runs) config.runs = *options.runs;
  if (options.seed) config.seed = *options.seed;
  if (options.workers) config.workers = *options.workers;
  if (options.out) config.out = *options.out;
  if (!options.classifiers.empty()) {
    config.classifiers.clear();
    for (const auto& name : options.classifiers) config.classifiers.push_back(classifier_from_string(name));
  }
  config.validate();
  return config;
}

// Maps library exceptions onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitConfigError;
}

std::string action_name(int d) {
  if (d == kDoNothing.index) return "do-nothing";
  if (d == kRepair.index) return "repair";
  return "action " + std::to_string(d);
}

// Six decimals, trailing zeros dropped.
std::string report_number(double v) {
  if (std::abs(v) < 5e-7) return "0";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", v);
  std::string text(buffer);
  text.erase(text.find_last_not_of('0') + 1);
  if (text.back() == '.') text.pop_back();
  return text;
}

std::string out_dir(const CommandOptions& options) {
  if (options.out) return *options.out;
  if (options.config) return ExperimentConfig::load(*options.config, options.renormalize).out;
  return ExperimentConfig{}.out;
}

}  // namespace

int cmd_generate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CommandOptions generator_options = options;
    generator_options.out.reset();  // a file here, not a results directory
    const ExperimentConfig config = experiment_from(generator_options);
    if (config.csv) throw ConfigError("generate needs a generator data source, not a CSV");
    GeneratorConfig generator = config.generator;
    generator.seed = config.seed;
    generator.validate();
    const MonitoringStream stream = generate_z24_analog(generator);

    const std::filesystem::path path(options.out.value_or("stream.csv"));
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto labels_path = path.parent_path() / (path.stem().string() + ".labels.csv");
    write_feature_csv(path.string(), stream.features);
    write_label_file(labels_path.string(), stream.labels);

    const StreamLayout layout = layout_of(generator);
    out << "wrote " << stream.size() << " rows to " << path.string() << " (labels: "
        << labels_path.string() << ")\n";
    out << "class counts:";
    for (int c : stream.class_counts()) out << ' ' << c;
    out << "\ncold block rows [" << layout.cold.begin << ", " << layout.cold.end
        << "), damage from row " << layout.damage_start << '\n';
    return kExitOk;
  });
}

int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig config = experiment_from(options);
    const Manifest manifest = run_experiment(config);
    int failed = 0;
    for (const auto& e : manifest.entries) {
      if (!e.ok) {
        ++failed;
        err << to_string(e.classifier) << " run " << e.run << " failed: " << e.error << '\n';
      }
    }
    out << "completed " << manifest.entries.size() - static_cast<std::size_t>(failed) << " of "
        << manifest.entries.size() << " campaigns; manifest at "
        << (std::filesystem::path(config.out) / kManifestName).string() << '\n';
    return failed == 0 ? kExitOk : kExitPartialFailure;
  });
}

int cmd_aggregate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto dir = out_dir(options);
    const auto report = write_aggregates(dir);
    for (const auto& [name, stats] : report.items()) {
      out << name << ": runs " << stats.at("runs").get<int>() << ", median queries "
          << format_double(stats.at("median_total_queries").get<double>()) << " (IQR "
          << format_double(stats.at("q25_total_queries").get<double>()) << " to "
          << format_double(stats.at("q75_total_queries").get<double>()) << "), median final accuracy "
          << format_double(stats.at("median_final_accuracy").get<double>()) << ", median final f1 "
          << format_double(stats.at("median_final_f1").get<double>()) << '\n';
    }
    return kExitOk;
  });
}

int cmd_plot(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    for (const auto& path : write_plots(out_dir(options))) out << "wrote " << path << '\n';
    return kExitOk;
  });
}

int cmd_demo_evpi(const std::vector<double>& weights, const CommandOptions& options,
                  std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DecisionProcess dp = options.config
                                   ? ExperimentConfig::load(*options.config, options.renormalize).decision_process
                                   : DecisionProcess::z24_default();
    if (static_cast<int>(weights.size()) != dp.state_count())
      throw ContractError("belief needs " + std::to_string(dp.state_count()) + " entries");
    const Belief belief = Belief::normalized(
        Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size())));
    out << "belief:";
    for (int k = 0; k < belief.size(); ++k) out << ' ' << report_number(belief[k]);
    out << '\n';
    for (int d = 0; d < dp.action_count(); ++d)
      out << "EU(" << action_name(d) << ") = " << report_number(expected_utility(belief, Action{d}, dp)) << '\n';
    const Decision best = meu(belief, dp);
    const double value = evpi(belief, dp);
    out << "MEU = " << report_number(best.expected_utility) << " (" << action_name(best.action.index) << ")\n";
    out << "perfect-information value = " << report_number(meu_perfect_info(belief, dp)) << '\n';
    out << "EVPI = " << report_number(value) << '\n';
    out << "inspection cost = " << report_number(dp.inspection_cost()) << '\n';
    out << "verdict: " << (should_query(value, dp) ? "query" : "no-query") << '\n';
    return kExitOk;
  });
}

}  // namespace rbal
