#pragma once

// Subcommand bodies behind the rbal executable.  Each returns a process exit
// code and reports on the given streams.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rbal {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartialFailure = 2;

struct CommandOptions {
  std::optional<std::string> config;  // experiment JSON
  std::optional<std::string> out;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> classifiers;  // empty: keep config
  std::optional<int> workers;
  bool renormalize = false;
};

// Writes the generator stream as a headerless feature CSV at --out (default
// stream.csv) plus <stem>.labels.csv, and prints the class counts.
int cmd_generate(const CommandOptions& options, std::ostream& out, std::ostream& err);

// Runs the experiment into --out (default from config) and writes the
// manifest; exit 2 when any campaign failed.
int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err);

// Aggregate CSVs and aggregate.json from the manifest in --out.
int cmd_aggregate(const CommandOptions& options, std::ostream& out, std::ostream& err);

// Three SVG figures from the manifest in --out.
int cmd_plot(const CommandOptions& options, std::ostream& out, std::ostream& err);

// EVPI report for a belief (normalized) under the decision process of
// --config, or the Z24 default.
int cmd_demo_evpi(const std::vector<double>& belief, const CommandOptions& options,
                  std::ostream& out, std::ostream& err);

}  // namespace rbal
