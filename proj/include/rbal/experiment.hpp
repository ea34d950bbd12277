#pragma once

// Batch driver: many seeded campaigns per classifier, written to per-run CSV
// files plus a manifest, then aggregated and plotted.
//
// Experiment JSON (every key optional):
//   {
//     "data": {"generator": {...GeneratorConfig...}}
//          |  {"csv": "features.csv", "damage_start_index": 3476,
//              "cold_ranges": [[1200, 1500]]},
//     "decision_process": "z24_default" | "path/to/dp.json" | {...inline...},
//     "renormalize": false,
//     "classifiers": ["gmm", "mrvm1", "mrvm2"],
//     "runs": 50, "seed": 0, "workers": 0, "out": "results",
//     "campaign": {"initial_labelled_count": 10, "single_class_training": true,
//                  "record_curves": true,
//                  "kernel": {"kind": "rbf", "width": "median"},
//                  "train": {...TrainConfig...}}
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbal/campaign.hpp"
#include "rbal/metrics.hpp"
#include "rbal/stream.hpp"

namespace rbal {

struct CsvSource {
  std::string path;
  int damage_start_index = 0;
  std::vector<IndexRange> cold_ranges;
};

struct ExperimentConfig {
  GeneratorConfig generator = GeneratorConfig::z24_analog();
  std::optional<CsvSource> csv;  // replaces the generator when set
  DecisionProcess decision_process = DecisionProcess::z24_default();
  std::vector<ClassifierKind> classifiers{ClassifierKind::kGmm, ClassifierKind::kMrvm1,
                                          ClassifierKind::kMrvm2};
  int runs = 50;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: hardware concurrency
  std::string out = "results";
  CampaignConfig campaign;  // classifier, seed and decision process set per run

  // Throws ConfigError.
  void validate() const;
  nlohmann::json to_json() const;

  // Relative paths in doc (csv, decision process) resolve against base_dir.
  static ExperimentConfig from_json(const nlohmann::json& doc, bool renormalize = false,
                                    const std::string& base_dir = ".");
  static ExperimentConfig load(const std::string& path, bool renormalize = false);
};

// Stream for run index i: the generator reseeded with seed + i, or the CSV
// stream unchanged.
MonitoringStream experiment_stream(const ExperimentConfig& config, int run_index);

struct RunEntry {
  ClassifierKind classifier = ClassifierKind::kGmm;
  int run = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string record_file;  // relative to the output directory
  std::string curve_file;
  std::string record_checksum;
  std::string curve_checksum;
  int total_queries = 0;
  int initial_labelled_count = 0;
  int stream_length = 0;
  int class_count = 0;
  double decision_accuracy = 0.0;
};

struct Manifest {
  nlohmann::json config;
  std::vector<RunEntry> entries;

  bool all_ok() const;
  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& doc);
};

inline constexpr const char* kManifestName = "manifest.json";

// 64-bit FNV-1a of a file's bytes, 16 hex digits.
std::string file_checksum(const std::string& path);

// Runs every (classifier, run) campaign, writes CSVs and the manifest into
// config.out.  Failed campaigns are recorded, not thrown.
Manifest run_experiment(const ExperimentConfig& config);

Manifest load_manifest(const std::string& out_dir);

// Summaries of the successful runs of one classifier.
std::vector<RunSummary> load_summaries(const std::string& out_dir, const Manifest& manifest,
                                       ClassifierKind classifier);

std::vector<ClassifierKind> manifest_classifiers(const Manifest& manifest);

// Writes <classifier>_{accuracy,f1}.csv (query_count,median,q25,q75),
// <classifier>_histogram.csv (bin,count), <classifier>_query_frequency.csv
// (t,count) and aggregate.json into out_dir.
nlohmann::json write_aggregates(const std::string& out_dir, int histogram_bin_width = 10);

}  // namespace rbal
