#include "rbal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <thread>

#include "rbal/errors.hpp"
#include "rbal/format.hpp"

namespace rbal {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).string();
}

std::vector<IndexRange> ranges_from_json(const nlohmann::json& doc) {
  std::vector<IndexRange> out;
  for (const auto& r : doc) {
    if (!r.is_array() || r.size() != 2) throw ConfigError("cold_ranges entries must be [begin, end]");
    out.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
  }
  return out;
}

nlohmann::json kernel_settings_json(const CampaignConfig& c) {
  nlohmann::json k{{"kind", to_string(c.kernel_kind)},
                   {"degree", c.polynomial_degree},
                   {"offset", c.polynomial_offset}};
  k["width"] = c.kernel_width ? nlohmann::json(*c.kernel_width) : nlohmann::json("median");
  return k;
}

std::string run_stem(ClassifierKind kind, int run) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%s_run_%03d", to_string(kind), run);
  return buffer;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (classifiers.empty()) throw ConfigError("classifier list must not be empty");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (out.empty()) throw ConfigError("output directory must not be empty");
  if (campaign.initial_labelled_count < 1) throw ConfigError("initial_labelled_count must be >= 1");
  campaign.train.validate();
  if (csv) {
    if (csv->path.empty()) throw ConfigError("data.csv path is empty");
  } else {
    generator.validate();
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json doc;
  if (csv) {
    nlohmann::json ranges = nlohmann::json::array();
    for (const auto& r : csv->cold_ranges) ranges.push_back({r.begin, r.end});
    doc["data"] = {{"csv", csv->path},
                   {"damage_start_index", csv->damage_start_index},
                   {"cold_ranges", ranges}};
  } else {
    doc["data"] = {{"generator", generator.to_json()}};
  }
  doc["decision_process"] = decision_process.to_json();
  nlohmann::json names = nlohmann::json::array();
  for (auto k : classifiers) names.push_back(to_string(k));
  doc["classifiers"] = names;
  doc["runs"] = runs;
  doc["seed"] = seed;
  doc["workers"] = workers;
  doc["out"] = out;
  doc["campaign"] = {{"initial_labelled_count", campaign.initial_labelled_count},
                     {"single_class_training", campaign.single_class_training},
                     {"record_curves", campaign.record_curves},
                     {"kernel", kernel_settings_json(campaign)},
                     {"train", rbal::to_json(campaign.train)}};
  return doc;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc, bool renormalize,
                                             const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  static const std::vector<std::string> known{"data",    "decision_process", "renormalize",
                                              "classifiers", "runs",         "seed",
                                              "workers", "out",              "campaign"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown experiment key: " + key);
  }
  ExperimentConfig config;
  try {
    renormalize = renormalize || doc.value("renormalize", false);
    if (doc.contains("data")) {
      const auto& data = doc.at("data");
      if (data.contains("csv")) {
        CsvSource source;
        source.path = resolve(data.at("csv").get<std::string>(), base_dir);
        source.damage_start_index = data.at("damage_start_index").get<int>();
        if (data.contains("cold_ranges")) source.cold_ranges = ranges_from_json(data.at("cold_ranges"));
        config.csv = source;
      } else if (data.contains("generator")) {
        config.generator = GeneratorConfig::from_json(data.at("generator"));
      } else {
        throw ConfigError("data needs either \"generator\" or \"csv\"");
      }
    }
    if (doc.contains("decision_process")) {
      const auto& dp = doc.at("decision_process");
      if (dp.is_string()) {
        const auto name = dp.get<std::string>();
        config.decision_process = name == "z24_default"
                                      ? DecisionProcess::z24_default()
                                      : DecisionProcess::load(resolve(name, base_dir), renormalize);
      } else {
        config.decision_process = DecisionProcess::from_json(dp, renormalize);
      }
    }
    if (doc.contains("classifiers")) {
      config.classifiers.clear();
      for (const auto& name : doc.at("classifiers"))
        config.classifiers.push_back(classifier_from_string(name.get<std::string>()));
    }
    config.runs = doc.value("runs", config.runs);
    config.seed = doc.value("seed", config.seed);
    config.workers = doc.value("workers", config.workers);
    config.out = doc.value("out", config.out);
    if (doc.contains("campaign")) {
      const auto& c = doc.at("campaign");
      auto& campaign = config.campaign;
      campaign.initial_labelled_count = c.value("initial_labelled_count", campaign.initial_labelled_count);
      campaign.single_class_training = c.value("single_class_training", campaign.single_class_training);
      campaign.record_curves = c.value("record_curves", campaign.record_curves);
      if (c.contains("kernel")) {
        const auto& k = c.at("kernel");
        campaign.kernel_kind = kernel_kind_from_string(k.value("kind", std::string("rbf")));
        if (k.contains("width")) {
          const auto& w = k.at("width");
          if (w.is_number()) {
            campaign.kernel_width = w.get<double>();
          } else if (!w.is_null() && !(w.is_string() && w.get<std::string>() == "median")) {
            throw ConfigError("kernel width must be a number or \"median\"");
          }
        }
        campaign.polynomial_degree = k.value("degree", campaign.polynomial_degree);
        campaign.polynomial_offset = k.value("offset", campaign.polynomial_offset);
      }
      if (c.contains("train")) campaign.train = train_config_from_json(c.at("train"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::string& path, bool renormalize) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const auto parent = fs::path(path).parent_path();
  return from_json(doc, renormalize, parent.empty() ? "." : parent.string());
}

MonitoringStream experiment_stream(const ExperimentConfig& config, int run_index) {
  if (config.csv) {
    return load_feature_csv(config.csv->path, config.csv->damage_start_index, config.csv->cold_ranges);
  }
  GeneratorConfig g = config.generator;
  g.seed = config.seed + static_cast<std::uint64_t>(run_index);
  return generate_z24_analog(g);
}

bool Manifest::all_ok() const {
  for (const auto& e : entries)
    if (!e.ok) return false;
  return true;
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json r{{"classifier", to_string(e.classifier)},
                     {"run", e.run},
                     {"seed", e.seed},
                     {"status", e.ok ? "ok" : "failed"}};
    if (e.ok) {
      r["record"] = e.record_file;
      r["curve"] = e.curve_file;
      r["record_checksum"] = e.record_checksum;
      r["curve_checksum"] = e.curve_checksum;
      r["total_queries"] = e.total_queries;
      r["initial_labelled_count"] = e.initial_labelled_count;
      r["stream_length"] = e.stream_length;
      r["class_count"] = e.class_count;
      r["decision_accuracy"] = e.decision_accuracy;
    } else {
      r["error"] = e.error;
    }
    runs.push_back(std::move(r));
  }
  return {{"config", config}, {"runs", runs}};
}

Manifest Manifest::from_json(const nlohmann::json& doc) {
  Manifest m;
  try {
    m.config = doc.value("config", nlohmann::json::object());
    for (const auto& r : doc.at("runs")) {
      RunEntry e;
      e.classifier = classifier_from_string(r.at("classifier").get<std::string>());
      e.run = r.at("run").get<int>();
      e.seed = r.at("seed").get<std::uint64_t>();
      e.ok = r.at("status").get<std::string>() == "ok";
      if (e.ok) {
        e.record_file = r.at("record").get<std::string>();
        e.curve_file = r.at("curve").get<std::string>();
        e.record_checksum = r.value("record_checksum", "");
        e.curve_checksum = r.value("curve_checksum", "");
        e.total_queries = r.at("total_queries").get<int>();
        e.initial_labelled_count = r.at("initial_labelled_count").get<int>();
        e.stream_length = r.at("stream_length").get<int>();
        e.class_count = r.at("class_count").get<int>();
        e.decision_accuracy = r.value("decision_accuracy", 0.0);
      } else {
        e.error = r.value("error", "");
      }
      m.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("manifest: ") + ex.what());
  }
  return m;
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    hash ^= static_cast<unsigned char>(*it);
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

Manifest run_experiment(const ExperimentConfig& config) {
  config.validate();
  fs::create_directories(config.out);
  const fs::path out(config.out);

  Manifest manifest;
  manifest.config = config.to_json();
  for (auto kind : config.classifiers) {
    for (int run = 0; run < config.runs; ++run) {
      RunEntry e;
      e.classifier = kind;
      e.run = run;
      e.seed = config.seed + static_cast<std::uint64_t>(run);
      manifest.entries.push_back(e);
    }
  }

  auto execute = [&](RunEntry& e) {
    try {
      const MonitoringStream stream = experiment_stream(config, e.run);
      CampaignConfig campaign = config.campaign;
      campaign.classifier = e.classifier;
      campaign.seed = e.seed;
      campaign.decision_process = config.decision_process;
      const RunRecord record = run_campaign(stream, campaign);
      const std::string stem = run_stem(e.classifier, e.run);
      e.record_file = stem + ".csv";
      e.curve_file = stem + "_curve.csv";
      write_record_csv((out / e.record_file).string(), record);
      write_curve_csv((out / e.curve_file).string(), record);
      e.record_checksum = file_checksum((out / e.record_file).string());
      e.curve_checksum = file_checksum((out / e.curve_file).string());
      e.total_queries = record.total_queries();
      e.initial_labelled_count = record.initial_labelled_count;
      e.stream_length = record.stream_length;
      e.class_count = record.class_count;
      e.decision_accuracy = decision_accuracy(record);
      e.ok = true;
    } catch (const std::exception& ex) {
      e.ok = false;
      e.error = ex.what();
    }
  };

  int workers = config.workers > 0 ? config.workers
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(manifest.entries.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < manifest.entries.size(); i = next++) execute(manifest.entries[i]);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::ofstream file(out / kManifestName);
  if (!file) throw ConfigError("cannot write manifest in " + config.out);
  file << manifest.to_json().dump(2) << '\n';
  return manifest;
}

Manifest load_manifest(const std::string& out_dir) {
  const auto path = (fs::path(out_dir) / kManifestName).string();
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return Manifest::from_json(doc);
}

std::vector<RunSummary> load_summaries(const std::string& out_dir, const Manifest& manifest,
                                       ClassifierKind classifier) {
  std::vector<RunSummary> out;
  for (const auto& e : manifest.entries) {
    if (!e.ok || e.classifier != classifier) continue;
    RunRecord record = read_record_csv((fs::path(out_dir) / e.record_file).string(), e.class_count);
    record.initial_labelled_count = e.initial_labelled_count;
    record.stream_length = e.stream_length;
    auto [accuracy, f1] = read_curve_csv((fs::path(out_dir) / e.curve_file).string());
    record.accuracy_curve = std::move(accuracy);
    record.f1_curve = std::move(f1);
    out.push_back(summarize(record));
  }
  return out;
}

std::vector<ClassifierKind> manifest_classifiers(const Manifest& manifest) {
  std::vector<ClassifierKind> kinds;
  for (const auto& e : manifest.entries)
    if (std::find(kinds.begin(), kinds.end(), e.classifier) == kinds.end()) kinds.push_back(e.classifier);
  return kinds;
}

namespace {

void write_band_csv(const fs::path& path, const std::vector<BandPoint>& band) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "query_count,median,q25,q75\n";
  for (const auto& p : band)
    out << p.query_count << ',' << format_double(p.median) << ',' << format_double(p.q25) << ','
        << format_double(p.q75) << '\n';
}

}  // namespace

nlohmann::json write_aggregates(const std::string& out_dir, int histogram_bin_width) {
  const Manifest manifest = load_manifest(out_dir);
  const fs::path out(out_dir);
  nlohmann::json report = nlohmann::json::object();
  for (auto kind : manifest_classifiers(manifest)) {
    const auto summaries = load_summaries(out_dir, manifest, kind);
    if (summaries.empty()) continue;
    const Aggregate agg = aggregate_runs(summaries, histogram_bin_width);
    const std::string name = to_string(kind);
    write_band_csv(out / (name + "_accuracy.csv"), agg.accuracy);
    write_band_csv(out / (name + "_f1.csv"), agg.f1);
    {
      std::ofstream h(out / (name + "_histogram.csv"));
      h << "bin,count\n";
      for (const auto& b : agg.query_histogram) h << b.lower << ',' << b.count << '\n';
    }
    {
      std::ofstream f(out / (name + "_query_frequency.csv"));
      f << "t,count\n";
      for (std::size_t t = 0; t < agg.query_frequency.size(); ++t) f << t << ',' << agg.query_frequency[t] << '\n';
    }
    report[name] = {{"runs", agg.runs},
                    {"median_total_queries", agg.median_total_queries},
                    {"q25_total_queries", agg.q25_total_queries},
                    {"q75_total_queries", agg.q75_total_queries},
                    {"median_final_accuracy", agg.median_final_accuracy},
                    {"median_final_f1", agg.median_final_f1}};
  }
  if (report.empty()) throw ContractError("aggregate: manifest has no successful runs");
  std::ofstream file(out / "aggregate.json");
  file << report.dump(2) << '\n';
  return report;
}

}  // namespace rbal
