#include "rbal/stream.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rbal/errors.hpp"
#include "rbal/format.hpp"

namespace rbal {

namespace {

int boundary(double fraction, int total) {
  return static_cast<int>(std::floor(fraction * total + 1e-9));
}

ClassDistribution diagonal(std::initializer_list<double> mean, double sigma, double variance_factor) {
  ClassDistribution c;
  c.mean = Eigen::Map<const Eigen::VectorXd>(mean.begin(), static_cast<Eigen::Index>(mean.size()));
  c.covariance = Eigen::MatrixXd::Identity(c.mean.size(), c.mean.size()) * sigma * sigma * variance_factor;
  return c;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<int> MonitoringStream::class_counts(int class_count) const {
  std::vector<int> counts(static_cast<std::size_t>(class_count), 0);
  for (int label : labels) {
    if (label >= 1 && label <= class_count) ++counts[static_cast<std::size_t>(label - 1)];
  }
  return counts;
}

GeneratorConfig GeneratorConfig::z24_analog() {
  constexpr double sigma = 0.06;
  GeneratorConfig config;
  config.classes = {diagonal({3.9, 5.0, 9.8, 10.3}, sigma, 1.0),
                    diagonal({4.2, 5.3, 10.1, 10.6}, sigma, 2.0),
                    diagonal({3.8, 4.9, 9.7, 10.2}, sigma, 1.0),
                    diagonal({3.7, 4.8, 9.6, 10.1}, sigma, 1.0)};
  return config;
}

StreamLayout layout_of(const GeneratorConfig& config) {
  StreamLayout layout;
  layout.total = config.total_count;
  layout.cold = {boundary(config.cold_start_fraction, config.total_count),
                 boundary(config.cold_end_fraction, config.total_count)};
  layout.damage_start = boundary(config.damage_start_fraction, config.total_count);
  const int tail = config.total_count - layout.damage_start;
  const int cold = layout.cold.end - layout.cold.begin;
  layout.class_counts = {layout.damage_start - cold, cold, tail - tail / 2, tail / 2};
  return layout;
}

void GeneratorConfig::validate() const {
  if (total_count < 1) throw ConfigError("generator: total_count must be >= 1");
  if (!(damage_start_fraction > 0.0 && damage_start_fraction < 1.0))
    throw ConfigError("generator: damage_start_fraction must lie in (0, 1)");
  if (!(cold_start_fraction >= 0.0 && cold_start_fraction <= cold_end_fraction &&
        cold_end_fraction <= damage_start_fraction))
    throw ConfigError("generator: cold block must lie inside the undamaged span");
  if (classes.size() != static_cast<std::size_t>(kHealthStateCount))
    throw ConfigError("generator: exactly four class distributions are required");
  const auto dim = classes.front().mean.size();
  for (const auto& c : classes) {
    if (c.mean.size() != dim || c.covariance.rows() != dim || c.covariance.cols() != dim)
      throw ConfigError("generator: class distributions must share one dimension");
    if (Eigen::LLT<Eigen::MatrixXd>(c.covariance).info() != Eigen::Success)
      throw ConfigError("generator: covariances must be positive definite");
  }
  const auto layout = layout_of(*this);
  for (std::size_t k = 0; k < layout.class_counts.size(); ++k) {
    if (layout.class_counts[k] <= 0)
      throw ConfigError("generator: class " + std::to_string(k + 1) + " receives no rows");
  }
}

nlohmann::json GeneratorConfig::to_json() const {
  nlohmann::json classes_doc = nlohmann::json::array();
  for (const auto& c : classes) {
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index i = 0; i < c.covariance.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < c.covariance.cols(); ++j) row.push_back(c.covariance(i, j));
      cov.push_back(std::move(row));
    }
    classes_doc.push_back({{"mean", std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size())},
                           {"covariance", cov}});
  }
  return {{"total_count", total_count},
          {"damage_start_fraction", damage_start_fraction},
          {"cold_block", {cold_start_fraction, cold_end_fraction}},
          {"classes", classes_doc},
          {"seed", seed}};
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& doc) {
  GeneratorConfig config = z24_analog();
  try {
    config.total_count = doc.value("total_count", config.total_count);
    config.damage_start_fraction = doc.value("damage_start_fraction", config.damage_start_fraction);
    if (doc.contains("cold_block")) {
      const auto block = doc.at("cold_block").get<std::vector<double>>();
      if (block.size() != 2) throw ConfigError("generator: cold_block needs two fractions");
      config.cold_start_fraction = block[0];
      config.cold_end_fraction = block[1];
    }
    config.seed = doc.value("seed", config.seed);
    if (doc.contains("classes")) {
      config.classes.clear();
      for (const auto& c : doc.at("classes")) {
        ClassDistribution dist;
        const auto mean = c.at("mean").get<std::vector<double>>();
        const auto dim = static_cast<Eigen::Index>(mean.size());
        dist.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), dim);
        if (c.contains("covariance")) {
          const auto rows = c.at("covariance").get<std::vector<std::vector<double>>>();
          dist.covariance.resize(dim, dim);
          if (static_cast<Eigen::Index>(rows.size()) != dim)
            throw ConfigError("generator: covariance must be D x D");
          for (Eigen::Index i = 0; i < dim; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != dim)
              throw ConfigError("generator: covariance must be D x D");
            for (Eigen::Index j = 0; j < dim; ++j)
              dist.covariance(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          }
        } else {
          const auto sd = c.at("std").get<std::vector<double>>();
          if (static_cast<Eigen::Index>(sd.size()) != dim)
            throw ConfigError("generator: std must have D entries");
          const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(sd.data(), dim);
          dist.covariance = s.array().square().matrix().asDiagonal();
        }
        config.classes.push_back(std::move(dist));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  config.validate();
  return config;
}

MonitoringStream generate_z24_analog(const GeneratorConfig& config) {
  config.validate();
  const auto layout = layout_of(config);
  MonitoringStream stream;
  stream.labels = assign_labels(config.total_count, layout.damage_start, {layout.cold});
  const auto dim = config.classes.front().mean.size();
  stream.features.resize(config.total_count, dim);

  std::vector<Eigen::MatrixXd> factors;
  for (const auto& c : config.classes) factors.push_back(Eigen::LLT<Eigen::MatrixXd>(c.covariance).matrixL());
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(dim);
  for (int t = 0; t < config.total_count; ++t) {
    const auto k = static_cast<std::size_t>(stream.labels[static_cast<std::size_t>(t)] - 1);
    for (Eigen::Index j = 0; j < dim; ++j) z[j] = normal(rng);
    stream.features.row(t) = (config.classes[k].mean + factors[k] * z).transpose();
  }
  return stream;
}

std::vector<int> assign_labels(int row_count, int damage_start_index,
                               const std::vector<IndexRange>& cold_ranges) {
  if (row_count < 0) throw ContractError("assign_labels: negative row count");
  if (damage_start_index < 0 || damage_start_index > row_count)
    throw ContractError("assign_labels: damage start outside the stream");
  std::vector<int> labels(static_cast<std::size_t>(row_count), kNormal);
  for (const auto& range : cold_ranges) {
    if (range.begin < 0 || range.end < range.begin || range.end > row_count)
      throw ContractError("assign_labels: cold range outside the stream");
    for (int t = range.begin; t < range.end; ++t) labels[static_cast<std::size_t>(t)] = kCold;
  }
  const int tail = row_count - damage_start_index;
  const int incipient_end = damage_start_index + (tail - tail / 2);
  for (int t = damage_start_index; t < row_count; ++t)
    labels[static_cast<std::size_t>(t)] = t < incipient_end ? kIncipientDamage : kAdvancedDamage;
  return labels;
}

FeatureMatrix read_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open feature CSV: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int row_number = 0;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    std::vector<double> values;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const std::string text = trim(cell);
      double value = 0.0;
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (text.empty() || ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value))
        throw ParseError(path + ": row " + std::to_string(row_number) + ": non-numeric cell '" + text + "'");
      values.push_back(value);
    }
    if (!rows.empty() && values.size() != rows.front().size())
      throw ParseError(path + ": row " + std::to_string(row_number) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, found " +
                       std::to_string(values.size()));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError(path + ": no rows");
  FeatureMatrix features(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return features;
}

MonitoringStream load_feature_csv(const std::string& path, int damage_start_index,
                                  const std::vector<IndexRange>& cold_ranges) {
  MonitoringStream stream;
  stream.features = read_feature_csv(path);
  stream.labels = assign_labels(static_cast<int>(stream.features.rows()), damage_start_index, cold_ranges);
  return stream;
}

void write_feature_csv(const std::string& path, const FeatureMatrix& features) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(features(i, j));
    }
    out << '\n';
  }
  if (!out) throw ConfigError("failed writing " + path);
}

void write_label_file(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  for (int label : labels) out << label << '\n';
  if (!out) throw ConfigError("failed writing " + path);
}

}  // namespace rbal
