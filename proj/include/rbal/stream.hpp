#pragma once

// Monitoring streams: ordered natural-frequency feature vectors with hidden
// health-state labels.  Labels follow the temporal layout of a monitoring
// campaign: normal condition, contiguous cold-temperature blocks, and a
// damaged tail split into an incipient half followed by an advanced half.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbal/kernel.hpp"

namespace rbal {

inline constexpr int kNormal = 1;
inline constexpr int kCold = 2;
inline constexpr int kIncipientDamage = 3;
inline constexpr int kAdvancedDamage = 4;
inline constexpr int kHealthStateCount = 4;

struct MonitoringStream {
  FeatureMatrix features;   // one observation per row, Hz
  std::vector<int> labels;  // 1..4, revealed only on query

  Eigen::Index size() const { return features.rows(); }
  std::vector<int> class_counts(int class_count = kHealthStateCount) const;
};

// Half-open row range [begin, end), 0-based.
struct IndexRange {
  int begin = 0;
  int end = 0;
};

struct ClassDistribution {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct GeneratorConfig {
  int total_count = 1000;
  double damage_start_fraction = 0.884;
  double cold_start_fraction = 0.30;
  double cold_end_fraction = 0.38;
  std::vector<ClassDistribution> classes;  // normal, cold, incipient, advanced
  std::uint64_t seed = 0;

  // Four-mode defaults echoing the Z24 structure: cold stiffening raises
  // frequencies, damage lowers them.
  static GeneratorConfig z24_analog();

  // Throws ConfigError, including when any class would receive no rows.
  void validate() const;

  nlohmann::json to_json() const;
  // Fields absent from doc keep the z24_analog defaults.
  static GeneratorConfig from_json(const nlohmann::json& doc);
};

// Row boundaries implied by a generator config: every fraction f maps to row
// floor(f * total_count + 1e-9).  The damaged tail gives its extra row (odd
// length) to the incipient class.
struct StreamLayout {
  IndexRange cold;
  int damage_start = 0;
  int total = 0;
  std::vector<int> class_counts;
};

StreamLayout layout_of(const GeneratorConfig& config);

MonitoringStream generate_z24_analog(const GeneratorConfig& config);

// Labels as a pure function of row indices.
std::vector<int> assign_labels(int row_count, int damage_start_index,
                               const std::vector<IndexRange>& cold_ranges);

// Headerless comma-separated file, one observation per row.
FeatureMatrix read_feature_csv(const std::string& path);
MonitoringStream load_feature_csv(const std::string& path, int damage_start_index,
                                  const std::vector<IndexRange>& cold_ranges);

void write_feature_csv(const std::string& path, const FeatureMatrix& features);
void write_label_file(const std::string& path, const std::vector<int>& labels);

}  // namespace rbal
