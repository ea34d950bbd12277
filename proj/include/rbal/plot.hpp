#pragma once

// Static SVG figures from aggregated runs.  Output is a pure function of the
// input (fixed number formatting, no timestamps).

#include <string>
#include <utility>
#include <vector>

#include "rbal/campaign.hpp"
#include "rbal/metrics.hpp"

namespace rbal {

using ClassifierAggregate = std::pair<ClassifierKind, Aggregate>;

// Decision accuracy and f1 against query count: median line and IQR band per
// classifier, y in [0, 1].
std::string curves_svg(const std::vector<ClassifierAggregate>& data);
// Distribution of total queries per run.
std::string histogram_svg(const std::vector<ClassifierAggregate>& data);
// Fraction of runs querying each observation index.
std::string query_frequency_svg(const std::vector<ClassifierAggregate>& data);

inline constexpr const char* kCurvesSvg = "curves.svg";
inline constexpr const char* kHistogramSvg = "query_histogram.svg";
inline constexpr const char* kFrequencySvg = "query_frequency.svg";

// Reads the manifest in out_dir and writes the three figures there.  Throws
// ContractError when no classifier has a successful run.
std::vector<std::string> write_plots(const std::string& out_dir, int histogram_bin_width = 10);

}  // namespace rbal
