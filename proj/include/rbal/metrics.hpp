#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rbal/record.hpp"

namespace rbal {

// Fraction of logged steps whose action matches the oracle action.
double decision_accuracy(const RunRecord& record);
double decision_accuracy(std::span<const Action> chosen, std::span<const Action> oracle);

// Unweighted mean over classes of 2PR / (P + R); a class with P + R = 0
// scores 0.  Labels are 1-based.
double macro_f1(std::span<const int> predicted, std::span<const int> truth, int class_count);

struct RunSummary {
  std::vector<CurvePoint> accuracy_curve;
  std::vector<CurvePoint> f1_curve;
  int total_queries = 0;
  std::vector<int> query_indicator;  // per stream index, 1 if queried
};

RunSummary summarize(const RunRecord& record);

// Percentile with linear interpolation between order statistics
// (p in [0, 1]).
double percentile(std::vector<double> values, double p);

struct BandPoint {
  int query_count = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

// Aligns curves on query count by carrying each run's last value forward.
// Runs contribute from their first milestone onwards.
std::vector<BandPoint> aggregate_curves(const std::vector<std::vector<CurvePoint>>& curves);

struct HistogramBin {
  int lower = 0;  // inclusive; bin covers [lower, lower + width)
  int count = 0;
};

struct Aggregate {
  int runs = 0;
  std::vector<BandPoint> accuracy;
  std::vector<BandPoint> f1;
  std::vector<HistogramBin> query_histogram;
  int histogram_bin_width = 1;
  std::vector<int> query_frequency;  // per stream index, runs that queried it
  double median_total_queries = 0.0;
  double q25_total_queries = 0.0;
  double q75_total_queries = 0.0;
  double median_final_accuracy = 0.0;
  double median_final_f1 = 0.0;
};

Aggregate aggregate_runs(const std::vector<RunSummary>& summaries, int histogram_bin_width = 10);

}  // namespace rbal
