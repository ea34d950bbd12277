#include "rbal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rbal/errors.hpp"

namespace rbal {

double decision_accuracy(std::span<const Action> chosen, std::span<const Action> oracle) {
  if (chosen.size() != oracle.size()) throw ContractError("decision_accuracy: length mismatch");
  if (chosen.empty()) throw ContractError("decision_accuracy: no steps");
  std::size_t matches = 0;
  for (std::size_t i = 0; i < chosen.size(); ++i) matches += chosen[i] == oracle[i] ? 1 : 0;
  return static_cast<double>(matches) / static_cast<double>(chosen.size());
}

double decision_accuracy(const RunRecord& record) {
  std::vector<Action> chosen, oracle;
  for (const auto& step : record.steps) {
    chosen.push_back(step.action);
    oracle.push_back(step.oracle_action);
  }
  return decision_accuracy(chosen, oracle);
}

double macro_f1(std::span<const int> predicted, std::span<const int> truth, int class_count) {
  if (predicted.size() != truth.size()) throw ContractError("macro_f1: length mismatch");
  if (class_count < 1) throw ContractError("macro_f1: class_count must be >= 1");
  std::vector<double> tp(static_cast<std::size_t>(class_count), 0.0);
  std::vector<double> fp(tp), fn(tp);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predicted[i] - 1;
    const int t = truth[i] - 1;
    if (p < 0 || p >= class_count || t < 0 || t >= class_count)
      throw ContractError("macro_f1: label outside 1..K");
    if (p == t) {
      tp[static_cast<std::size_t>(t)] += 1.0;
    } else {
      fp[static_cast<std::size_t>(p)] += 1.0;
      fn[static_cast<std::size_t>(t)] += 1.0;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    const double precision = tp[k] + fp[k] > 0.0 ? tp[k] / (tp[k] + fp[k]) : 0.0;
    const double recall = tp[k] + fn[k] > 0.0 ? tp[k] / (tp[k] + fn[k]) : 0.0;
    if (precision + recall > 0.0) total += 2.0 * precision * recall / (precision + recall);
  }
  return total / class_count;
}

RunSummary summarize(const RunRecord& record) {
  RunSummary summary;
  summary.accuracy_curve = record.accuracy_curve;
  summary.f1_curve = record.f1_curve;
  summary.total_queries = record.total_queries();
  summary.query_indicator.assign(static_cast<std::size_t>(record.stream_length), 0);
  for (int t = 0; t < std::min(record.initial_labelled_count, record.stream_length); ++t)
    summary.query_indicator[static_cast<std::size_t>(t)] = 1;
  for (const auto& step : record.steps) {
    if (step.queried && step.t >= 0 && step.t < record.stream_length)
      summary.query_indicator[static_cast<std::size_t>(step.t)] = 1;
  }
  return summary;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw ContractError("percentile: no values");
  std::sort(values.begin(), values.end());
  const double rank = p * static_cast<double>(values.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(rank));
  const auto upper = std::min(lower + 1, values.size() - 1);
  const double fraction = rank - static_cast<double>(lower);
  return values[lower] + fraction * (values[upper] - values[lower]);
}

std::vector<BandPoint> aggregate_curves(const std::vector<std::vector<CurvePoint>>& curves) {
  std::set<int> grid;
  for (const auto& curve : curves)
    for (const auto& point : curve) grid.insert(point.query_count);
  std::vector<BandPoint> band;
  for (int q : grid) {
    std::vector<double> values;
    for (const auto& curve : curves) {
      // Last milestone at or before q.
      const CurvePoint* last = nullptr;
      for (const auto& point : curve) {
        if (point.query_count <= q) last = &point;
        else break;
      }
      if (last != nullptr) values.push_back(last->value);
    }
    if (values.empty()) continue;
    band.push_back({q, percentile(values, 0.5), percentile(values, 0.25), percentile(values, 0.75)});
  }
  return band;
}

Aggregate aggregate_runs(const std::vector<RunSummary>& summaries, int histogram_bin_width) {
  if (summaries.empty()) throw ContractError("aggregate_runs: no runs");
  if (histogram_bin_width < 1) throw ContractError("aggregate_runs: bin width must be >= 1");
  Aggregate out;
  out.runs = static_cast<int>(summaries.size());
  out.histogram_bin_width = histogram_bin_width;

  std::vector<std::vector<CurvePoint>> accuracy, f1;
  std::vector<double> totals, final_accuracy, final_f1;
  std::size_t longest = 0;
  for (const auto& s : summaries) {
    accuracy.push_back(s.accuracy_curve);
    f1.push_back(s.f1_curve);
    totals.push_back(s.total_queries);
    if (!s.accuracy_curve.empty()) final_accuracy.push_back(s.accuracy_curve.back().value);
    if (!s.f1_curve.empty()) final_f1.push_back(s.f1_curve.back().value);
    longest = std::max(longest, s.query_indicator.size());
  }
  out.accuracy = aggregate_curves(accuracy);
  out.f1 = aggregate_curves(f1);
  out.median_total_queries = percentile(totals, 0.5);
  out.q25_total_queries = percentile(totals, 0.25);
  out.q75_total_queries = percentile(totals, 0.75);
  if (!final_accuracy.empty()) out.median_final_accuracy = percentile(final_accuracy, 0.5);
  if (!final_f1.empty()) out.median_final_f1 = percentile(final_f1, 0.5);

  std::map<int, int> bins;
  for (const auto& s : summaries) {
    const int lower = (s.total_queries / histogram_bin_width) * histogram_bin_width;
    ++bins[lower];
  }
  for (int lower = bins.begin()->first; lower <= bins.rbegin()->first; lower += histogram_bin_width) {
    const auto it = bins.find(lower);
    out.query_histogram.push_back({lower, it == bins.end() ? 0 : it->second});
  }

  out.query_frequency.assign(longest, 0);
  for (const auto& s : summaries)
    for (std::size_t t = 0; t < s.query_indicator.size(); ++t) out.query_frequency[t] += s.query_indicator[t];
  return out;
}

}  // namespace rbal
