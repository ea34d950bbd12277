#pragma once

// Per-step log of one active-learning campaign and its CSV form:
//
//   t,belief_1..belief_K,evpi,queried,action,oracle_action,pred_label,true_label
//
// plus the learning curves recorded at each query milestone:
//
//   query_count,decision_accuracy,f1

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbal/decision.hpp"

namespace rbal {

struct StepRecord {
  int t = 0;                  // stream index
  Eigen::VectorXd belief;     // classifier belief before any query
  double evpi = 0.0;
  bool queried = false;
  Action action;              // action taken
  Action oracle_action;       // action under the one-hot true state
  int predicted_label = 0;
  int true_label = 0;
  bool fallback = false;      // uniform belief substituted for the classifier
};

struct CurvePoint {
  int query_count = 0;
  double value = 0.0;
};

struct RunRecord {
  int class_count = 4;
  int initial_labelled_count = 0;
  int stream_length = 0;
  std::vector<StepRecord> steps;
  std::vector<CurvePoint> accuracy_curve;  // whole-stream decision accuracy
  std::vector<CurvePoint> f1_curve;        // whole-stream macro f1
  nlohmann::json final_model;              // classifier checkpoint

  int step_queries() const;
  // Seed labels count as queries.
  int total_queries() const { return initial_labelled_count + step_queries(); }
};

void write_record_csv(std::ostream& out, const RunRecord& record);
void write_record_csv(const std::string& path, const RunRecord& record);
void write_curve_csv(const std::string& path, const RunRecord& record);

// Reads back the step table; curves and checkpoint are not part of it.
RunRecord read_record_csv(const std::string& path, int class_count);
// Returns {accuracy_curve, f1_curve}.
std::pair<std::vector<CurvePoint>, std::vector<CurvePoint>> read_curve_csv(const std::string& path);

}  // namespace rbal
