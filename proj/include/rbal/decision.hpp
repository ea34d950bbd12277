#pragma once

// Single-step maintenance decision process: a health state y_t observed
// through a classifier belief, a decision d_t, a transition to y_{t+1}, and
// utilities on both states and on the action.  Provides expected utilities,
// maximum expected utility with and without perfect information about y_t,
// and the resulting expected value of perfect information (EVPI) that drives
// inspection (label query) decisions.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rbal {

// Health state, 1-based (1 normal, 2 cold, 3 incipient damage, 4 advanced
// damage under the default process).
struct HealthState {
  int index = 1;
  friend bool operator==(HealthState, HealthState) = default;
};

// Maintenance action, 0-based (0 do nothing, 1 repair by default).
struct Action {
  int index = 0;
  friend bool operator==(Action, Action) = default;
};

inline constexpr Action kDoNothing{0};
inline constexpr Action kRepair{1};

// Probability vector over the K health states.
class Belief {
 public:
  // Throws ContractError unless entries are >= 0 and sum to 1 within 1e-9.
  explicit Belief(Eigen::VectorXd probs);

  // Rescales a non-negative vector with positive sum.
  static Belief normalized(Eigen::VectorXd weights);
  static Belief uniform(int class_count);
  static Belief one_hot(HealthState state, int class_count);

  const Eigen::VectorXd& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int k) const { return probs_[k]; }

  // Most probable state, ties toward the lower index.
  HealthState argmax() const;

 private:
  Eigen::VectorXd probs_;
};

// tensor[y][y'][d] = P(y_{t+1}=y' | y_t=y, d_t=d), stored as one K x K
// row-stochastic matrix per action.
class TransitionModel {
 public:
  // Rows must sum to 1 within 1e-9.  With renormalize, rows within 0.05 of
  // unit sum are rescaled instead of rejected.
  TransitionModel(std::vector<Eigen::MatrixXd> per_action,
                  bool renormalize = false);

  int state_count() const { return static_cast<int>(per_action_.front().rows()); }
  int action_count() const { return static_cast<int>(per_action_.size()); }
  const Eigen::MatrixXd& for_action(Action d) const;

 private:
  std::vector<Eigen::MatrixXd> per_action_;
};

struct UtilityModel {
  Eigen::VectorXd state_utility;   // U(y_t) and U(y_{t+1})
  Eigen::VectorXd action_utility;  // U(d_t)
};

class DecisionProcess {
 public:
  DecisionProcess(TransitionModel transition, UtilityModel utility,
                  double inspection_cost);

  // Tables 1-4 of the Z24 case study with row-sum corrections and
  // C_ins = 30.
  static DecisionProcess z24_default();

  // {"transition": [[[...]]], "state_utility": [...],
  //  "action_utility": [...], "inspection_cost": 30.0}
  // transition is indexed [y][y'][d].
  static DecisionProcess from_json(const nlohmann::json& doc,
                                   bool renormalize = false);
  static DecisionProcess load(const std::string& path,
                              bool renormalize = false);
  nlohmann::json to_json() const;

  const TransitionModel& transition() const { return transition_; }
  const UtilityModel& utility() const { return utility_; }
  double inspection_cost() const { return inspection_cost_; }
  int state_count() const { return transition_.state_count(); }
  int action_count() const { return transition_.action_count(); }

  // Copies with one field replaced; used for cost sweeps and invariance
  // checks.
  DecisionProcess with_inspection_cost(double cost) const;
  DecisionProcess with_state_utility(Eigen::VectorXd state_utility) const;

  // Value of taking d in known state y, excluding the current-state term:
  // sum_{y'} P(y'|y,d) U(y') + U(d).
  double lookahead_value(int state, Action d) const;

 private:
  TransitionModel transition_;
  UtilityModel utility_;
  double inspection_cost_;
};

struct Decision {
  Action action;
  double expected_utility = 0.0;
};

double expected_utility(const Belief& belief, Action action,
                        const DecisionProcess& dp);

// Best action under the belief; ties toward the lowest action index.
Decision meu(const Belief& belief, const DecisionProcess& dp);

// Expected utility when y_t is revealed before d_t.
double meu_perfect_info(const Belief& belief, const DecisionProcess& dp);

double evpi(const Belief& belief, const DecisionProcess& dp);

// Strict: an inspection priced exactly at the EVPI is not bought.
bool should_query(double evpi_value, const DecisionProcess& dp);

inline Action decide(const Belief& belief, const DecisionProcess& dp) {
  return meu(belief, dp).action;
}

}  // namespace rbal
