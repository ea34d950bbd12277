#include "rbal/decision.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rbal/errors.hpp"

namespace rbal {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kRenormalizeWindow = 0.05;

void require_state_count(const Belief& belief, const DecisionProcess& dp) {
  if (belief.size() != dp.state_count()) {
    std::ostringstream msg;
    msg << "belief has " << belief.size() << " states, decision process has "
        << dp.state_count();
    throw ContractError(msg.str());
  }
}

}  // namespace

Belief::Belief(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw ContractError("belief must be non-empty");
  for (Eigen::Index k = 0; k < probs_.size(); ++k) {
    if (!std::isfinite(probs_[k]) || probs_[k] < 0.0)
      throw ContractError("belief entries must be finite and non-negative");
  }
  if (std::abs(probs_.sum() - 1.0) > kSumTolerance)
    throw ContractError("belief entries must sum to 1");
}

Belief Belief::normalized(Eigen::VectorXd weights) {
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (!std::isfinite(weights[k]) || weights[k] < 0.0)
      throw ContractError("belief weights must be finite and non-negative");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) throw ContractError("belief weights sum to zero");
  weights /= total;
  return Belief(std::move(weights));
}

Belief Belief::uniform(int class_count) {
  if (class_count < 1) throw ContractError("class_count must be >= 1");
  return Belief(Eigen::VectorXd::Constant(class_count, 1.0 / class_count));
}

Belief Belief::one_hot(HealthState state, int class_count) {
  if (state.index < 1 || state.index > class_count)
    throw ContractError("health state outside 1..K");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(class_count);
  p[state.index - 1] = 1.0;
  return Belief(std::move(p));
}

HealthState Belief::argmax() const {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < probs_.size(); ++k) {
    if (probs_[k] > probs_[best]) best = k;
  }
  return HealthState{static_cast<int>(best) + 1};
}

TransitionModel::TransitionModel(std::vector<Eigen::MatrixXd> per_action,
                                 bool renormalize)
    : per_action_(std::move(per_action)) {
  if (per_action_.empty()) throw ConfigError("transition model has no actions");
  const auto states = per_action_.front().rows();
  if (states == 0) throw ConfigError("transition model has no states");
  for (std::size_t d = 0; d < per_action_.size(); ++d) {
    auto& table = per_action_[d];
    if (table.rows() != states || table.cols() != states)
      throw ConfigError("transition tables must be K x K for every action");
    for (Eigen::Index y = 0; y < states; ++y) {
      if (!table.row(y).allFinite() || (table.row(y).array() < 0.0).any())
        throw ConfigError("transition probabilities must be finite and >= 0");
      const double sum = table.row(y).sum();
      if (std::abs(sum - 1.0) <= kSumTolerance) continue;
      if (renormalize && std::abs(sum - 1.0) <= kRenormalizeWindow) {
        table.row(y) /= sum;
        continue;
      }
      std::ostringstream msg;
      msg << "transition row (y=" << y + 1 << ", d=" << d << ") sums to "
          << sum;
      throw ConfigError(msg.str());
    }
  }
}

const Eigen::MatrixXd& TransitionModel::for_action(Action d) const {
  if (d.index < 0 || d.index >= action_count())
    throw ContractError("action index out of range");
  return per_action_[static_cast<std::size_t>(d.index)];
}

DecisionProcess::DecisionProcess(TransitionModel transition,
                                 UtilityModel utility, double inspection_cost)
    : transition_(std::move(transition)),
      utility_(std::move(utility)),
      inspection_cost_(inspection_cost) {
  if (utility_.state_utility.size() != transition_.state_count())
    throw ConfigError("state_utility length must equal the state count");
  if (utility_.action_utility.size() != transition_.action_count())
    throw ConfigError("action_utility length must equal the action count");
  if (!utility_.state_utility.allFinite() ||
      !utility_.action_utility.allFinite())
    throw ConfigError("utilities must be finite");
  if (!std::isfinite(inspection_cost_) || inspection_cost_ < 0.0)
    throw ConfigError("inspection_cost must be finite and >= 0");
}

DecisionProcess DecisionProcess::z24_default() {
  Eigen::MatrixXd do_nothing(4, 4);
  do_nothing << 0.7, 0.28, 0.015, 0.005,
                0.43, 0.55, 0.015, 0.005,
                0.0, 0.0, 0.8, 0.2,
                0.0, 0.0, 0.0, 1.0;
  Eigen::MatrixXd repair(4, 4);
  repair << 0.7143, 0.2857, 0.0, 0.0,
            0.4388, 0.5612, 0.0, 0.0,
            0.5996, 0.3904, 0.01, 0.0,
            0.5996, 0.3904, 0.0, 0.01;
  UtilityModel utility{Eigen::Vector4d(10.0, 10.0, -50.0, -1000.0),
                       Eigen::Vector2d(0.0, -100.0)};
  return DecisionProcess(TransitionModel({do_nothing, repair}),
                         std::move(utility), 30.0);
}

DecisionProcess DecisionProcess::from_json(const nlohmann::json& doc,
                                           bool renormalize) {
  try {
    const auto& tensor = doc.at("transition");
    const auto states = static_cast<Eigen::Index>(tensor.size());
    if (states == 0) throw ConfigError("transition tensor is empty");
    const auto actions = static_cast<Eigen::Index>(tensor.at(0).at(0).size());
    std::vector<Eigen::MatrixXd> per_action(
        static_cast<std::size_t>(actions), Eigen::MatrixXd(states, states));
    for (Eigen::Index y = 0; y < states; ++y) {
      const auto& row = tensor.at(y);
      if (static_cast<Eigen::Index>(row.size()) != states)
        throw ConfigError("transition tensor must be K x K x M");
      for (Eigen::Index next = 0; next < states; ++next) {
        const auto& cell = row.at(next);
        if (static_cast<Eigen::Index>(cell.size()) != actions)
          throw ConfigError("transition tensor must be K x K x M");
        for (Eigen::Index d = 0; d < actions; ++d)
          per_action[static_cast<std::size_t>(d)](y, next) =
              cell.at(d).get<double>();
      }
    }
    auto read_vector = [&](const char* key) {
      const auto values = doc.at(key).get<std::vector<double>>();
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
          values.data(), static_cast<Eigen::Index>(values.size())));
    };
    UtilityModel utility{read_vector("state_utility"),
                         read_vector("action_utility")};
    return DecisionProcess(
        TransitionModel(std::move(per_action), renormalize),
        std::move(utility), doc.at("inspection_cost").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("decision process JSON: ") + e.what());
  }
}

DecisionProcess DecisionProcess::load(const std::string& path,
                                      bool renormalize) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open decision process file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return from_json(doc, renormalize);
}

nlohmann::json DecisionProcess::to_json() const {
  const int states = state_count();
  const int actions = action_count();
  nlohmann::json tensor = nlohmann::json::array();
  for (int y = 0; y < states; ++y) {
    nlohmann::json row = nlohmann::json::array();
    for (int next = 0; next < states; ++next) {
      nlohmann::json cell = nlohmann::json::array();
      for (int d = 0; d < actions; ++d)
        cell.push_back(transition_.for_action(Action{d})(y, next));
      row.push_back(std::move(cell));
    }
    tensor.push_back(std::move(row));
  }
  const auto& su = utility_.state_utility;
  const auto& au = utility_.action_utility;
  return {{"transition", tensor},
          {"state_utility", std::vector<double>(su.data(), su.data() + su.size())},
          {"action_utility", std::vector<double>(au.data(), au.data() + au.size())},
          {"inspection_cost", inspection_cost_}};
}

DecisionProcess DecisionProcess::with_inspection_cost(double cost) const {
  return DecisionProcess(transition_, utility_, cost);
}

DecisionProcess DecisionProcess::with_state_utility(
    Eigen::VectorXd state_utility) const {
  return DecisionProcess(transition_,
                         UtilityModel{std::move(state_utility),
                                      utility_.action_utility},
                         inspection_cost_);
}

double DecisionProcess::lookahead_value(int state, Action d) const {
  const auto& table = transition_.for_action(d);
  return table.row(state).dot(utility_.state_utility) +
         utility_.action_utility[d.index];
}

double expected_utility(const Belief& belief, Action action,
                        const DecisionProcess& dp) {
  require_state_count(belief, dp);
  if (action.index < 0 || action.index >= dp.action_count())
    throw ContractError("action index out of range");
  const auto& u_now = dp.utility().state_utility;
  const auto& table = dp.transition().for_action(action);
  // sum_y b(y) [U(y) + sum_y' P(y'|y,d) U(y')] + U(d)
  const Eigen::VectorXd per_state = u_now + table * u_now;
  return belief.probs().dot(per_state) +
         dp.utility().action_utility[action.index];
}

Decision meu(const Belief& belief, const DecisionProcess& dp) {
  require_state_count(belief, dp);
  Decision best{Action{0}, expected_utility(belief, Action{0}, dp)};
  for (int d = 1; d < dp.action_count(); ++d) {
    const double eu = expected_utility(belief, Action{d}, dp);
    if (eu > best.expected_utility) best = Decision{Action{d}, eu};
  }
  return best;
}

double meu_perfect_info(const Belief& belief, const DecisionProcess& dp) {
  require_state_count(belief, dp);
  const auto& u_now = dp.utility().state_utility;
  double total = 0.0;
  for (int y = 0; y < dp.state_count(); ++y) {
    if (belief[y] == 0.0) continue;
    double best = dp.lookahead_value(y, Action{0});
    for (int d = 1; d < dp.action_count(); ++d)
      best = std::max(best, dp.lookahead_value(y, Action{d}));
    total += belief[y] * (u_now[y] + best);
  }
  return total;
}

double evpi(const Belief& belief, const DecisionProcess& dp) {
  // The current-state term sum_y b(y) U(y) appears in both diagrams and is
  // left out so that it cancels exactly instead of up to rounding.
  require_state_count(belief, dp);
  double informed = 0.0;
  for (int y = 0; y < dp.state_count(); ++y) {
    if (belief[y] == 0.0) continue;
    double best = dp.lookahead_value(y, Action{0});
    for (int d = 1; d < dp.action_count(); ++d)
      best = std::max(best, dp.lookahead_value(y, Action{d}));
    informed += belief[y] * best;
  }
  double uninformed = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < dp.action_count(); ++d) {
    double value = 0.0;
    for (int y = 0; y < dp.state_count(); ++y) {
      if (belief[y] == 0.0) continue;
      value += belief[y] * dp.lookahead_value(y, Action{d});
    }
    uninformed = std::max(uninformed, value);
  }
  return informed - uninformed;
}

bool should_query(double evpi_value, const DecisionProcess& dp) {
  return evpi_value > dp.inspection_cost();
}

}  // namespace rbal
