#include "rbal/mrvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "rbal/errors.hpp"
#include "rbal/probit.hpp"

namespace rbal {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

nlohmann::json matrix_to_json(const MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const nlohmann::json& rows, Index cols) {
  MatrixXd m(static_cast<Index>(rows.size()), cols);
  for (Index i = 0; i < m.rows(); ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != cols)
      throw ParseError("model JSON: ragged matrix");
    for (Index j = 0; j < cols; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

MatrixXd select_rows(const MatrixXd& m, const std::vector<int>& rows) {
  MatrixXd out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
  return out;
}

MatrixXd select_cols(const MatrixXd& m, const std::vector<int>& cols) {
  MatrixXd out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = m.col(cols[c]);
  return out;
}

// Cholesky of a symmetric system, retrying once with 1e-8 * trace jitter.
Eigen::LLT<MatrixXd> factorize_spd(const MatrixXd& system) {
  Eigen::LLT<MatrixXd> llt(system);
  if (llt.info() == Eigen::Success) return llt;
  const double jitter = 1e-8 * std::max(system.trace(), 1e-300);
  MatrixXd regularized = system;
  regularized.diagonal().array() += jitter;
  llt.compute(regularized);
  if (llt.info() != Eigen::Success)
    throw NumericalError("system is not positive definite after jitter");
  return llt;
}

std::vector<int> zero_based(const std::vector<int>& labels, int class_count) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > class_count)
      throw ContractError("label outside 1..K");
    out[i] = labels[i] - 1;
  }
  return out;
}

// Per-basis contribution to the decomposed marginal likelihood,
// 0.5 * [K log a - K log(a + s) + |q|^2 / (a + s)].
double basis_contribution(double alpha, double s, double q2, int classes) {
  return 0.5 * (classes * (std::log(alpha) - std::log(alpha + s)) + q2 / (alpha + s));
}

}  // namespace

void TrainConfig::validate() const {
  if (variant != MrvmVariant::kConstructive && variant != MrvmVariant::kPruning)
    throw ConfigError("train variant must be 1 or 2");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
  if (!(gamma_a > 0.0) || !(gamma_b > 0.0)) throw ConfigError("gamma_a and gamma_b must be > 0");
  if (!(prune_threshold > 0.0)) throw ConfigError("prune_threshold must be > 0");
  if (!(initial_scale > 0.0)) throw ConfigError("initial_scale must be > 0");
  if (quadrature_nodes < 8) throw ConfigError("quadrature_nodes must be >= 8");
}

nlohmann::json to_json(const TrainConfig& config) {
  return {{"variant", static_cast<int>(config.variant)},
          {"max_iterations", config.max_iterations},
          {"tolerance", config.tolerance},
          {"gamma_a", config.gamma_a},
          {"gamma_b", config.gamma_b},
          {"prune_threshold", config.prune_threshold},
          {"initial_scale", config.initial_scale},
          {"allow_single_class", config.allow_single_class},
          {"quadrature_nodes", config.quadrature_nodes},
          {"seed", config.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& doc) {
  static const std::set<std::string> known{"variant",       "max_iterations",  "tolerance",
                                           "gamma_a",       "gamma_b",         "prune_threshold",
                                           "initial_scale", "allow_single_class",
                                           "quadrature_nodes", "seed"};
  if (!doc.is_object()) throw ConfigError("train config must be an object");
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) throw ConfigError("unknown train key: " + key);
  TrainConfig config;
  config.variant = static_cast<MrvmVariant>(doc.value("variant", static_cast<int>(config.variant)));
  config.max_iterations = doc.value("max_iterations", config.max_iterations);
  config.tolerance = doc.value("tolerance", config.tolerance);
  config.gamma_a = doc.value("gamma_a", config.gamma_a);
  config.gamma_b = doc.value("gamma_b", config.gamma_b);
  config.prune_threshold = doc.value("prune_threshold", config.prune_threshold);
  config.initial_scale = doc.value("initial_scale", config.initial_scale);
  config.allow_single_class = doc.value("allow_single_class", config.allow_single_class);
  config.quadrature_nodes = doc.value("quadrature_nodes", config.quadrature_nodes);
  config.seed = doc.value("seed", config.seed);
  config.validate();
  return config;
}

int LabelledSet::distinct_labels() const {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

KernelSetup KernelSetup::median_heuristic(const FeatureMatrix& x) {
  KernelSetup setup;
  setup.standardization = Standardizer::fit(x);
  setup.kernel = KernelSpec::rbf(median_pairwise_distance(setup.standardization.apply(x)));
  return setup;
}

// ---- E and M steps -------------------------------------------------------

Eigen::MatrixXd estep_from_means(const Eigen::MatrixXd& means,
                                 const std::vector<int>& labels,
                                 int quadrature_nodes) {
  if (static_cast<Index>(labels.size()) != means.cols())
    throw ContractError("estep: one label per column required");
  const auto& rule = GaussHermiteRule::cached(quadrature_nodes);
  const int classes = static_cast<int>(means.rows());
  MatrixXd expectations(means.rows(), means.cols());
  for (Index n = 0; n < means.cols(); ++n) {
    const int label = labels[static_cast<std::size_t>(n)] - 1;
    if (label < 0 || label >= classes) throw ContractError("estep: label outside 1..K");
    expectations.col(n) = truncated_probit_mean(means.col(n), label, rule);
  }
  return expectations;
}

Eigen::MatrixXd estep_expectations(const Eigen::MatrixXd& weights,
                                   const Eigen::MatrixXd& gram_active_by_all,
                                   const std::vector<int>& labels,
                                   int quadrature_nodes) {
  if (weights.rows() != gram_active_by_all.rows())
    throw ContractError("estep: weights and gram disagree on the active set");
  return estep_from_means(weights.transpose() * gram_active_by_all, labels, quadrature_nodes);
}

Eigen::MatrixXd mstep_weights(const Eigen::MatrixXd& gram_active,
                              const Eigen::MatrixXd& expectations,
                              const Eigen::MatrixXd& scales) {
  if (gram_active.cols() != expectations.cols())
    throw ContractError("mstep: gram and expectations disagree on sample count");
  if (scales.rows() != gram_active.rows() || scales.cols() != expectations.rows())
    throw ContractError("mstep: scales must be n* x K");
  const MatrixXd outer = gram_active * gram_active.transpose();
  const MatrixXd rhs = gram_active * expectations.transpose();
  MatrixXd weights(gram_active.rows(), expectations.rows());
  for (Index k = 0; k < expectations.rows(); ++k) {
    MatrixXd system = outer;
    system.diagonal() += scales.col(k);
    weights.col(k) = factorize_spd(system).solve(rhs.col(k));
  }
  return weights;
}

Eigen::MatrixXd mrvm2_update_scales(const Eigen::MatrixXd& weights, double gamma_a,
                                    double gamma_b) {
  return ((2.0 * gamma_a + 1.0) / (weights.array().square() + 2.0 * gamma_b)).matrix();
}

std::vector<int> mrvm2_surviving_rows(const Eigen::MatrixXd& scales, double threshold) {
  std::vector<int> keep;
  for (Index i = 0; i < scales.rows(); ++i) {
    if (scales.row(i).minCoeff() <= threshold) keep.push_back(static_cast<int>(i));
  }
  if (keep.empty() && scales.rows() > 0) {
    Index best = 0;
    scales.rowwise().minCoeff().minCoeff(&best);
    keep.push_back(static_cast<int>(best));
  }
  return keep;
}

double mrvm2_objective(const Eigen::MatrixXd& weights,
                       const Eigen::MatrixXd& gram_active_by_all,
                       const std::vector<int>& labels, const Eigen::MatrixXd& scales,
                       double gamma_a, double gamma_b, int quadrature_nodes) {
  const auto& rule = GaussHermiteRule::cached(quadrature_nodes);
  const MatrixXd means = weights.transpose() * gram_active_by_all;
  double total = 0.0;
  for (Index n = 0; n < means.cols(); ++n)
    total += probit_log_likelihood(means.col(n), labels[static_cast<std::size_t>(n)] - 1, rule);
  // Gaussian weight prior and the scale hyperprior whose stationary point
  // is the (2a + 1) / (w^2 + 2b) update.
  const auto a = scales.array();
  total += (-0.5 * a * weights.array().square() + (gamma_a + 0.5) * a.log() - gamma_b * a).sum();
  return total;
}

// ---- constructive scheme -------------------------------------------------

ConstructiveState::ConstructiveState(Eigen::MatrixXd basis_, Eigen::MatrixXd targets_)
    : basis(std::move(basis_)), targets(std::move(targets_)) {
  if (basis.cols() != targets.cols() || basis.rows() != targets.cols())
    throw ContractError("constructive state: basis must be n x n with K x n targets");
  objective = constructive_objective(basis, targets, active, alpha);
}

double constructive_objective(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& targets,
                              const std::vector<int>& active, const Eigen::VectorXd& alpha) {
  const double n = static_cast<double>(basis.rows());
  const double classes = static_cast<double>(targets.rows());
  double log_det = 0.0;
  double quad = targets.squaredNorm();
  if (!active.empty()) {
    const MatrixXd phi = select_cols(basis, active);
    MatrixXd system = phi.transpose() * phi;
    system.diagonal() += alpha;
    const auto llt = factorize_spd(system);
    const MatrixXd projected = phi.transpose() * targets.transpose();  // m x K
    const MatrixXd l = llt.matrixL();
    log_det = 2.0 * l.diagonal().array().log().sum() - alpha.array().log().sum();
    quad -= (projected.array() * llt.solve(projected).array()).sum();
  }
  return -0.5 * (classes * (n * std::log(2.0 * std::numbers::pi) + log_det) + quad);
}

ConstructiveState mrvm1_update_active_set(ConstructiveState state) {
  const Index n = state.basis.cols();
  const int classes = static_cast<int>(state.targets.rows());
  const auto m = static_cast<Index>(state.active.size());

  const MatrixXd phi_t_y = state.basis.transpose() * state.targets.transpose();  // n x K
  VectorXd sparsity = state.basis.colwise().squaredNorm().transpose();
  MatrixXd quality = phi_t_y;
  if (m > 0) {
    const MatrixXd phi_a = select_cols(state.basis, state.active);
    MatrixXd system = phi_a.transpose() * phi_a;
    system.diagonal() += state.alpha;
    const auto llt = factorize_spd(system);
    const MatrixXd cross = state.basis.transpose() * phi_a;              // n x m
    const MatrixXd cross_sigma = llt.solve(cross.transpose()).transpose();  // n x m
    sparsity -= (cross_sigma.array() * cross.array()).rowwise().sum().matrix();
    quality -= cross_sigma * (phi_a.transpose() * state.targets.transpose());
  }

  std::vector<int> position(static_cast<std::size_t>(n), -1);
  for (Index p = 0; p < m; ++p) position[static_cast<std::size_t>(state.active[static_cast<std::size_t>(p)])] = static_cast<int>(p);

  ConstructiveAction best_action = ConstructiveAction::kNone;
  int best_index = -1;
  double best_gain = 0.0;
  double best_alpha = 0.0;
  int fallback_index = -1;
  double fallback_theta = -std::numeric_limits<double>::infinity();
  double fallback_s = 1.0;

  for (Index i = 0; i < n; ++i) {
    const int p = position[static_cast<std::size_t>(i)];
    double s = sparsity[i];
    VectorXd q = quality.row(i).transpose();
    if (p >= 0) {
      const double a = state.alpha[p];
      const double denom = a - s;
      if (!(denom > 0.0)) continue;  // rounding; leave this basis alone
      s = a * s / denom;
      q *= a / denom;
    }
    if (!(s > 0.0)) continue;
    const double q2 = q.squaredNorm();
    const double theta = q2 - classes * s;
    if (p < 0 && theta > fallback_theta) {
      fallback_theta = theta;
      fallback_index = static_cast<int>(i);
      fallback_s = s;
    }
    double gain = 0.0;
    ConstructiveAction action = ConstructiveAction::kNone;
    double new_alpha = 0.0;
    if (theta > 0.0) {
      new_alpha = classes * s * s / theta;
      gain = basis_contribution(new_alpha, s, q2, classes);
      if (p >= 0) {
        gain -= basis_contribution(state.alpha[p], s, q2, classes);
        action = ConstructiveAction::kReestimate;
      } else {
        action = ConstructiveAction::kAdd;
      }
    } else if (p >= 0 && m > 1) {
      gain = -basis_contribution(state.alpha[p], s, q2, classes);
      action = ConstructiveAction::kDelete;
    }
    if (action != ConstructiveAction::kNone && gain > best_gain) {
      best_gain = gain;
      best_action = action;
      best_index = static_cast<int>(i);
      best_alpha = new_alpha;
    }
  }

  const double threshold = 1e-10 * std::max(1.0, std::abs(state.objective));
  if (best_action == ConstructiveAction::kNone || best_gain <= threshold) {
    if (m == 0 && fallback_index >= 0) {
      // Nothing carries positive evidence; keep the least-bad sample with a
      // scale large enough to leave the fit essentially at the prior.
      state.active.push_back(fallback_index);
      state.alpha.resize(1);
      state.alpha[0] = 1e6 * std::max(1.0, fallback_s);
      state.last_action = ConstructiveAction::kAdd;
      state.last_index = fallback_index;
      state.objective = constructive_objective(state.basis, state.targets, state.active, state.alpha);
    } else {
      state.last_action = ConstructiveAction::kNone;
      state.last_index = -1;
    }
    state.converged = true;
    return state;
  }

  const int p = position[static_cast<std::size_t>(best_index)];
  switch (best_action) {
    case ConstructiveAction::kAdd:
      state.active.push_back(best_index);
      state.alpha.conservativeResize(m + 1);
      state.alpha[m] = best_alpha;
      break;
    case ConstructiveAction::kReestimate:
      state.alpha[p] = best_alpha;
      break;
    case ConstructiveAction::kDelete: {
      state.active.erase(state.active.begin() + p);
      VectorXd kept(m - 1);
      kept << state.alpha.head(p), state.alpha.tail(m - p - 1);
      state.alpha = kept;
      break;
    }
    case ConstructiveAction::kNone:
      break;
  }
  state.last_action = best_action;
  state.last_index = best_index;
  state.converged = false;
  state.objective = constructive_objective(state.basis, state.targets, state.active, state.alpha);
  return state;
}

ConstructiveState mrvm1_select_relevant(ConstructiveState state, int max_steps) {
  for (int step = 0; step < max_steps; ++step) {
    state = mrvm1_update_active_set(std::move(state));
    if (state.converged) break;
  }
  return state;
}

Eigen::MatrixXd constructive_weights(const ConstructiveState& state) {
  if (state.active.empty()) return MatrixXd(0, state.targets.rows());
  const MatrixXd phi_a = select_cols(state.basis, state.active);
  MatrixXd system = phi_a.transpose() * phi_a;
  system.diagonal() += state.alpha;
  return factorize_spd(system).solve(phi_a.transpose() * state.targets.transpose());
}

// ---- training ------------------------------------------------------------

namespace {

bool relative_change_below(double previous, double current, double tolerance) {
  return std::abs(current - previous) <= tolerance * std::max(std::abs(previous), 1e-12);
}

MrvmModel train_pruning(const FeatureMatrix& features, const std::vector<int>& labels,
                        const MatrixXd& gram_all, const TrainConfig& config, int classes) {
  const Index n = gram_all.rows();
  std::vector<int> active(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) active[static_cast<std::size_t>(i)] = static_cast<int>(i);
  MatrixXd scales = MatrixXd::Constant(n, classes, config.initial_scale);
  MatrixXd expectations =
      estep_from_means(MatrixXd::Zero(classes, n), labels, config.quadrature_nodes);
  MatrixXd weights;
  TrainDiagnostics diagnostics;
  // Hyperprior mass of pruned rows, frozen at w = 0.
  double pruned_terms = 0.0;

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    MatrixXd gram_active = select_rows(gram_all, active);
    weights = mstep_weights(gram_active, expectations, scales);
    scales = mrvm2_update_scales(weights, config.gamma_a, config.gamma_b);

    const auto keep = mrvm2_surviving_rows(scales, config.prune_threshold);
    if (keep.size() < active.size()) {
      std::vector<bool> kept(active.size(), false);
      for (int r : keep) kept[static_cast<std::size_t>(r)] = true;
      for (std::size_t r = 0; r < active.size(); ++r) {
        if (kept[r]) continue;
        const auto a = scales.row(static_cast<Index>(r)).array();
        pruned_terms += ((config.gamma_a + 0.5) * a.log() - config.gamma_b * a).sum();
      }
      std::vector<int> next_active;
      for (int r : keep) next_active.push_back(active[static_cast<std::size_t>(r)]);
      active = std::move(next_active);
      weights = select_rows(weights, keep);
      scales = select_rows(scales, keep);
      gram_active = select_rows(gram_all, active);
    }

    const double objective =
        pruned_terms + mrvm2_objective(weights, gram_active, labels, scales, config.gamma_a,
                                       config.gamma_b, config.quadrature_nodes);
    diagnostics.objective_trace.push_back(objective);
    diagnostics.iterations = iteration;
    if (iteration > 1 &&
        relative_change_below(diagnostics.objective_trace[diagnostics.objective_trace.size() - 2],
                              objective, config.tolerance)) {
      diagnostics.converged = true;
      break;
    }
    expectations = estep_from_means(weights.transpose() * gram_active, labels,
                                    config.quadrature_nodes);
  }

  MrvmModel model;
  model.variant = MrvmVariant::kPruning;
  model.active_indices = active;
  model.active_inputs = select_rows(features, active);
  model.weights = weights;
  model.scales = scales;
  model.diagnostics = std::move(diagnostics);
  return model;
}

MrvmModel train_constructive(const FeatureMatrix& features, const std::vector<int>& labels,
                             const MatrixXd& gram_all, const TrainConfig& config, int classes) {
  const Index n = gram_all.rows();
  ConstructiveState state(
      gram_all, estep_from_means(MatrixXd::Zero(classes, n), labels, config.quadrature_nodes));
  TrainDiagnostics diagnostics;
  bool found_evidence = false;

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    const bool was_empty = state.active.empty();
    state = mrvm1_update_active_set(std::move(state));
    if (!(was_empty && state.converged)) found_evidence = true;
    // Membership unchanged; a re-estimate alone still counts as stable.
    const bool set_stable = state.last_action == ConstructiveAction::kNone ||
                            state.last_action == ConstructiveAction::kReestimate;

    const MatrixXd weights = constructive_weights(state);
    const MatrixXd gram_active = select_rows(gram_all, state.active);
    state.targets = estep_from_means(weights.transpose() * gram_active, labels,
                                     config.quadrature_nodes);
    state.objective =
        constructive_objective(state.basis, state.targets, state.active, state.alpha);
    diagnostics.objective_trace.push_back(state.objective);
    diagnostics.iterations = iteration;
    if (set_stable && iteration > 1 &&
        relative_change_below(diagnostics.objective_trace[diagnostics.objective_trace.size() - 2],
                              state.objective, config.tolerance)) {
      diagnostics.converged = true;
      break;
    }
  }
  diagnostics.degenerate = !found_evidence;

  MrvmModel model;
  model.variant = MrvmVariant::kConstructive;
  model.active_indices = state.active;
  model.active_inputs = select_rows(features, state.active);
  model.weights = constructive_weights(state);
  model.scales = state.alpha.replicate(1, classes);
  model.diagnostics = std::move(diagnostics);
  return model;
}

}  // namespace

MrvmModel train(const LabelledSet& data, const TrainConfig& config, const KernelSetup& setup) {
  config.validate();
  setup.kernel.validate();
  if (data.size() < 1) throw ContractError("train: no samples");
  if (static_cast<Index>(data.labels.size()) != data.size())
    throw ContractError("train: one label per row required");
  (void)zero_based(data.labels, data.class_count);
  if (data.distinct_labels() < 2 && !config.allow_single_class)
    throw DegenerateTraining("train: at least two classes are required");

  const FeatureMatrix standardized = setup.standardization.apply(data.features);
  const MatrixXd gram_all = gram(setup.kernel, standardized, standardized);
  MrvmModel model = config.variant == MrvmVariant::kConstructive
                        ? train_constructive(data.features, data.labels, gram_all, config,
                                             data.class_count)
                        : train_pruning(data.features, data.labels, gram_all, config,
                                        data.class_count);
  model.kernel = setup.kernel;
  model.standardization = setup.standardization;
  model.class_count = data.class_count;
  model.quadrature_nodes = config.quadrature_nodes;
  if (!model.weights.allFinite()) throw NumericalError("train: non-finite weights");
  return model;
}

MrvmModel train(const LabelledSet& data, const TrainConfig& config) {
  if (data.size() < 1) throw ContractError("train: no samples");
  return train(data, config, KernelSetup::median_heuristic(data.features));
}

// ---- prediction ----------------------------------------------------------

Eigen::VectorXd MrvmModel::score_means(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != active_inputs.cols()) throw ContractError("predict: dimension mismatch");
  const FeatureMatrix active = standardization.apply(active_inputs);
  const VectorXd point = standardization.apply(x);
  const MatrixXd k = gram(kernel, active, point.transpose());  // n* x 1
  return weights.transpose() * k.col(0);
}

Belief MrvmModel::predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const VectorXd probs =
      probit_class_probabilities(score_means(x), GaussHermiteRule::cached(quadrature_nodes));
  return Belief::normalized(probs);
}

HealthState MrvmModel::predict_label(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return predict_proba(x).argmax();
}

Eigen::MatrixXd MrvmModel::predict_proba_rows(const FeatureMatrix& x) const {
  if (x.cols() != active_inputs.cols()) throw ContractError("predict: dimension mismatch");
  const auto& rule = GaussHermiteRule::cached(quadrature_nodes);
  const MatrixXd means =
      weights.transpose() * gram(kernel, standardization.apply(active_inputs), standardization.apply(x));
  MatrixXd out(x.rows(), class_count);
  for (Index i = 0; i < x.rows(); ++i) {
    const VectorXd probs = probit_class_probabilities(means.col(i), rule);
    out.row(i) = (probs / probs.sum()).transpose();
  }
  return out;
}

nlohmann::json MrvmModel::to_json() const {
  return {{"variant", static_cast<int>(variant)},
          {"kernel", rbal::to_json(kernel)},
          {"standardization", rbal::to_json(standardization)},
          {"active_inputs", matrix_to_json(active_inputs)},
          {"active_indices", active_indices},
          {"weights", matrix_to_json(weights)},
          {"scales", matrix_to_json(scales)},
          {"class_count", class_count},
          {"quadrature_nodes", quadrature_nodes}};
}

MrvmModel MrvmModel::from_json(const nlohmann::json& doc) {
  try {
    MrvmModel model;
    model.variant = static_cast<MrvmVariant>(doc.at("variant").get<int>());
    model.kernel = kernel_from_json(doc.at("kernel"));
    model.standardization = standardizer_from_json(doc.at("standardization"));
    model.class_count = doc.at("class_count").get<int>();
    model.quadrature_nodes = doc.at("quadrature_nodes").get<int>();
    model.active_indices = doc.at("active_indices").get<std::vector<int>>();
    const auto dim = model.standardization.mean.size();
    model.active_inputs = matrix_from_json(doc.at("active_inputs"), dim);
    model.weights = matrix_from_json(doc.at("weights"), model.class_count);
    model.scales = matrix_from_json(doc.at("scales"), model.class_count);
    if (model.weights.rows() != model.active_inputs.rows() ||
        model.scales.rows() != model.active_inputs.rows())
      throw ParseError("model JSON: active set sizes disagree");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

}  // namespace rbal
