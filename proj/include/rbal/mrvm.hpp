#pragma once

// Sparse multiclass relevance vector machines with a multinomial probit
// link.  Scores f = W^T k(A, x) with unit-variance auxiliary noise; the
// class with the largest score wins.  Two ways of finding the relevant set A:
//
//   constructive (mRVM1): start from an empty set and add, re-estimate or
//     delete one basis per iteration using the decomposed marginal
//     likelihood (fast type-II maximum likelihood, one scale per sample);
//   pruning (mRVM2): start from every training sample, alternate EM weight
//     updates with per-(sample, class) scale updates, and drop samples whose
//     scales grow past a threshold in every class.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbal/decision.hpp"
#include "rbal/kernel.hpp"

namespace rbal {

enum class MrvmVariant { kConstructive = 1, kPruning = 2 };

struct TrainConfig {
  MrvmVariant variant = MrvmVariant::kPruning;
  int max_iterations = 200;
  double tolerance = 1e-4;  // relative objective change
  double gamma_a = 1e-6;
  double gamma_b = 1e-6;
  double prune_threshold = 1e5;
  // Starting scale for every (sample, class) in the pruning scheme.  Near 1
  // the first ridge step spreads the signal thinly over all samples and the
  // scale updates then drive every weight to zero together.
  double initial_scale = 1e-4;
  int quadrature_nodes = 64;
  std::uint64_t seed = 0;
  // Fit one-class data instead of refusing; absent classes stay at zero mean.
  bool allow_single_class = false;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& doc);

// Training inputs with 1-based labels.
struct LabelledSet {
  FeatureMatrix features;
  std::vector<int> labels;
  int class_count = 4;

  Eigen::Index size() const { return features.rows(); }
  int distinct_labels() const;
};

struct TrainDiagnostics {
  int iterations = 0;
  bool converged = false;
  // Constructive scheme found no basis with positive evidence.
  bool degenerate = false;
  std::vector<double> objective_trace;
};

struct MrvmModel {
  MrvmVariant variant = MrvmVariant::kPruning;
  KernelSpec kernel;
  Standardizer standardization;
  FeatureMatrix active_inputs;        // raw (unstandardized) relevant vectors
  std::vector<int> active_indices;    // rows of the training set
  Eigen::MatrixXd weights;            // n* x K
  Eigen::MatrixXd scales;             // n* x K
  int class_count = 0;
  int quadrature_nodes = 64;
  TrainDiagnostics diagnostics;

  Eigen::Index relevant_count() const { return active_inputs.rows(); }

  // Auxiliary score means W^T k(A, x) for one raw feature vector.
  Eigen::VectorXd score_means(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  Belief predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  HealthState predict_label(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // One belief per row, as an n x K matrix.
  Eigen::MatrixXd predict_proba_rows(const FeatureMatrix& x) const;

  nlohmann::json to_json() const;
  static MrvmModel from_json(const nlohmann::json& doc);
};

// Standardization fitted on the data and an rbf kernel whose width is the
// median pairwise distance of the standardized rows.
struct KernelSetup {
  KernelSpec kernel;
  Standardizer standardization;

  static KernelSetup median_heuristic(const FeatureMatrix& x);
};

// Throws DegenerateTraining when no data, or fewer than two classes are
// present and allow_single_class is off.
MrvmModel train(const LabelledSet& data, const TrainConfig& config,
                const KernelSetup& setup);
MrvmModel train(const LabelledSet& data, const TrainConfig& config);

// ---- building blocks, exposed for testing --------------------------------

// Posterior means of the auxiliary variables: one column per training
// point, means = W^T K_A (K x n), labels 1-based.
Eigen::MatrixXd estep_expectations(const Eigen::MatrixXd& weights,
                                   const Eigen::MatrixXd& gram_active_by_all,
                                   const std::vector<int>& labels,
                                   int quadrature_nodes);

// Same, from precomputed means (K x n).
Eigen::MatrixXd estep_from_means(const Eigen::MatrixXd& means,
                                 const std::vector<int>& labels,
                                 int quadrature_nodes);

// Per class k: (K_A K_A^T + diag(scales_.k)) w_k = K_A y_k^T.
// gram_active is n* x n, expectations K x n, scales n* x K.
Eigen::MatrixXd mstep_weights(const Eigen::MatrixXd& gram_active,
                              const Eigen::MatrixXd& expectations,
                              const Eigen::MatrixXd& scales);

// alpha_ik = (2a + 1) / (w_ik^2 + 2b).
Eigen::MatrixXd mrvm2_update_scales(const Eigen::MatrixXd& weights,
                                    double gamma_a, double gamma_b);

// Rows to keep: at least one class scale <= threshold.  Never empty: if
// every row would go, the row with the smallest scale survives.
std::vector<int> mrvm2_surviving_rows(const Eigen::MatrixXd& scales,
                                      double threshold);

// Penalized probit log-likelihood of the labels under W, with the scale
// hyperprior terms for the active rows.
double mrvm2_objective(const Eigen::MatrixXd& weights,
                       const Eigen::MatrixXd& gram_active_by_all,
                       const std::vector<int>& labels,
                       const Eigen::MatrixXd& scales, double gamma_a,
                       double gamma_b, int quadrature_nodes);

enum class ConstructiveAction { kNone, kAdd, kReestimate, kDelete };

// Working state of the constructive scheme at fixed targets.
struct ConstructiveState {
  Eigen::MatrixXd basis;    // n x n; column i is basis vector phi_i
  Eigen::MatrixXd targets;  // K x n auxiliary targets
  std::vector<int> active;  // indices into basis columns
  Eigen::VectorXd alpha;    // one scale per active entry
  double objective = 0.0;   // marginal log-likelihood at (alpha, targets)
  bool converged = false;
  ConstructiveAction last_action = ConstructiveAction::kNone;
  int last_index = -1;

  ConstructiveState(Eigen::MatrixXd basis_, Eigen::MatrixXd targets_);
};

// Marginal log-likelihood sum_k log N(y_k | 0, I + Phi_A diag(alpha)^-1 Phi_A^T).
double constructive_objective(const Eigen::MatrixXd& basis,
                              const Eigen::MatrixXd& targets,
                              const std::vector<int>& active,
                              const Eigen::VectorXd& alpha);

// One add / re-estimate / delete step: the action with the largest gain in
// the marginal likelihood.  Sets converged when no action improves it.
ConstructiveState mrvm1_update_active_set(ConstructiveState state);

// Repeats mrvm1_update_active_set until converged or max_steps.
ConstructiveState mrvm1_select_relevant(ConstructiveState state, int max_steps);

// Posterior weights of the active set at fixed targets (|A| x K).
Eigen::MatrixXd constructive_weights(const ConstructiveState& state);

}  // namespace rbal
