#pragma once

// Generative baseline: one Gaussian per class with a conjugate
// normal-inverse-Wishart prior, and Dirichlet-smoothed class frequencies.
// Predictions integrate out the class parameters, giving a multivariate
// Student-t predictive density per class.

#include <Eigen/Dense>

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbal/decision.hpp"
#include "rbal/mrvm.hpp"

namespace rbal {

struct GmmPrior {
  Eigen::VectorXd mean;
  double scale_count = 1.0;
  double dof = 0.0;
  Eigen::MatrixXd scatter;
  double concentration = 1.0;  // symmetric Dirichlet over classes

  // Mean = grand mean of the data, scale count 1, dof D + 2, scatter =
  // identity times the pooled within-class variance, concentration 1.
  static GmmPrior weakly_informative(const LabelledSet& initial);

  void validate() const;
};

struct NiwPosterior {
  Eigen::VectorXd mean;
  double scale_count = 0.0;
  double dof = 0.0;
  Eigen::MatrixXd scatter;
  int count = 0;
};

struct StudentT {
  Eigen::VectorXd location;
  Eigen::MatrixXd shape;
  double dof = 0.0;

  double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd covariance() const;  // requires dof > 2
};

struct GmmModel {
  GmmPrior prior;
  std::vector<NiwPosterior> classes;

  int class_count() const { return static_cast<int>(classes.size()); }
  StudentT predictive(int class_index) const;  // 0-based
  Eigen::VectorXd class_prior() const;

  Belief predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd predict_proba_rows(const FeatureMatrix& x) const;

  nlohmann::json to_json() const;
  static GmmModel from_json(const nlohmann::json& doc);
};

// Conjugate update per class; classes without data keep the prior.
GmmModel gmm_fit(const LabelledSet& data, const GmmPrior& prior);

}  // namespace rbal
