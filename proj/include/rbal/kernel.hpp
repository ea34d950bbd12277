#pragma once

#include <Eigen/Dense>

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace rbal {

// One feature vector per row.
using FeatureMatrix = Eigen::MatrixXd;

enum class KernelKind { kRbf, kLinear, kPolynomial };

struct KernelSpec {
  KernelKind kind = KernelKind::kRbf;
  double width = 1.0;  // rbf length-scale
  int degree = 2;      // polynomial
  double offset = 1.0; // polynomial

  static KernelSpec rbf(double width) { return {KernelKind::kRbf, width, 2, 1.0}; }
  static KernelSpec linear() { return {KernelKind::kLinear, 1.0, 2, 1.0}; }
  static KernelSpec polynomial(int degree, double offset) {
    return {KernelKind::kPolynomial, 1.0, degree, offset};
  }

  // Throws ContractError on width <= 0 or degree < 1.
  void validate() const;
};

const char* to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

nlohmann::json to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const nlohmann::json& doc);

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b);

// Entry (i, j) = k(rows_i, cols_j).
Eigen::MatrixXd gram(const KernelSpec& spec, const FeatureMatrix& rows,
                     const FeatureMatrix& cols);

// Per-dimension z-score transform.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  // Dimensions with zero spread (or a single sample) get scale 1.
  static Standardizer fit(const FeatureMatrix& x);
  static Standardizer identity(int dim);

  FeatureMatrix apply(const FeatureMatrix& x) const;
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

nlohmann::json to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& doc);

// Median pairwise Euclidean distance between rows.  Falls back to 1 when
// fewer than two rows or all rows coincide.
double median_pairwise_distance(const FeatureMatrix& x);

}  // namespace rbal
