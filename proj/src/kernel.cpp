#include "rbal/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbal/errors.hpp"

namespace rbal {

void KernelSpec::validate() const {
  if (kind == KernelKind::kRbf && !(width > 0.0 && std::isfinite(width)))
    throw ContractError("rbf kernel width must be positive");
  if (kind == KernelKind::kPolynomial && degree < 1)
    throw ContractError("polynomial kernel degree must be >= 1");
}

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kRbf: return "rbf";
    case KernelKind::kLinear: return "linear";
    case KernelKind::kPolynomial: return "polynomial";
  }
  return "rbf";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "linear") return KernelKind::kLinear;
  if (name == "polynomial") return KernelKind::kPolynomial;
  throw ConfigError("unknown kernel kind: " + name);
}

nlohmann::json to_json(const KernelSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"width", spec.width},
          {"degree", spec.degree},
          {"offset", spec.offset}};
}

KernelSpec kernel_from_json(const nlohmann::json& doc) {
  KernelSpec spec;
  spec.kind = kernel_kind_from_string(doc.value("kind", std::string("rbf")));
  if (doc.contains("width") && doc["width"].is_number())
    spec.width = doc["width"].get<double>();
  spec.degree = doc.value("degree", spec.degree);
  spec.offset = doc.value("offset", spec.offset);
  return spec;
}

double kernel_eval(const KernelSpec& spec,
                   const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw ContractError("kernel_eval: dimension mismatch");
  switch (spec.kind) {
    case KernelKind::kRbf:
      return std::exp(-(a - b).squaredNorm() / (2.0 * spec.width * spec.width));
    case KernelKind::kLinear:
      return a.dot(b);
    case KernelKind::kPolynomial:
      return std::pow(a.dot(b) + spec.offset, spec.degree);
  }
  return 0.0;
}

Eigen::MatrixXd gram(const KernelSpec& spec, const FeatureMatrix& rows,
                     const FeatureMatrix& cols) {
  if (rows.cols() != cols.cols()) throw ContractError("gram: dimension mismatch");
  spec.validate();
  const Eigen::MatrixXd inner = rows * cols.transpose();
  switch (spec.kind) {
    case KernelKind::kLinear:
      return inner;
    case KernelKind::kPolynomial:
      return (inner.array() + spec.offset).pow(spec.degree).matrix();
    case KernelKind::kRbf: {
      const Eigen::VectorXd rn = rows.rowwise().squaredNorm();
      const Eigen::RowVectorXd cn = cols.rowwise().squaredNorm().transpose();
      Eigen::MatrixXd sq = (-2.0 * inner).colwise() + rn;
      sq.rowwise() += cn;
      const double scale = -1.0 / (2.0 * spec.width * spec.width);
      // Clamp tiny negative distances produced by cancellation.
      return (sq.array().max(0.0) * scale).exp().matrix();
    }
  }
  return inner;
}

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  if (x.rows() == 0) throw ContractError("Standardizer::fit: no rows");
  Standardizer s;
  s.mean = x.colwise().mean();
  s.scale = Eigen::RowVectorXd::Ones(x.cols());
  if (x.rows() > 1) {
    const Eigen::MatrixXd centered = x.rowwise() - s.mean;
    const Eigen::RowVectorXd var =
        centered.colwise().squaredNorm() / static_cast<double>(x.rows() - 1);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (var[j] > 0.0) s.scale[j] = std::sqrt(var[j]);
    }
  }
  return s;
}

Standardizer Standardizer::identity(int dim) {
  return {Eigen::RowVectorXd::Zero(dim), Eigen::RowVectorXd::Ones(dim)};
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
  if (x.cols() != mean.size()) throw ContractError("Standardizer: dimension mismatch");
  return ((x.rowwise() - mean).array().rowwise() / scale.array()).matrix();
}

Eigen::VectorXd Standardizer::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != mean.size()) throw ContractError("Standardizer: dimension mismatch");
  return ((x - mean.transpose()).array() / scale.transpose().array()).matrix();
}

nlohmann::json to_json(const Standardizer& s) {
  return {{"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
          {"scale", std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size())}};
}

Standardizer standardizer_from_json(const nlohmann::json& doc) {
  const auto mean = doc.at("mean").get<std::vector<double>>();
  const auto scale = doc.at("scale").get<std::vector<double>>();
  if (mean.size() != scale.size()) throw ParseError("standardizer: length mismatch");
  Standardizer s;
  s.mean = Eigen::Map<const Eigen::RowVectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  s.scale = Eigen::Map<const Eigen::RowVectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  return s;
}

double median_pairwise_distance(const FeatureMatrix& x) {
  std::vector<double> distances;
  const Eigen::Index n = x.rows();
  distances.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      distances.push_back((x.row(i) - x.row(j)).norm());
  if (distances.empty()) return 1.0;
  const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  double median = *mid;
  if (distances.size() % 2 == 0) {
    const double lower = *std::max_element(distances.begin(), mid);
    median = 0.5 * (median + lower);
  }
  return median > 0.0 ? median : 1.0;
}

}  // namespace rbal
