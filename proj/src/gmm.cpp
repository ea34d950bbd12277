#include "rbal/gmm.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "rbal/errors.hpp"

namespace rbal {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<double> flatten(const MatrixXd& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

MatrixXd unflatten(const std::vector<double>& values, Index rows, Index cols) {
  if (static_cast<Index>(values.size()) != rows * cols)
    throw ParseError("gmm JSON: matrix has the wrong size");
  return Eigen::Map<const MatrixXd>(values.data(), rows, cols);
}

nlohmann::json niw_to_json(const VectorXd& mean, double scale_count, double dof,
                           const MatrixXd& scatter) {
  return {{"mean", flatten(mean)},
          {"scale_count", scale_count},
          {"dof", dof},
          {"scatter", flatten(scatter)}};
}

}  // namespace

GmmPrior GmmPrior::weakly_informative(const LabelledSet& initial) {
  if (initial.size() < 1) throw ContractError("gmm prior: no initial data");
  const Index dim = initial.features.cols();
  GmmPrior prior;
  prior.mean = initial.features.colwise().mean().transpose();
  prior.dof = static_cast<double>(dim) + 2.0;

  // Pooled within-class variance, averaged over dimensions.
  double sum_sq = 0.0;
  int classes_seen = 0;
  for (int k = 1; k <= initial.class_count; ++k) {
    std::vector<Index> rows;
    for (Index i = 0; i < initial.size(); ++i)
      if (initial.labels[static_cast<std::size_t>(i)] == k) rows.push_back(i);
    if (rows.empty()) continue;
    ++classes_seen;
    VectorXd centre = VectorXd::Zero(dim);
    for (Index i : rows) centre += initial.features.row(i).transpose();
    centre /= static_cast<double>(rows.size());
    for (Index i : rows) sum_sq += (initial.features.row(i).transpose() - centre).squaredNorm();
  }
  const double freedom = static_cast<double>(initial.size() - classes_seen) * static_cast<double>(dim);
  double pooled = freedom > 0.0 ? sum_sq / freedom : 0.0;
  if (!(pooled > 0.0)) pooled = 1.0;
  prior.scatter = MatrixXd::Identity(dim, dim) * pooled;
  return prior;
}

void GmmPrior::validate() const {
  const Index dim = mean.size();
  if (dim == 0) throw ConfigError("gmm prior: empty mean");
  if (scatter.rows() != dim || scatter.cols() != dim)
    throw ConfigError("gmm prior: scatter must be D x D");
  if (!(scale_count > 0.0)) throw ConfigError("gmm prior: scale_count must be > 0");
  if (!(dof > static_cast<double>(dim) - 1.0)) throw ConfigError("gmm prior: dof must exceed D - 1");
  if (!(concentration > 0.0)) throw ConfigError("gmm prior: concentration must be > 0");
  if (Eigen::LLT<MatrixXd>(scatter).info() != Eigen::Success)
    throw ConfigError("gmm prior: scatter must be positive definite");
}

double StudentT::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double dim = static_cast<double>(location.size());
  const Eigen::LLT<MatrixXd> llt(shape);
  const VectorXd diff = x - location;
  const double mahalanobis = llt.matrixL().solve(diff).squaredNorm();
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return std::lgamma(0.5 * (dof + dim)) - std::lgamma(0.5 * dof) -
         0.5 * dim * std::log(dof * std::numbers::pi) - 0.5 * log_det -
         0.5 * (dof + dim) * std::log1p(mahalanobis / dof);
}

Eigen::MatrixXd StudentT::covariance() const {
  if (!(dof > 2.0)) throw ContractError("Student-t covariance needs dof > 2");
  return shape * (dof / (dof - 2.0));
}

GmmModel gmm_fit(const LabelledSet& data, const GmmPrior& prior) {
  prior.validate();
  const Index dim = prior.mean.size();
  if (data.size() > 0 && data.features.cols() != dim)
    throw ContractError("gmm_fit: feature dimension differs from the prior");
  if (static_cast<Index>(data.labels.size()) != data.size())
    throw ContractError("gmm_fit: one label per row required");

  GmmModel model;
  model.prior = prior;
  model.classes.resize(static_cast<std::size_t>(data.class_count));
  for (int k = 0; k < data.class_count; ++k) {
    VectorXd sum = VectorXd::Zero(dim);
    int count = 0;
    for (Index i = 0; i < data.size(); ++i) {
      const int label = data.labels[static_cast<std::size_t>(i)];
      if (label < 1 || label > data.class_count) throw ContractError("gmm_fit: label outside 1..K");
      if (label - 1 != k) continue;
      sum += data.features.row(i).transpose();
      ++count;
    }
    auto& post = model.classes[static_cast<std::size_t>(k)];
    post.count = count;
    post.scale_count = prior.scale_count + count;
    post.dof = prior.dof + count;
    if (count == 0) {
      post.mean = prior.mean;
      post.scatter = prior.scatter;
      continue;
    }
    const VectorXd sample_mean = sum / count;
    MatrixXd within = MatrixXd::Zero(dim, dim);
    for (Index i = 0; i < data.size(); ++i) {
      if (data.labels[static_cast<std::size_t>(i)] - 1 != k) continue;
      const VectorXd d = data.features.row(i).transpose() - sample_mean;
      within.noalias() += d * d.transpose();
    }
    const VectorXd shift = sample_mean - prior.mean;
    post.mean = (prior.scale_count * prior.mean + count * sample_mean) / post.scale_count;
    post.scatter = prior.scatter + within +
                   (prior.scale_count * count / post.scale_count) * shift * shift.transpose();
  }
  return model;
}

StudentT GmmModel::predictive(int class_index) const {
  const auto& post = classes.at(static_cast<std::size_t>(class_index));
  const double dim = static_cast<double>(post.mean.size());
  StudentT t;
  t.location = post.mean;
  t.dof = post.dof - dim + 1.0;
  t.shape = post.scatter * ((post.scale_count + 1.0) / (post.scale_count * t.dof));
  return t;
}

Eigen::VectorXd GmmModel::class_prior() const {
  VectorXd weights(class_count());
  double total = 0.0;
  for (int k = 0; k < class_count(); ++k) {
    weights[k] = classes[static_cast<std::size_t>(k)].count + prior.concentration;
    total += weights[k];
  }
  return weights / total;
}

Belief GmmModel::predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != prior.mean.size()) throw ContractError("gmm predict: dimension mismatch");
  const VectorXd log_prior = class_prior().array().log();
  VectorXd log_joint(class_count());
  for (int k = 0; k < class_count(); ++k)
    log_joint[k] = log_prior[k] + predictive(k).log_density(x);
  const double peak = log_joint.maxCoeff();
  VectorXd probs = (log_joint.array() - peak).exp();
  probs /= probs.sum();
  return Belief(std::move(probs));
}

Eigen::MatrixXd GmmModel::predict_proba_rows(const FeatureMatrix& x) const {
  if (x.cols() != prior.mean.size()) throw ContractError("gmm predict: dimension mismatch");
  const VectorXd log_prior = class_prior().array().log();
  MatrixXd log_joint(x.rows(), class_count());
  for (int k = 0; k < class_count(); ++k) {
    const StudentT t = predictive(k);
    const Eigen::LLT<MatrixXd> llt(t.shape);
    const MatrixXd l = llt.matrixL();
    const double dim = static_cast<double>(t.location.size());
    const double constant = std::lgamma(0.5 * (t.dof + dim)) - std::lgamma(0.5 * t.dof) -
                            0.5 * dim * std::log(t.dof * std::numbers::pi) -
                            l.diagonal().array().log().sum() + log_prior[k];
    const MatrixXd centred = (x.rowwise() - t.location.transpose()).transpose();
    const VectorXd mahalanobis =
        llt.matrixL().solve(centred).colwise().squaredNorm().transpose();
    log_joint.col(k) =
        (constant - 0.5 * (t.dof + dim) * (mahalanobis.array() / t.dof).log1p()).matrix();
  }
  MatrixXd out(x.rows(), class_count());
  for (Index i = 0; i < x.rows(); ++i) {
    const double peak = log_joint.row(i).maxCoeff();
    const Eigen::RowVectorXd p = (log_joint.row(i).array() - peak).exp();
    out.row(i) = p / p.sum();
  }
  return out;
}

nlohmann::json GmmModel::to_json() const {
  nlohmann::json posts = nlohmann::json::array();
  for (const auto& post : classes) {
    auto entry = niw_to_json(post.mean, post.scale_count, post.dof, post.scatter);
    entry["count"] = post.count;
    posts.push_back(std::move(entry));
  }
  auto prior_doc = niw_to_json(prior.mean, prior.scale_count, prior.dof, prior.scatter);
  prior_doc["concentration"] = prior.concentration;
  return {{"prior", prior_doc}, {"classes", posts}};
}

GmmModel GmmModel::from_json(const nlohmann::json& doc) {
  try {
    GmmModel model;
    const auto& p = doc.at("prior");
    const auto mean = p.at("mean").get<std::vector<double>>();
    const auto dim = static_cast<Index>(mean.size());
    model.prior.mean = unflatten(mean, dim, 1);
    model.prior.scale_count = p.at("scale_count").get<double>();
    model.prior.dof = p.at("dof").get<double>();
    model.prior.scatter = unflatten(p.at("scatter").get<std::vector<double>>(), dim, dim);
    model.prior.concentration = p.at("concentration").get<double>();
    for (const auto& c : doc.at("classes")) {
      NiwPosterior post;
      post.mean = unflatten(c.at("mean").get<std::vector<double>>(), dim, 1);
      post.scale_count = c.at("scale_count").get<double>();
      post.dof = c.at("dof").get<double>();
      post.scatter = unflatten(c.at("scatter").get<std::vector<double>>(), dim, dim);
      post.count = c.at("count").get<int>();
      model.classes.push_back(std::move(post));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("gmm JSON: ") + e.what());
  }
}

}  // namespace rbal
