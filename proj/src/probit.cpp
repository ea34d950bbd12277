#include "rbal/probit.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "rbal/errors.hpp"

namespace rbal {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

}  // namespace

GaussHermiteRule GaussHermiteRule::make(int node_count) {
  if (node_count < 1) throw ContractError("Gauss-Hermite rule needs >= 1 node");
  // Jacobi matrix of the monic probabilists' Hermite polynomials:
  // off-diagonal sqrt(i), zero diagonal; weight = first eigenvector
  // component squared (total mass 1).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(node_count, node_count);
  for (int i = 1; i < node_count; ++i) {
    jacobi(i, i - 1) = std::sqrt(static_cast<double>(i));
    jacobi(i - 1, i) = jacobi(i, i - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(node_count));
  rule.log_weights.resize(static_cast<std::size_t>(node_count));
  for (int i = 0; i < node_count; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    const double v = solver.eigenvectors()(0, i);
    rule.log_weights[static_cast<std::size_t>(i)] = std::log(v * v);
  }
  return rule;
}

const GaussHermiteRule& GaussHermiteRule::cached(int node_count) {
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> rules;
  std::lock_guard lock(mutex);
  auto it = rules.find(node_count);
  if (it == rules.end()) it = rules.emplace(node_count, make(node_count)).first;
  return it->second;
}

double log_normal_cdf(double x) {
  if (x > -37.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  // erfc underflows below here; Mills-ratio asymptotic series.
  const double inv2 = 1.0 / (x * x);
  const double series = 1.0 - inv2 + 3.0 * inv2 * inv2 - 15.0 * inv2 * inv2 * inv2;
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double log_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double log_sum_exp(const std::vector<double>& values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double total = 0.0;
  for (double v : values) total += std::exp(v - peak);
  return peak + std::log(total);
}

Eigen::VectorXd probit_class_probabilities(const Eigen::Ref<const Eigen::VectorXd>& m,
                                           const GaussHermiteRule& rule) {
  const auto classes = m.size();
  Eigen::VectorXd probs(classes);
  std::vector<double> terms(static_cast<std::size_t>(rule.size()));
  for (Eigen::Index k = 0; k < classes; ++k) {
    for (int q = 0; q < rule.size(); ++q) {
      const double u = rule.nodes[static_cast<std::size_t>(q)];
      double log_term = rule.log_weights[static_cast<std::size_t>(q)];
      for (Eigen::Index j = 0; j < classes; ++j) {
        if (j != k) log_term += log_normal_cdf(u + m[k] - m[j]);
      }
      terms[static_cast<std::size_t>(q)] = log_term;
    }
    probs[k] = std::exp(log_sum_exp(terms));
  }
  return probs;
}

double probit_log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& m, int label,
                             const GaussHermiteRule& rule) {
  std::vector<double> terms(static_cast<std::size_t>(rule.size()));
  for (int q = 0; q < rule.size(); ++q) {
    const double u = rule.nodes[static_cast<std::size_t>(q)];
    double log_term = rule.log_weights[static_cast<std::size_t>(q)];
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      if (j != label) log_term += log_normal_cdf(u + m[label] - m[j]);
    }
    terms[static_cast<std::size_t>(q)] = log_term;
  }
  return log_sum_exp(terms);
}

Eigen::VectorXd truncated_probit_mean(const Eigen::Ref<const Eigen::VectorXd>& m, int label,
                                      const GaussHermiteRule& rule) {
  const auto classes = m.size();
  if (label < 0 || label >= classes) throw ContractError("probit label out of range");
  const auto nodes = static_cast<std::size_t>(rule.size());
  // log Phi(u + m_label - m_j) per node and class, reused by every ratio.
  Eigen::MatrixXd log_cdf(static_cast<Eigen::Index>(nodes), classes);
  std::vector<double> denominator(nodes);
  for (std::size_t q = 0; q < nodes; ++q) {
    const double u = rule.nodes[q];
    double log_term = rule.log_weights[q];
    for (Eigen::Index j = 0; j < classes; ++j) {
      const double v = j == label ? 0.0 : log_normal_cdf(u + m[label] - m[j]);
      log_cdf(static_cast<Eigen::Index>(q), j) = v;
      log_term += v;
    }
    denominator[q] = log_term;
  }
  const double log_z = log_sum_exp(denominator);

  Eigen::VectorXd mean = m;
  std::vector<double> numerator(nodes);
  double shift = 0.0;
  for (Eigen::Index c = 0; c < classes; ++c) {
    if (c == label) continue;
    for (std::size_t q = 0; q < nodes; ++q) {
      const double u = rule.nodes[q];
      // Replace Phi for class c by phi in the product.
      numerator[q] = denominator[q] - log_cdf(static_cast<Eigen::Index>(q), c) +
                     log_normal_pdf(u + m[label] - m[c]);
    }
    const double ratio = std::exp(log_sum_exp(numerator) - log_z);
    mean[c] = m[c] - ratio;
    shift += ratio;
  }
  mean[label] = m[label] + shift;
  return mean;
}

}  // namespace rbal
