#pragma once

// Multinomial probit numerics shared by mRVM training and prediction.
//
// With auxiliary scores f ~ N(m, I) and the rule "class k wins iff f_k is
// the maximum", every quantity reduces to a one-dimensional expectation
// over the winning class's noise u ~ N(0, 1):
//
//   P(k | m)   = E_u[ prod_{j != k} Phi(u + m_k - m_j) ]
//   E[f_c | k] = m_c - E_u[ phi(u + m_k - m_c) prod_{j != k,c} Phi(u + m_k - m_j) ] / P(k | m)
//
// Both are evaluated with Gauss-Hermite quadrature in the log domain so that
// extreme margins saturate instead of producing 0/0.

#include <Eigen/Dense>

#include <vector>

namespace rbal {

// Nodes and weights for E_{u ~ N(0,1)}[g(u)] ~= sum_i weight_i g(node_i).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;

  // Golub-Welsch on the probabilists' Hermite recurrence.
  static GaussHermiteRule make(int node_count);

  // Cached per node count; safe to call concurrently.
  static const GaussHermiteRule& cached(int node_count);

  int size() const { return static_cast<int>(nodes.size()); }
};

// log Phi(x), accurate far into the lower tail.
double log_normal_cdf(double x);

// log phi(x).
double log_normal_pdf(double x);

// log(sum exp(values)).
double log_sum_exp(const std::vector<double>& values);

// Class probabilities for a single column of means m (length K), not
// renormalized.
Eigen::VectorXd probit_class_probabilities(const Eigen::Ref<const Eigen::VectorXd>& m,
                                           const GaussHermiteRule& rule);

// log P(label | m).
double probit_log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& m, int label,
                             const GaussHermiteRule& rule);

// Posterior mean of f ~ N(m, I) truncated to f_label > f_j for all j.
// label is 0-based.  The winning coordinate uses the identity
// E[f_i] = m_i + sum_{c != i} (m_c - E[f_c]).
Eigen::VectorXd truncated_probit_mean(const Eigen::Ref<const Eigen::VectorXd>& m, int label,
                                      const GaussHermiteRule& rule);

}  // namespace rbal
