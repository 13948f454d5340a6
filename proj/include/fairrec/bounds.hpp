#ifndef FAIRREC_BOUNDS_HPP
#define FAIRREC_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/error.hpp"
#include "fairrec/expansion.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/spectral.hpp"

namespace fairrec {

// Lower bound on the smallest eigenvalue of M + alpha N for PSD M and a
// low-rank PSD perturbation N:
//
//   lambda_1(M + alpha N) >= lambda_1(M)
//       + max_i [ (a_i + D)/2 - sqrt(((a_i + D)/2)^2 - a_i D (v_i^T q_1)^2) ]
//
// with D = lambda_2(M) - lambda_1(M), q_1 the bottom eigenvector of M, and
// a_i = alpha lambda_i(N) over the nonzero eigenpairs (lambda_i(N), v_i).
struct Lemma1Input {
  Eigen::MatrixXd m;
  Eigen::MatrixXd n_mat;
  double alpha_scale = 0.0;
};

// Nonzero eigenvalues of N are those above kRankRelTol * lambda_max(N).
inline constexpr double kRankRelTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;

// The bracketed term, evaluated as c / (b + sqrt(b^2 - c)) to avoid
// cancellation. Radicands below zero by more than rounding signal a broken
// eigendecomposition (the radicand is a sum of nonnegative terms when
// proj_sq <= 1).
inline double perturbation_gain(double scaled_eigenvalue, double gap, double proj_sq) {
  const double b = 0.5 * (scaled_eigenvalue + gap);
  const double c = scaled_eigenvalue * gap * proj_sq;
  double radicand = b * b - c;
  if (radicand < -1e-12 * std::max(1.0, b * b)) {
    throw NumericFailure("perturbation bound: negative radicand " + std::to_string(radicand));
  }
  radicand = std::max(radicand, 0.0);
  const double denom = b + std::sqrt(radicand);
  return denom > 0.0 ? c / denom : 0.0;
}

inline double lemma1_bound(const Lemma1Input &inp) {
  detail::require(inp.m.rows() >= 2, "lemma1_bound needs matrices of dimension >= 2");
  detail::require(inp.n_mat.rows() == inp.m.rows(), "M and N must have the same dimension");
  detail::require(inp.alpha_scale >= 0.0, "alpha must be nonnegative");
  const Spectrum sm = eig_sym(inp.m);
  const Spectrum sn = eig_sym(inp.n_mat);
  detail::require(sm.eigenvalues(0) >= -kPsdTol, "M must be positive semidefinite");
  detail::require(sn.eigenvalues(0) >= -kPsdTol, "N must be positive semidefinite");

  const double lambda1 = sm.eigenvalues(0);
  const double gap = sm.eigenvalues(1) - sm.eigenvalues(0);
  const Eigen::VectorXd q1 = sm.eigenvectors.col(0);
  const double lambda_max_n = sn.eigenvalues(sn.size() - 1);
  if (lambda_max_n <= 0.0) return lambda1;
  const double threshold = kRankRelTol * lambda_max_n;

  double best = 0.0;
  bool any = false;
  for (int i = 0; i < sn.size(); ++i) {
    const double li = sn.eigenvalues(i);
    if (li <= threshold) continue;
    const double proj = sn.eigenvectors.col(i).dot(q1);
    const double gain = perturbation_gain(inp.alpha_scale * li, gap, proj * proj);
    best = any ? std::max(best, gain) : gain;
    any = true;
  }
  return lambda1 + (any ? best : 0.0);
}

inline double lemma1_bound(const Eigen::MatrixXd &m, const Eigen::MatrixXd &n_mat,
                           double alpha_scale) {
  return lemma1_bound(Lemma1Input{m, n_mat, alpha_scale});
}

// Weyl: lambda_1(M + alpha N) >= lambda_1(M) + alpha lambda_1(N).
inline double weyl_bound(const Eigen::MatrixXd &m, const Eigen::MatrixXd &n_mat,
                         double alpha_scale) {
  detail::require(n_mat.rows() == m.rows(), "M and N must have the same dimension");
  return eig_sym(m).eigenvalues(0) + alpha_scale * eig_sym(n_mat).eigenvalues(0);
}

// N = sum_i a_i a_i^T.
inline Eigen::MatrixXd attribute_gram(std::span<const Eigen::VectorXd> attributes, Eigen::Index n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const auto &a : attributes) {
    detail::require(a.size() == n, "attribute has wrong length");
    out.noalias() += a * a.transpose();
  }
  return out;
}

// Fairness term of the recovery bound: the perturbation gain with
// alpha = n applied to the Laplacian pair (Delta, Fiedler vector), maximized
// over the nonzero eigenpairs of N. Zero when there are no attributes or
// Delta = 0.
inline double epsilon1(const Graph &g, std::span<const Eigen::VectorXd> attributes) {
  detail::require_connected(g, "epsilon1");
  if (attributes.empty()) return 0.0;
  const int n = g.vertex_count();
  const Spectrum lap = laplacian_spectrum(g);
  const double gap = spectral_gap(lap);
  if (gap == 0.0) return 0.0;
  const FiedlerVector pi2 = fiedler_from_spectrum(lap);

  const Spectrum sn = eig_sym(attribute_gram(attributes, n));
  const double lambda_max_n = sn.eigenvalues(n - 1);
  if (lambda_max_n <= 0.0) return 0.0;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double li = sn.eigenvalues(i);
    if (li <= kRankRelTol * lambda_max_n) continue;
    const double proj = sn.eigenvectors.col(i).dot(pi2.vector);
    best = std::max(best, perturbation_gain(n * li, gap, proj * proj));
  }
  return best;
}

inline double epsilon1(const Graph &g, const std::vector<Eigen::VectorXd> &attributes) {
  return epsilon1(g, std::span<const Eigen::VectorXd>(attributes));
}

// Expansion term: (1 - 2p) phi^2 / (4 deg_max). Spectral-mode results
// contribute their lower endpoint.
inline double epsilon2(const Graph &g, double p, const CheegerResult &phi) {
  detail::require(p > 0.0 && p < 0.5, "epsilon2: p must lie in (0, 0.5)");
  const double value = phi.method == ExpansionMode::kExact ? phi.phi : phi.lower;
  return (1.0 - 2.0 * p) * value * value / (4.0 * g.max_degree());
}

struct BoundReport {
  int n = 0;
  int k = 0;
  int deg_max = 0;
  double delta = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double sigma_sq = 0.0;
  double r_const = 0.0;
  double exponent = 0.0;  // -3 eps^2 / (24 sigma^2 + 8 R eps), eps = eps1 + eps2
  double prob_lower_bound = 0.0;
  bool vacuous = false;   // prob_lower_bound <= 0; reported unclamped
  double phi_used = 0.0;
  ExpansionMode phi_mode = ExpansionMode::kExact;
};

// Probability lower bound 1 - 2n exp(-3 eps^2 / (24 sigma^2 + 8 R eps)) with
// eps = eps1 + eps2, sigma^2 = 4p(1-p) deg_max and R = 2(1-p). The Cheeger
// constant is enumerated exactly when the graph is small enough, otherwise
// its spectral lower bound is used.
inline BoundReport recovery_probability_bound(const Graph &g,
                                              std::span<const Eigen::VectorXd> attributes,
                                              double p,
                                              std::optional<CheegerResult> phi = std::nullopt) {
  detail::require(p > 0.0 && p < 0.5, "recovery bound: p must lie in (0, 0.5)");
  detail::require_connected(g, "recovery_probability_bound");
  if (!phi) {
    phi = edge_expansion(g, g.vertex_count() <= kMaxExactExpansionVertices
                                ? ExpansionMode::kExact
                                : ExpansionMode::kSpectral);
  }
  BoundReport out;
  out.n = g.vertex_count();
  out.k = static_cast<int>(attributes.size());
  out.deg_max = g.max_degree();
  out.delta = laplacian_gap_delta(g);
  out.eps1 = epsilon1(g, attributes);
  out.eps2 = epsilon2(g, p, *phi);
  out.phi_mode = phi->method;
  out.phi_used = phi->method == ExpansionMode::kExact ? phi->phi : phi->lower;
  out.sigma_sq = 4.0 * p * (1.0 - p) * out.deg_max;
  out.r_const = 2.0 * (1.0 - p);
  const double eps = out.eps1 + out.eps2;
  out.exponent = eps > 0.0 ? -3.0 * eps * eps / (24.0 * out.sigma_sq + 8.0 * out.r_const * eps) : 0.0;
  out.prob_lower_bound = 1.0 - 2.0 * out.n * std::exp(out.exponent);
  out.vacuous = out.prob_lower_bound <= 0.0;
  return out;
}

inline BoundReport recovery_probability_bound(const Graph &g,
                                              const std::vector<Eigen::VectorXd> &attributes,
                                              double p,
                                              std::optional<CheegerResult> phi = std::nullopt) {
  return recovery_probability_bound(g, std::span<const Eigen::VectorXd>(attributes), p,
                                    std::move(phi));
}

}  // namespace fairrec

#endif  // FAIRREC_BOUNDS_HPP
