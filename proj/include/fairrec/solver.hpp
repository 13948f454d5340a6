#ifndef FAIRREC_SOLVER_HPP
#define FAIRREC_SOLVER_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/error.hpp"
#include "fairrec/model.hpp"
#include "fairrec/spectral.hpp"

namespace fairrec {

// ADMM settings for the SDP relaxation
//
//   maximize <X, Y>  s.t.  Y_ii = 1,  a_i^T Y a_i = 0,  Y PSD.
//
// Residuals are absolute Frobenius norms: primal ||Y - Z||_F and dual
// penalty * ||Z - Z_prev||_F, where Y is the affine iterate and Z the PSD
// iterate.
struct SdpConfig {
  double primal_tol = 1e-6;
  double dual_tol = 1e-6;
  int max_iters = 20000;
  double penalty = 1.0;
  // Residual balancing: rescale the penalty by kPenaltyFactor whenever one
  // residual exceeds kBalanceRatio times the other (checked every
  // kBalanceEvery iterations). Balancing stops after kBalanceUntil
  // iterations; left running it can cycle between two penalties forever.
  bool adaptive_penalty = true;
  // Over-relaxation weight in [1, 2); 1 is plain ADMM.
  double relaxation = 1.0;

  static constexpr double kBalanceRatio = 10.0;
  static constexpr double kPenaltyFactor = 2.0;
  static constexpr int kBalanceEvery = 10;
  static constexpr int kBalanceUntil = 1000;
};

inline void validate(const SdpConfig &cfg) {
  detail::require(cfg.primal_tol > 0 && cfg.dual_tol > 0, "SDP tolerances must be positive");
  detail::require(cfg.max_iters >= 1, "max_iters must be at least 1");
  detail::require(cfg.penalty > 0, "ADMM penalty must be positive");
  detail::require(cfg.relaxation >= 1.0 && cfg.relaxation < 2.0,
                  "ADMM relaxation must lie in [1, 2)");
}

enum class SdpStatus { kConverged, kIterationCap };

inline const char *to_string(SdpStatus s) {
  return s == SdpStatus::kConverged ? "converged" : "iteration-cap";
}

// The returned matrix is the affine iterate: its diagonal is exactly one
// and Y a_i = 0 up to rounding. Its distance to the PSD cone is bounded by
// primal_residual.
struct SdpSolution {
  Eigen::MatrixXd y_matrix;
  double objective = 0.0;
  SdpStatus status = SdpStatus::kIterationCap;
  int iterations = 0;
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  double final_penalty = 0.0;
  int attributes_used = 0;
  std::vector<std::string> warnings;

  bool converged() const { return status == SdpStatus::kConverged; }
};

namespace detail {

inline void require_observation_matrix(const Eigen::MatrixXd &x) {
  require_symmetric(x);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    require(x(i, i) == 0.0, "observation matrix must have a zero diagonal");
}

// Orthonormal basis of span{a_i}; attributes that are (numerically) in the
// span of earlier ones are dropped and reported.
inline Eigen::MatrixXd orthonormal_attribute_basis(std::span<const Eigen::VectorXd> attributes,
                                                   Eigen::Index n,
                                                   std::vector<std::string> &warnings) {
  Eigen::MatrixXd basis(n, 0);
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    const Eigen::VectorXd &a = attributes[i];
    require(a.size() == n, "attribute " + std::to_string(i) + " has wrong length");
    require(a.allFinite(), "attribute " + std::to_string(i) + " is not finite");
    const double norm = a.norm();
    Eigen::VectorXd r = a;
    for (int pass = 0; pass < 2; ++pass) r -= basis * (basis.transpose() * r);
    if (norm == 0.0 || r.norm() <= 1e-10 * norm) {
      warnings.push_back("attribute " + std::to_string(i) +
                         " is linearly dependent on earlier attributes; dropped");
      continue;
    }
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = r.normalized();
  }
  return basis;
}

// Exact Euclidean projection onto {Y : Y = P Y P, diag(Y) = 1}, where P
// projects onto the orthogonal complement of the attributes:
//   Y = P (W + Diag(mu)) P,   (P o P) mu = 1 - diag(P W P).
class AffineProjector {
 public:
  AffineProjector(const Eigen::MatrixXd &basis, Eigen::Index n) : n_(n) {
    constrained_ = basis.cols() > 0;
    if (!constrained_) return;
    p_ = Eigen::MatrixXd::Identity(n, n) - basis * basis.transpose();
    hadamard_.compute(p_.cwiseProduct(p_));
  }

  Eigen::MatrixXd operator()(const Eigen::MatrixXd &w) const {
    if (!constrained_) {
      Eigen::MatrixXd y = 0.5 * (w + w.transpose());
      y.diagonal().setOnes();
      return y;
    }
    Eigen::MatrixXd pwp = p_ * (0.5 * (w + w.transpose())) * p_;
    const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n_) - pwp.diagonal();
    const Eigen::VectorXd mu = hadamard_.solve(rhs);
    pwp.noalias() += p_ * mu.asDiagonal() * p_;
    return 0.5 * (pwp + pwp.transpose());
  }

 private:
  Eigen::Index n_;
  bool constrained_ = false;
  Eigen::MatrixXd p_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> hadamard_;
};

inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd &m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw NumericFailure("PSD projection: eigensolver failed");
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

// Solves the SDP relaxation with scaled-form, over-relaxed ADMM:
//   Y  <- Proj_affine(Z - U + X / rho)
//   Y' <- w Y + (1 - w) Z
//   Z  <- Proj_psd(Y' + U)
//   U  <- U + Y' - Z
// Stops when both residuals are within tolerance, otherwise returns the
// best iterate seen with status kIterationCap.
inline SdpSolution solve_sdp(const Eigen::MatrixXd &x, std::span<const Eigen::VectorXd> attributes,
                             const SdpConfig &cfg = {}) {
  validate(cfg);
  detail::require_observation_matrix(x);
  const Eigen::Index n = x.rows();
  detail::require(n >= 1, "observation matrix is empty");

  SdpSolution best;
  const Eigen::MatrixXd basis = detail::orthonormal_attribute_basis(attributes, n, best.warnings);
  best.attributes_used = static_cast<int>(basis.cols());
  const detail::AffineProjector project_affine(basis, n);

  double rho = cfg.penalty;
  Eigen::MatrixXd z = project_affine(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd y;
  double best_score = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    y = project_affine(z - u + x / rho);
    const Eigen::MatrixXd z_prev = z;
    const Eigen::MatrixXd y_relaxed = cfg.relaxation * y + (1.0 - cfg.relaxation) * z_prev;
    z = detail::project_psd(y_relaxed + u);
    u += y_relaxed - z;
    if (!y.allFinite() || !z.allFinite() || !u.allFinite()) {
      throw NumericFailure("solve_sdp: non-finite iterate at iteration " + std::to_string(iter));
    }

    const double r_primal = (y - z).norm();
    const double r_dual = rho * (z - z_prev).norm();
    const double score = std::max(r_primal / cfg.primal_tol, r_dual / cfg.dual_tol);
    if (score < best_score) {
      best_score = score;
      best.y_matrix = y;
      best.iterations = iter;
      best.primal_residual = r_primal;
      best.dual_residual = r_dual;
      best.final_penalty = rho;
    }
    if (r_primal <= cfg.primal_tol && r_dual <= cfg.dual_tol) {
      best.status = SdpStatus::kConverged;
      break;
    }

    if (cfg.adaptive_penalty && iter <= SdpConfig::kBalanceUntil && iter % SdpConfig::kBalanceEvery == 0) {
      if (r_primal > SdpConfig::kBalanceRatio * r_dual) {
        rho *= SdpConfig::kPenaltyFactor;
        u /= SdpConfig::kPenaltyFactor;
      } else if (r_dual > SdpConfig::kBalanceRatio * r_primal) {
        rho /= SdpConfig::kPenaltyFactor;
        u *= SdpConfig::kPenaltyFactor;
      }
    }
  }
  if (best.status != SdpStatus::kConverged) best.iterations = cfg.max_iters;
  best.objective = (x.array() * best.y_matrix.array()).sum();
  return best;
}

inline SdpSolution solve_sdp(const Eigen::MatrixXd &x, const std::vector<Eigen::VectorXd> &attributes,
                             const SdpConfig &cfg = {}) {
  return solve_sdp(x, std::span<const Eigen::VectorXd>(attributes), cfg);
}

// Sign rounding of the top eigenvector of Y followed by a majority vote
// against the node observations: the vector is negated iff c^T y < 0.
inline Labels round_solution(const Eigen::MatrixXd &y_matrix, const Labels &c) {
  detail::require(y_matrix.rows() == y_matrix.cols(), "Y must be square");
  detail::require(c.size() == y_matrix.rows(), "node observations have wrong length");
  const Eigen::Index n = y_matrix.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (y_matrix + y_matrix.transpose()));
  if (es.info() != Eigen::Success) throw NumericFailure("round_solution: eigensolver failed");
  const Eigen::VectorXd top = es.eigenvectors().col(n - 1);
  Labels out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = top(i) >= 0.0 ? 1.0 : -1.0;
  if (c.dot(out) < 0.0) out = -out;
  return out;
}

inline Labels round_solution(const SdpSolution &sol, const Labels &c) {
  return round_solution(sol.y_matrix, c);
}

// Dual certificate built from the planted labels:
//   Lambda = V - X + n * sum_i a_i a_i^T,   V_ii = sum_j X_ij y_j y_i.
// y_bar is always in the null space of Lambda; lambda_2(Lambda) > 0 certifies
// that y_bar y_bar^T is the unique optimum of the relaxation.
struct CertificateReport {
  double lambda1_of_Lambda = 0.0;
  double lambda2_of_Lambda = 0.0;
  double residual_null = 0.0;  // ||Lambda y_bar||_2
  double lambda_frobenius = 0.0;
  bool holds = false;
};

inline constexpr double kCertificateTol = 1e-9;

inline Eigen::MatrixXd certificate_matrix(const Eigen::MatrixXd &x,
                                          std::span<const Eigen::VectorXd> attributes,
                                          const Labels &y_bar) {
  detail::require_observation_matrix(x);
  const Eigen::Index n = x.rows();
  detail::require(y_bar.size() == n, "y_bar has wrong length");
  detail::require(is_sign_vector(y_bar), "y_bar entries must be exactly +1 or -1");
  Eigen::MatrixXd lambda = -x;
  lambda.diagonal() += (x * y_bar).cwiseProduct(y_bar);
  for (const auto &a : attributes) {
    detail::require(a.size() == n, "attribute has wrong length");
    lambda.noalias() += static_cast<double>(n) * a * a.transpose();
  }
  return lambda;
}

inline CertificateReport dual_certificate(const Eigen::MatrixXd &x,
                                          std::span<const Eigen::VectorXd> attributes,
                                          const Labels &y_bar) {
  const Eigen::MatrixXd lambda = certificate_matrix(x, attributes, y_bar);
  const Spectrum s = eig_sym(lambda);
  CertificateReport out;
  out.lambda1_of_Lambda = s.eigenvalues(0);
  out.lambda2_of_Lambda = s.size() > 1 ? s.eigenvalues(1) : std::numeric_limits<double>::infinity();
  out.residual_null = (lambda * y_bar).norm();
  out.lambda_frobenius = lambda.norm();
  out.holds = out.lambda2_of_Lambda > kCertificateTol;
  return out;
}

inline CertificateReport dual_certificate(const Eigen::MatrixXd &x,
                                          const std::vector<Eigen::VectorXd> &attributes,
                                          const Labels &y_bar) {
  return dual_certificate(x, std::span<const Eigen::VectorXd>(attributes), y_bar);
}

// ---------------------------------------------------------------------------
// Exhaustive oracle for
//   maximize 1/2 y^T X y + alpha c^T y  s.t. |<a_i, y>| <= feas_tol ||a_i||,  y in {-1,+1}^n.
// Keeps the 1/2 so objective values match the combinatorial problem as
// written. Ties go to the lexicographically smallest vector with +1 < -1.

inline constexpr int kMaxBruteForceVertices = 20;

struct BruteForceResult {
  Labels labels;
  double objective = 0.0;
  long long feasible_count = 0;
};

namespace detail {

// Lexicographic order with +1 ranked before -1.
inline bool lex_less(const Labels &a, const Labels &b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) > b(i);
  }
  return false;
}

}  // namespace detail

inline BruteForceResult brute_force(const Eigen::MatrixXd &x, const Labels &c,
                                    std::span<const Eigen::VectorXd> attributes, double alpha_val,
                                    double feas_tol = 1e-6) {
  detail::require(x.rows() == x.cols(), "observation matrix must be square");
  const Eigen::Index n = x.rows();
  detail::require(n >= 1, "observation matrix is empty");
  if (n > kMaxBruteForceVertices) {
    throw SizeLimitError("brute_force supports at most " + std::to_string(kMaxBruteForceVertices) +
                         " vertices, got " + std::to_string(n));
  }
  detail::require(c.size() == n, "node observations have wrong length");
  detail::require(feas_tol >= 0.0, "feasibility tolerance must be nonnegative");
  for (const auto &a : attributes) detail::require(a.size() == n, "attribute has wrong length");

  const std::size_t k = attributes.size();
  std::vector<double> limits(k);
  for (std::size_t i = 0; i < k; ++i) limits[i] = feas_tol * attributes[i].norm();

  auto objective_of = [&](const Labels &y) { return 0.5 * y.dot(x * y) + alpha_val * c.dot(y); };
  auto exactly_feasible = [&](const Labels &y) {
    for (std::size_t i = 0; i < k; ++i)
      if (std::abs(attributes[i].dot(y)) > limits[i]) return false;
    return true;
  };

  // Gray-code walk starting at all +1; sums are updated incrementally and
  // candidates that look feasible or competitive are re-evaluated exactly.
  Labels y = Labels::Ones(n);
  Eigen::VectorXd xy = x * y;
  double quad = y.dot(xy);
  double lin = c.dot(y);
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < k; ++i) sums[i] = attributes[i].dot(y);
  const double slack = 1e-9 * (1.0 + x.cwiseAbs().sum() + std::abs(alpha_val) * c.cwiseAbs().sum());

  BruteForceResult best;
  bool found = false;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 0; step < total; ++step) {
    if (step > 0) {
      const int v = std::countr_zero(step);
      const double old = y(v);
      quad += -4.0 * old * xy(v) + 4.0 * x(v, v);
      xy -= 2.0 * old * x.col(v);
      lin -= 2.0 * old * c(v);
      for (std::size_t i = 0; i < k; ++i) sums[i] -= 2.0 * old * attributes[i](v);
      y(v) = -old;
    }
    bool maybe_feasible = true;
    for (std::size_t i = 0; i < k && maybe_feasible; ++i)
      maybe_feasible = std::abs(sums[i]) <= limits[i] + 1e-9;
    if (!maybe_feasible) continue;
    const double approx = 0.5 * quad + alpha_val * lin;
    if (found && approx < best.objective - slack) {
      if (exactly_feasible(y)) ++best.feasible_count;
      continue;
    }
    if (!exactly_feasible(y)) continue;
    ++best.feasible_count;
    const double value = objective_of(y);
    if (!found || value > best.objective ||
        (value == best.objective && detail::lex_less(y, best.labels))) {
      best.labels = y;
      best.objective = value;
      found = true;
    }
  }
  if (!found) throw InfeasibleError("brute_force: no sign vector satisfies the attribute constraints");
  return best;
}

inline BruteForceResult brute_force(const Eigen::MatrixXd &x, const Labels &c,
                                    const std::vector<Eigen::VectorXd> &attributes,
                                    double alpha_val, double feas_tol = 1e-6) {
  return brute_force(x, c, std::span<const Eigen::VectorXd>(attributes), alpha_val, feas_tol);
}

inline bool check_exact_recovery(const Labels &y_hat, const Labels &y_bar) {
  detail::require(y_hat.size() == y_bar.size(), "label vectors differ in length");
  return y_hat == y_bar;
}

}  // namespace fairrec

#endif  // FAIRREC_SOLVER_HPP
