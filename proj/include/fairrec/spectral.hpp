#ifndef FAIRREC_SPECTRAL_HPP
#define FAIRREC_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/error.hpp"
#include "fairrec/graph.hpp"

namespace fairrec {

// Full eigendecomposition of a symmetric matrix. eigenvalues are ascending
// and eigenvectors.col(i) pairs with eigenvalues(i). Each column is sign
// canonicalized so that its first entry with magnitude above
// kSignThreshold is positive.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

inline constexpr double kSignThreshold = 1e-9;

// Two eigenvalues lo <= hi are treated as one repeated eigenvalue when
// hi - lo <= kMultiplicityRelTol * max(1, |hi|).
inline constexpr double kMultiplicityRelTol = 1e-8;

inline bool eigenvalues_coincide(double lo, double hi) {
  return hi - lo <= kMultiplicityRelTol * std::max(1.0, std::abs(hi));
}

namespace detail {

inline void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > kSignThreshold) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

inline void require_symmetric(const Eigen::MatrixXd &a) {
  detail::require(a.rows() == a.cols(), "matrix must be square");
  detail::require(a.allFinite(), "matrix has non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  detail::require(asym <= 1e-12 * scale,
                  "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
}

}  // namespace detail

// Dense symmetric eigensolver (Householder tridiagonalization followed by
// implicit symmetric QR, via Eigen). The decomposition is checked against
// ||A v_i - lambda_i v_i|| <= tol * ||A||_F and orthonormality within 1e-8.
inline Spectrum eig_sym(const Eigen::MatrixXd &a, double tol = 1e-10) {
  detail::require(tol > 0, "eig_sym tolerance must be positive");
  detail::require_symmetric(a);
  const Eigen::Index n = a.rows();
  if (n == 0) return {};

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericFailure("eig_sym: eigensolver did not converge for a " + std::to_string(n) +
                         "x" + std::to_string(n) + " matrix");
  }
  Spectrum out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index i = 0; i < n; ++i) detail::canonicalize_sign(out.eigenvectors.col(i));

  const double frob = a.norm();
  const Eigen::MatrixXd residual =
      a * out.eigenvectors - out.eigenvectors * out.eigenvalues.asDiagonal();
  const double worst = residual.colwise().norm().maxCoeff();
  if (worst > tol * std::max(frob, 1e-300)) {
    throw NumericFailure("eig_sym: residual " + std::to_string(worst) +
                         " exceeds tolerance relative to ||A||_F = " + std::to_string(frob));
  }
  const double ortho =
      (out.eigenvectors.transpose() * out.eigenvectors - Eigen::MatrixXd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  if (ortho > 1e-8) {
    throw NumericFailure("eig_sym: eigenvectors lost orthonormality (" + std::to_string(ortho) +
                         ")");
  }
  return out;
}

inline Spectrum laplacian_spectrum(const Graph &g) { return eig_sym(laplacian(g)); }

// lambda_3 - lambda_2 of an ascending spectrum, set to 0 when the two
// coincide under the multiplicity tolerance. Spectra with fewer than three
// eigenvalues have no gap and report 0.
inline double spectral_gap(const Spectrum &s) {
  if (s.size() < 3) return 0.0;
  const double l2 = s.eigenvalues(1);
  const double l3 = s.eigenvalues(2);
  return eigenvalues_coincide(l2, l3) ? 0.0 : l3 - l2;
}

// Delta = lambda_3(L_G) - lambda_2(L_G) for a connected graph.
inline double laplacian_gap_delta(const Graph &g) {
  detail::require_connected(g, "laplacian_gap_delta");
  return spectral_gap(laplacian_spectrum(g));
}

struct FiedlerVector {
  Eigen::VectorXd vector;  // unit norm, sign canonicalized
  double lambda2 = 0.0;
  int multiplicity = 1;    // multiplicity of lambda_2

  // When true, vector is one deterministic member of a larger eigenspace.
  bool ambiguous() const { return multiplicity > 1; }
};

inline FiedlerVector fiedler_from_spectrum(const Spectrum &s) {
  detail::require(s.size() >= 2, "Fiedler vector needs at least two vertices");
  FiedlerVector out;
  out.vector = s.eigenvectors.col(1);
  out.lambda2 = s.eigenvalues(1);
  for (int i = 2; i < s.size() && eigenvalues_coincide(out.lambda2, s.eigenvalues(i)); ++i) {
    ++out.multiplicity;
  }
  return out;
}

inline FiedlerVector fiedler_vector(const Graph &g) {
  detail::require_connected(g, "fiedler_vector");
  return fiedler_from_spectrum(laplacian_spectrum(g));
}

// Laplacian eigenvalues of Grid(m, n) from the product-graph formula
//   lambda_{i,j} = (2 sin(pi i / 2m))^2 + (2 sin(pi j / 2n))^2,
// i in [0, m), j in [0, n), sorted ascending.
inline std::vector<double> grid_spectrum_closed_form(int m, int n) {
  detail::require(m >= 1 && n >= 1, "grid dimensions must be positive");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    const double si = 2.0 * std::sin(std::numbers::pi * i / (2.0 * m));
    for (int j = 0; j < n; ++j) {
      const double sj = 2.0 * std::sin(std::numbers::pi * j / (2.0 * n));
      values.push_back(si * si + sj * sj);
    }
  }
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace fairrec

#endif  // FAIRREC_SPECTRAL_HPP
