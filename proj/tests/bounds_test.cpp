#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/bounds.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/model.hpp"
#include "fairrec/random.hpp"

using namespace fairrec;

namespace {

Eigen::MatrixXd gaussian(int rows, int cols, Rng &rng) {
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.normal();
  return g;
}

double min_eigenvalue(const Eigen::MatrixXd &a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// PSD matrix with eigenvalues (l1, l2, big, ...) and bottom eigenvector q1.
Eigen::MatrixXd surrogate(const Eigen::VectorXd &q1, double l1, double l2, double big) {
  const Eigen::Index n = q1.size();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  basis.col(0) = q1;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d = Eigen::VectorXd::Constant(n, big);
  d(0) = l1;
  d(1) = l2;
  return q * d.asDiagonal() * q.transpose();
}

Graph connected_er(int n, double r, std::uint64_t seed) {
  for (std::uint64_t s = seed;; ++s) {
    Graph g = erdos_renyi(n, r, s);
    if (g.is_connected()) return g;
  }
}

}  // namespace

TEST(Lemma1, TwoByTwoIsTight) {
  const Eigen::MatrixXd m = Eigen::Vector2d(0, 1).asDiagonal();
  const Eigen::Vector2d v(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  const Eigen::MatrixXd n = v * v.transpose();
  const double expected = 1.0 - std::sqrt(2.0) / 2.0;
  EXPECT_NEAR(lemma1_bound(m, n, 1.0), expected, 1e-10);
  EXPECT_NEAR(min_eigenvalue(m + n), expected, 1e-10);
  EXPECT_NEAR(weyl_bound(m, n, 1.0), 0.0, 1e-12);
}

TEST(Lemma1, ZeroScaleReturnsBottomEigenvalue) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd g = gaussian(5, 5, rng);
    const Eigen::MatrixXd m = g * g.transpose();
    const Eigen::MatrixXd w = gaussian(5, 2, rng);
    EXPECT_NEAR(lemma1_bound(m, w * w.transpose(), 0.0), min_eigenvalue(m), 1e-12);
  }
}

TEST(Lemma1, DegenerateBottomReturnsBottomEigenvalue) {
  const Eigen::MatrixXd m = Eigen::Vector4d(2, 2, 5, 7).asDiagonal();
  Rng rng(9);
  const Eigen::MatrixXd w = gaussian(4, 1, rng);
  EXPECT_NEAR(lemma1_bound(m, w * w.transpose(), 3.0), 2.0, 1e-12);
}

TEST(Lemma1, ZeroPerturbation) {
  const Eigen::MatrixXd m = Eigen::Vector3d(1, 2, 3).asDiagonal();
  EXPECT_NEAR(lemma1_bound(m, Eigen::MatrixXd::Zero(3, 3), 4.0), 1.0, 1e-12);
}

TEST(Lemma1, ValidAndDominatesWeylOnRandomTrials) {
  Rng rng(2024);
  for (int t = 0; t < 300; ++t) {
    const int n = 3 + t % 8;
    const int l = 1 + t % (n - 1);
    const Eigen::MatrixXd g = gaussian(n, n, rng);
    const Eigen::MatrixXd m = g * g.transpose();
    const Eigen::MatrixXd w = gaussian(n, l, rng);
    const Eigen::MatrixXd nm = w * w.transpose();
    const double a = 10.0 * rng.uniform();
    const double bound = lemma1_bound(m, nm, a);
    EXPECT_LE(bound, min_eigenvalue(m + a * nm) + 1e-8);
    EXPECT_GE(bound, weyl_bound(m, nm, a) - 1e-10);
    EXPECT_GE(bound - min_eigenvalue(m), -1e-12);
  }
}

TEST(Lemma1, InputValidation) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(lemma1_bound(id, id, -1.0), InvalidArgument);
  EXPECT_THROW(lemma1_bound(id, Eigen::MatrixXd::Identity(2, 2), 1.0), InvalidArgument);
  EXPECT_THROW(lemma1_bound(Eigen::MatrixXd(-id), id, 1.0), InvalidArgument);
  EXPECT_THROW(lemma1_bound(Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1), 1.0),
               InvalidArgument);
}

TEST(PerturbationGain, StableForm) {
  EXPECT_NEAR(perturbation_gain(6.0, 1.0, 1.0), 1.0, 1e-14);
  EXPECT_EQ(perturbation_gain(0.0, 1.0, 0.5), 0.0);
  EXPECT_EQ(perturbation_gain(3.0, 0.0, 0.5), 0.0);
  // Tiny c relative to b: naive b - sqrt(b^2 - c) loses every digit.
  const double tiny = perturbation_gain(1e8, 1.0, 1e-10);
  EXPECT_NEAR(tiny / (1e-2 / (1e8 + 1)), 1.0, 1e-12);
  EXPECT_THROW(perturbation_gain(1.0, 1.0, 2.0), NumericFailure);
}

TEST(Weyl, Examples) {
  const Eigen::MatrixXd m = Eigen::Vector3d(1, 4, 5).asDiagonal();
  Rng rng(1);
  const Eigen::MatrixXd w = gaussian(3, 2, rng);
  EXPECT_NEAR(weyl_bound(m, w * w.transpose(), 2.0), 1.0, 1e-12);
  EXPECT_NEAR(weyl_bound(m, Eigen::MatrixXd::Identity(3, 3), 2.5), 3.5, 1e-12);
}

TEST(Epsilon1, EmptyAndSquareGrid) {
  EXPECT_EQ(epsilon1(grid(2, 3), std::vector<Eigen::VectorXd>{}), 0.0);
  const Labels y = sample_labels(16, 4);
  EXPECT_EQ(epsilon1(grid(4, 4), sample_fair_attributes(y, 2, 5)), 0.0);
}

TEST(Epsilon1, FiedlerAttributeOnGrid2x3) {
  const Graph g = grid(2, 3);
  const FiedlerVector pi2 = fiedler_vector(g);
  const std::vector<Eigen::VectorXd> attrs{pi2.vector};
  EXPECT_NEAR(epsilon1(g, attrs), 1.0, 1e-10);
}

TEST(Epsilon1, MatchesSurrogateLemma) {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const Graph g = s % 3 == 0 ? grid(2, 2 + static_cast<int>(s % 5)) : connected_er(9, 0.5, 40 * s);
    const int n = g.vertex_count();
    const Spectrum lap = laplacian_spectrum(g);
    const double delta = spectral_gap(lap);
    if (delta == 0.0) continue;
    const Labels y = sample_labels(n, s);
    const auto a = sample_fair_attributes(y, 1, s + 100);
    const Eigen::MatrixXd m = surrogate(lap.eigenvectors.col(1), lap.eigenvalues(1),
                                        lap.eigenvalues(2), lap.eigenvalues(2) + 50.0);
    const double via_lemma = lemma1_bound(m, a[0] * a[0].transpose(), n) - lap.eigenvalues(1);
    EXPECT_NEAR(epsilon1(g, a), via_lemma, 1e-8) << s;
  }
}

TEST(Epsilon1, PositiveExactlyWhenProjectionAndGapArePositive) {
  const Graph g = grid(2, 4);
  const FiedlerVector pi2 = fiedler_vector(g);
  ASSERT_GT(laplacian_gap_delta(g), 0.0);
  const Labels y = sample_labels(8, 6);
  const auto a = sample_fair_attributes(y, 1, 7);
  EXPECT_GT(std::abs(a[0].dot(pi2.vector)), 1e-9);
  EXPECT_GT(epsilon1(g, a), 0.0);

  // An attribute orthogonal to the Fiedler vector contributes nothing.
  Eigen::VectorXd b = a[0] - a[0].dot(pi2.vector) * pi2.vector;
  b.normalize();
  EXPECT_NEAR(epsilon1(g, std::vector<Eigen::VectorXd>{b}), 0.0, 1e-12);
}

TEST(Epsilon1, DisconnectedGraph) {
  EXPECT_THROW(epsilon1(Graph(4, {{0, 1}, {2, 3}}), std::vector<Eigen::VectorXd>{}), StructuralError);
}

TEST(Epsilon2, Examples) {
  const CheegerResult k10 = edge_expansion(complete(10), ExpansionMode::kExact);
  EXPECT_NEAR(epsilon2(complete(10), 0.1, k10), 0.8 * 25 / 36, 1e-12);
  const CheegerResult s6 = edge_expansion(star(6), ExpansionMode::kExact);
  EXPECT_NEAR(epsilon2(star(6), 0.1, s6), 0.04, 1e-12);
  EXPECT_LT(epsilon2(complete(10), 0.4999999, k10), 1e-6);
  EXPECT_THROW(epsilon2(complete(10), 0.5, k10), InvalidArgument);
}

TEST(Epsilon2, SpectralModeUsesLowerEndpoint) {
  const Graph g = grid(3, 4);
  const CheegerResult spec = edge_expansion(g, ExpansionMode::kSpectral);
  const double expected = 0.8 * spec.lower * spec.lower / (4.0 * g.max_degree());
  EXPECT_NEAR(epsilon2(g, 0.1, spec), expected, 1e-14);
}

TEST(RecoveryBound, CompleteGraphIsVacuous) {
  const BoundReport r = recovery_probability_bound(complete(10), std::vector<Eigen::VectorXd>{}, 0.1);
  EXPECT_NEAR(r.sigma_sq, 3.24, 1e-12);
  EXPECT_NEAR(r.r_const, 1.8, 1e-12);
  const double eps2 = 0.8 * 25 / 36;
  EXPECT_NEAR(r.eps2, eps2, 1e-12);
  EXPECT_EQ(r.eps1, 0.0);
  const double exponent = -3 * eps2 * eps2 / (24 * 3.24 + 8 * 1.8 * eps2);
  EXPECT_NEAR(r.exponent, exponent, 1e-14);
  EXPECT_NEAR(r.exponent, -0.0108, 5e-5);
  EXPECT_NEAR(r.prob_lower_bound, 1 - 20 * std::exp(exponent), 1e-12);
  EXPECT_TRUE(r.vacuous);
  EXPECT_EQ(r.phi_mode, ExpansionMode::kExact);
  EXPECT_DOUBLE_EQ(r.phi_used, 5.0);
}

TEST(RecoveryBound, FairnessStrictlyImprovesBound) {
  int compared = 0;
  for (std::uint64_t s = 0; compared < 10; ++s) {
    const Graph g = connected_er(12, 0.4, 77 * s);
    if (laplacian_gap_delta(g) == 0.0) continue;
    const auto a = sample_fair_attributes(sample_labels(12, s), 1, s + 9);
    const BoundReport with = recovery_probability_bound(g, a, 0.05);
    const BoundReport without = recovery_probability_bound(g, std::vector<Eigen::VectorXd>{}, 0.05);
    EXPECT_GT(with.eps1, 0.0);
    EXPECT_LT(with.exponent, without.exponent);
    EXPECT_GT(with.prob_lower_bound, without.prob_lower_bound);
    ++compared;
  }
}

TEST(RecoveryBound, ZeroEpsilonGivesOneMinusTwoN) {
  // Star: Delta = 0 so eps1 = 0; a supplied phi of 0 zeroes eps2.
  CheegerResult zero;
  zero.phi = 0.0;
  const BoundReport r = recovery_probability_bound(star(5), std::vector<Eigen::VectorXd>{}, 0.2, zero);
  EXPECT_EQ(r.exponent, 0.0);
  EXPECT_EQ(r.prob_lower_bound, 1.0 - 10.0);
}

TEST(RecoveryBound, SmallPIsFinite) {
  const auto a = sample_fair_attributes(sample_labels(8, 1), 1, 2);
  const BoundReport r = recovery_probability_bound(grid(2, 4), a, 1e-6);
  EXPECT_TRUE(std::isfinite(r.prob_lower_bound));
  EXPECT_LE(r.prob_lower_bound, 1.0);
  const double eps = r.eps1 + r.eps2;
  EXPECT_NEAR(r.exponent, -3 * eps * eps / (24 * r.sigma_sq + 8 * r.r_const * eps), 1e-15);
}

TEST(RecoveryBound, LargeGraphUsesSpectralLowerBound) {
  const Graph g = grid(5, 6);
  const BoundReport r = recovery_probability_bound(g, std::vector<Eigen::VectorXd>{}, 0.1);
  EXPECT_EQ(r.phi_mode, ExpansionMode::kSpectral);
  EXPECT_NEAR(r.phi_used, laplacian_spectrum(g).eigenvalues(1) / 2, 1e-12);
}

TEST(RecoveryBound, Errors) {
  EXPECT_THROW(recovery_probability_bound(grid(2, 2), std::vector<Eigen::VectorXd>{}, 0.0), InvalidArgument);
  EXPECT_THROW(recovery_probability_bound(Graph(4, {{0, 1}, {2, 3}}), std::vector<Eigen::VectorXd>{}, 0.1),
               StructuralError);
}
