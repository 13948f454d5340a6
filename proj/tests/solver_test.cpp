#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/graph.hpp"
#include "fairrec/model.hpp"
#include "fairrec/random.hpp"
#include "fairrec/solver.hpp"

using namespace fairrec;

namespace {

struct Case {
  Instance inst;
  Observation obs;
};

Case make_case(const Graph &g, int k, double p, std::uint64_t seed) {
  Labels y = sample_labels(g.vertex_count(), derive_seed({seed, 1}));
  auto attrs = sample_fair_attributes(y, k, derive_seed({seed, 2}));
  Instance inst = make_instance(g, std::move(y), std::move(attrs));
  Observation obs = observe(inst, p, p, derive_seed({seed, 3}));
  return {std::move(inst), std::move(obs)};
}

Graph connected_er(int n, double r, std::uint64_t seed) {
  for (std::uint64_t s = seed;; ++s) {
    Graph g = erdos_renyi(n, r, s);
    if (g.is_connected()) return g;
  }
}

// Direct enumeration in plain integer order; independent of the Gray-code walk.
struct NaiveOptimum {
  Labels labels;
  double objective = -1e300;
  bool found = false;
};

NaiveOptimum naive_brute_force(const Eigen::MatrixXd &x, const Labels &c,
                               const std::vector<Eigen::VectorXd> &attrs, double alpha_val,
                               double feas_tol) {
  const int n = static_cast<int>(x.rows());
  NaiveOptimum best;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Labels y(n);
    for (int i = 0; i < n; ++i) y(i) = ((mask >> (n - 1 - i)) & 1u) ? -1.0 : 1.0;
    bool ok = true;
    for (const auto &a : attrs) ok = ok && std::abs(a.dot(y)) <= feas_tol * a.norm();
    if (!ok) continue;
    const double value = 0.5 * y.dot(x * y) + alpha_val * c.dot(y);
    // Masks run in lexicographic order (+1 < -1), so strict > keeps the first.
    if (!best.found || value > best.objective + 1e-12) {
      best = {y, value, true};
    }
  }
  return best;
}

void expect_feasible(const SdpSolution &sol, const std::vector<Eigen::VectorXd> &attrs,
                     const SdpConfig &cfg = {}) {
  const Eigen::Index n = sol.y_matrix.rows();
  EXPECT_LE((sol.y_matrix.diagonal() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff(), cfg.primal_tol);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.y_matrix, Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues()(0), -10 * cfg.primal_tol);
  for (const auto &a : attrs) EXPECT_LE((sol.y_matrix * a).norm(), 10 * cfg.primal_tol * a.norm());
}

}  // namespace

TEST(SolveSdp, NoiselessFourCycleRecoversRankOne) {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Case c = make_case(grid(2, 2), 0, 0.0, s);
    const SdpSolution sol = solve_sdp(c.obs.x, c.inst.attributes);
    ASSERT_TRUE(sol.converged());
    const Eigen::MatrixXd target = c.inst.y_bar * c.inst.y_bar.transpose();
    EXPECT_LE((sol.y_matrix - target).norm(), 1e-4);
    EXPECT_NEAR(sol.objective, 8.0, 1e-4);
  }
}

TEST(SolveSdp, ZeroObjective) {
  const SdpSolution sol = solve_sdp(Eigen::MatrixXd::Zero(6, 6), std::vector<Eigen::VectorXd>{});
  ASSERT_TRUE(sol.converged());
  EXPECT_NEAR(sol.objective, 0.0, 1e-6);
  expect_feasible(sol, {});
}

TEST(SolveSdp, FrustratedTriangle) {
  // Maximize -2(Y12 + Y13 + Y23) over the elliptope: Y_ij = -1/2, value 3.
  const Eigen::MatrixXd x = -(Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3));
  const SdpSolution sol = solve_sdp(x, std::vector<Eigen::VectorXd>{});
  ASSERT_TRUE(sol.converged());
  EXPECT_NEAR(sol.objective, 3.0, 1e-5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        EXPECT_NEAR(sol.y_matrix(i, j), -0.5, 1e-4);
      }

  const std::vector<Eigen::VectorXd> ones{Eigen::VectorXd::Ones(3)};
  const SdpSolution constrained = solve_sdp(x, ones);
  EXPECT_NEAR(constrained.objective, 3.0, 1e-5);
  expect_feasible(constrained, ones);
}

TEST(SolveSdp, ConstraintForcesBalancedSolution) {
  // On K4 with X = J - I the unconstrained optimum is all-ones; with
  // a = 1 the best balanced Gram matrix has sum 0 and value -4.
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(4, 4) - Eigen::MatrixXd::Identity(4, 4);
  EXPECT_NEAR(solve_sdp(x, std::vector<Eigen::VectorXd>{}).objective, 12.0, 1e-5);
  const std::vector<Eigen::VectorXd> ones{Eigen::VectorXd::Ones(4)};
  const SdpSolution sol = solve_sdp(x, ones);
  EXPECT_NEAR(sol.objective, -4.0, 1e-5);
  expect_feasible(sol, ones);
}

TEST(SolveSdp, FeasibilityAndDominanceOnRandomInstances) {
  for (std::uint64_t s = 0; s < 12; ++s) {
    const int k = static_cast<int>(s % 3);
    const Case c = make_case(connected_er(10, 0.5, 100 * s), k, 0.1, s);
    const SdpSolution sol = solve_sdp(c.obs.x, c.inst.attributes);
    ASSERT_TRUE(sol.converged()) << s;
    expect_feasible(sol, c.inst.attributes);
    EXPECT_LE(sol.primal_residual, 1e-6);
    EXPECT_LE(sol.dual_residual, 1e-6);
    EXPECT_NEAR(sol.objective, (c.obs.x.cwiseProduct(sol.y_matrix)).sum(), 1e-9);
    const double planted = c.inst.y_bar.dot(c.obs.x * c.inst.y_bar);
    EXPECT_GE(sol.objective, planted - 1e-4);
  }
}

// Noiseless grid with one constraint: the optimum is y_bar y_bar^T with
// objective 2|E|. Unbounded penalty balancing used to cycle here and hit the cap.
TEST(SolveSdp, NoiselessGridWithOneConstraintConverges) {
  const Graph g = grid(4, 16);
  for (std::uint64_t t = 0; t < 3; ++t) {
    const Labels y = sample_labels(64, 100 + t);
    const Instance inst = make_instance(g, y, sample_fair_attributes(y, 1, 200 + t));
    const Observation obs = observe(inst, 0.0, 0.0, 300 + t);
    const SdpSolution sol = solve_sdp(obs.x, inst.attributes);
    EXPECT_TRUE(sol.converged()) << t;
    EXPECT_NEAR(sol.objective, 2.0 * g.edge_count(), 1e-3) << t;
    EXPECT_EQ(round_solution(sol, obs.c), y) << t;
  }
}

TEST(SolveSdp, DependentAttributesAreDeduplicated) {
  const Case c = make_case(grid(2, 3), 1, 0.0, 4);
  std::vector<Eigen::VectorXd> attrs{c.inst.attributes[0], 2.0 * c.inst.attributes[0]};
  const SdpSolution sol = solve_sdp(c.obs.x, attrs);
  EXPECT_EQ(sol.attributes_used, 1);
  EXPECT_FALSE(sol.warnings.empty());
  expect_feasible(sol, attrs);
}

TEST(SolveSdp, IterationCapIsSoft) {
  const Case c = make_case(grid(3, 3), 1, 0.2, 5);
  SdpConfig cfg;
  cfg.max_iters = 3;
  const SdpSolution sol = solve_sdp(c.obs.x, c.inst.attributes, cfg);
  EXPECT_EQ(sol.status, SdpStatus::kIterationCap);
  EXPECT_EQ(sol.iterations, 3);
  EXPECT_EQ(sol.y_matrix.rows(), 9);
}

TEST(SolveSdp, InputValidation) {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 3);
  bad(0, 1) = 1.0;
  EXPECT_THROW(solve_sdp(bad, std::vector<Eigen::VectorXd>{}), InvalidArgument);
  Eigen::MatrixXd diag = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(solve_sdp(diag, std::vector<Eigen::VectorXd>{}), InvalidArgument);
  SdpConfig cfg;
  cfg.primal_tol = 0.0;
  EXPECT_THROW(solve_sdp(Eigen::MatrixXd::Zero(3, 3), std::vector<Eigen::VectorXd>{}, cfg),
               InvalidArgument);
  Eigen::MatrixXd nan = Eigen::MatrixXd::Zero(3, 3);
  nan(0, 1) = nan(1, 0) = std::nan("");
  EXPECT_ANY_THROW(solve_sdp(nan, std::vector<Eigen::VectorXd>{}));
}

TEST(RoundSolution, Examples) {
  const Labels y = (Labels(4) << 1, 1, -1, -1).finished();
  const Eigen::MatrixXd yy = y * y.transpose();
  EXPECT_EQ(round_solution(yy, y), y);
  EXPECT_EQ(round_solution(yy, Labels(-y)), -y);
  const Labels c = (Labels(4) << 1, -1, -1, -1).finished();
  EXPECT_EQ(round_solution(yy, c), y);
}

TEST(RoundSolution, TieKeepsUnflipped) {
  const Labels y = (Labels(4) << 1, -1, 1, -1).finished();
  const Eigen::MatrixXd yy = y * y.transpose();
  const Labels c = (Labels(4) << 1, 1, -1, -1).finished();
  ASSERT_EQ(c.dot(y), 0.0);
  const Labels out = round_solution(yy, c);
  EXPECT_TRUE(out == y || out == Labels(-y));
  const Labels again = round_solution(yy, c);
  EXPECT_EQ(out, again);
}

TEST(RoundSolution, ZeroEntriesRoundToPlusOne) {
  // Top eigenvector of diag(1, 0) is e1; its zero entry rounds to +1.
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(2, 2);
  y(0, 0) = 1.0;
  // The vote is a tie either way, so the zero entry keeps its +1.
  EXPECT_EQ(round_solution(y, Labels::Ones(2))(1), 1.0);
}

TEST(Certificate, NullSpaceIdentity) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Case c = make_case(connected_er(12, 0.4, 7 * s), static_cast<int>(s % 3), 0.2, s);
    const CertificateReport r = dual_certificate(c.obs.x, c.inst.attributes, c.inst.y_bar);
    EXPECT_LE(r.residual_null, 1e-9 * r.lambda_frobenius);
    EXPECT_EQ(r.holds, r.lambda2_of_Lambda > kCertificateTol);
  }
}

TEST(Certificate, NoiselessHolds) {
  for (const Graph &g : {grid(2, 2), grid(3, 5), complete(6), star(7)}) {
    const Case c = make_case(g, 1, 0.0, 3);
    const CertificateReport r = dual_certificate(c.obs.x, c.inst.attributes, c.inst.y_bar);
    EXPECT_TRUE(r.holds);
    EXPECT_GE(r.lambda2_of_Lambda, eig_sym(laplacian(g)).eigenvalues(1) - 1e-8);
  }
}

TEST(Certificate, AdversarialFails) {
  const Case c = make_case(complete(6), 0, 0.0, 8);
  const CertificateReport r = dual_certificate(Eigen::MatrixXd(-c.obs.x), std::vector<Eigen::VectorXd>{}, c.inst.y_bar);
  EXPECT_FALSE(r.holds);
  EXPECT_LT(r.lambda2_of_Lambda, 0.0);
}

TEST(Certificate, MatrixMatchesDefinition) {
  const Case c = make_case(grid(2, 3), 1, 0.3, 2);
  const Eigen::MatrixXd lam = certificate_matrix(c.obs.x, c.inst.attributes, c.inst.y_bar);
  const int n = 6;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double expected = -c.obs.x(i, j) + n * c.inst.attributes[0](i) * c.inst.attributes[0](j);
      if (i == j) {
        for (int l = 0; l < n; ++l) expected += c.obs.x(i, l) * c.inst.y_bar(l) * c.inst.y_bar(i);
      }
      EXPECT_NEAR(lam(i, j), expected, 1e-12);
    }
  }
}

TEST(Certificate, SoundnessAgainstOracle) {
  int certified = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Case c = make_case(connected_er(10, 0.6, 31 * s), 1, 0.05, 1000 + s);
    const CertificateReport r = dual_certificate(c.obs.x, c.inst.attributes, c.inst.y_bar);
    if (!r.holds) continue;
    ++certified;
    const Labels rounded = round_solution(solve_sdp(c.obs.x, c.inst.attributes), c.obs.c);
    const BruteForceResult oracle = brute_force(c.obs.x, c.obs.c, c.inst.attributes, alpha(0.05, 0.05));
    EXPECT_EQ(rounded, oracle.labels) << s;
  }
  EXPECT_GT(certified, 0);
}

TEST(BruteForce, LinearTermOnly) {
  const Labels c = (Labels(5) << 1, -1, -1, 1, -1).finished();
  const BruteForceResult r = brute_force(Eigen::MatrixXd::Zero(5, 5), c, std::vector<Eigen::VectorXd>{}, 0.7);
  EXPECT_EQ(r.labels, c);
  EXPECT_NEAR(r.objective, 0.7 * 5, 1e-12);
  EXPECT_EQ(r.feasible_count, 32);
}

TEST(BruteForce, BalancedTieBreak) {
  const std::vector<Eigen::VectorXd> ones{Eigen::VectorXd::Ones(4)};
  const BruteForceResult r = brute_force(Eigen::MatrixXd::Zero(4, 4), Labels::Zero(4), ones, 1.0);
  EXPECT_EQ(r.labels, (Labels(4) << 1, 1, -1, -1).finished());
  EXPECT_EQ(r.feasible_count, 6);
  EXPECT_EQ(r.objective, 0.0);
}

TEST(BruteForce, NoiselessGridWithGenericAttribute) {
  const Case c = make_case(grid(2, 3), 1, 0.0, 12);
  const double a = 1.3;
  const BruteForceResult r = brute_force(c.obs.x, c.obs.c, c.inst.attributes, a);
  EXPECT_EQ(r.labels, c.inst.y_bar);
  EXPECT_NEAR(r.objective, 0.5 * c.inst.y_bar.dot(c.obs.x * c.inst.y_bar) + a * 6, 1e-12);
  EXPECT_NEAR(r.objective, 0.5 * 2 * 7 + a * 6, 1e-12);
  EXPECT_EQ(r.feasible_count, 2);
}

TEST(BruteForce, MatchesNaiveEnumeration) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const int n = 4 + static_cast<int>(s % 8);
    const Case c = make_case(connected_er(n, 0.5, s * 13), s % 2 ? 1 : 0, 0.25, s);
    std::vector<Eigen::VectorXd> attrs = c.inst.attributes;
    if (s % 4 == 3) attrs = {Eigen::VectorXd::Ones(n)};
    if (s % 4 == 3 && n % 2 == 1) continue;
    const double a = 0.3 + 0.1 * (s % 5);
    const NaiveOptimum naive = naive_brute_force(c.obs.x, c.obs.c, attrs, a, 1e-6);
    const BruteForceResult fast = brute_force(c.obs.x, c.obs.c, attrs, a);
    ASSERT_TRUE(naive.found);
    EXPECT_EQ(fast.labels, naive.labels) << s;
    EXPECT_NEAR(fast.objective, naive.objective, 1e-9);
  }
}

TEST(BruteForce, Errors) {
  EXPECT_THROW(brute_force(Eigen::MatrixXd::Zero(21, 21), Labels::Ones(21), std::vector<Eigen::VectorXd>{}, 1.0),
               SizeLimitError);
  const std::vector<Eigen::VectorXd> ones{Eigen::VectorXd::Ones(3)};
  EXPECT_THROW(brute_force(Eigen::MatrixXd::Zero(3, 3), Labels::Ones(3), ones, 1.0), InfeasibleError);
  EXPECT_THROW(brute_force(Eigen::MatrixXd::Zero(3, 3), Labels::Ones(3), std::vector<Eigen::VectorXd>{}, 1.0, -1.0),
               InvalidArgument);
}

TEST(ExactRecovery, Examples) {
  const Labels y = (Labels(4) << 1, -1, -1, 1).finished();
  EXPECT_TRUE(check_exact_recovery(y, y));
  EXPECT_FALSE(check_exact_recovery(-y, y));
  Labels one = y;
  one(2) = 1;
  EXPECT_FALSE(check_exact_recovery(one, y));
  EXPECT_THROW(check_exact_recovery(Labels::Ones(3), y), InvalidArgument);
}
