#ifndef FAIRREC_MODEL_HPP
#define FAIRREC_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/error.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/random.hpp"

namespace fairrec {

// Label vectors hold entries in {-1, +1} stored as doubles so they mix
// directly with Eigen arithmetic.
using Labels = Eigen::VectorXd;

inline bool is_sign_vector(const Eigen::VectorXd &y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 1.0 && y(i) != -1.0) return false;
  return true;
}

// Statistical parity: |<a, y_bar>| <= kParityTol * ||a||_2 for each attribute.
inline constexpr double kParityTol = 1e-9;

// A planted fair labeling on a graph.
struct Instance {
  Graph graph;
  Labels y_bar;
  std::vector<Eigen::VectorXd> attributes;

  int size() const { return graph.vertex_count(); }
  int attribute_count() const { return static_cast<int>(attributes.size()); }
};

inline void validate(const Instance &inst) {
  const int n = inst.graph.vertex_count();
  detail::require(inst.y_bar.size() == n, "y_bar length does not match the graph");
  detail::require(is_sign_vector(inst.y_bar), "y_bar entries must be exactly +1 or -1");
  for (std::size_t i = 0; i < inst.attributes.size(); ++i) {
    const auto &a = inst.attributes[i];
    detail::require(a.size() == n, "attribute " + std::to_string(i) + " has wrong length");
    detail::require(a.allFinite(), "attribute " + std::to_string(i) + " is not finite");
    const double parity = std::abs(a.dot(inst.y_bar));
    if (parity > kParityTol * a.norm()) {
      throw InvalidArgument("attribute " + std::to_string(i) +
                            " violates statistical parity: |<a, y_bar>| = " +
                            std::to_string(parity));
    }
  }
}

inline Instance make_instance(Graph graph, Labels y_bar, std::vector<Eigen::VectorXd> attributes) {
  Instance inst{std::move(graph), std::move(y_bar), std::move(attributes)};
  validate(inst);
  return inst;
}

// One noisy observation of every edge (x) and node (c). x is symmetric
// with zero diagonal and is nonzero exactly on the edges of the graph.
struct Observation {
  Eigen::MatrixXd x;
  Labels c;
  double p = 0.0;
  double q = 0.0;
  std::uint64_t seed = 0;
};

// y_bar_i ~ Rademacher, independently.
inline Labels sample_labels(int n, std::uint64_t seed) {
  detail::require(n >= 1, "sample_labels needs n >= 1");
  Rng rng(seed);
  Labels y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.rademacher();
  return y;
}

// k unit-norm attributes drawn from the null space of y_bar^T: a Gaussian
// vector z is projected as z - (<z, y_bar> / n) y_bar and normalized.
inline std::vector<Eigen::VectorXd> sample_fair_attributes(const Labels &y_bar, int k,
                                                           std::uint64_t seed) {
  const auto n = y_bar.size();
  detail::require(n >= 2, "sample_fair_attributes needs n >= 2");
  detail::require(is_sign_vector(y_bar), "y_bar entries must be exactly +1 or -1");
  detail::require(k >= 0, "attribute count must be nonnegative");
  detail::require(k < n, "at most n - 1 attributes fit in the null space of y_bar^T");
  Rng rng(seed);
  const double nn = static_cast<double>(n);
  std::vector<Eigen::VectorXd> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd a(n);
    for (Eigen::Index j = 0; j < n; ++j) a(j) = rng.normal();
    // Projecting twice brings the residual parity down to rounding level.
    for (int pass = 0; pass < 2; ++pass) a -= (a.dot(y_bar) / nn) * y_bar;
    a.normalize();
    out.push_back(std::move(a));
  }
  return out;
}

// Weight of the node term in the MAP objective:
//   log((1 - q) / q) / log((1 - p) / p).
inline double alpha(double p, double q) {
  detail::require(p > 0.0 && p < 0.5, "alpha: p must lie in (0, 0.5)");
  detail::require(q > 0.0 && q < 0.5, "alpha: q must lie in (0, 0.5)");
  return std::log((1.0 - q) / q) / std::log((1.0 - p) / p);
}

// Draws one observation: each edge reports y_u y_v flipped with probability
// p (edges visited in sorted order), then each node reports y_u flipped
// with probability q. p = 0 and q = 0 give noiseless observations.
inline Observation observe(const Instance &inst, double p, double q, std::uint64_t seed) {
  detail::require(p >= 0.0 && p < 0.5, "observe: p must lie in [0, 0.5)");
  detail::require(q >= 0.0 && q < 0.5, "observe: q must lie in [0, 0.5)");
  detail::require_connected(inst.graph, "observe");
  const int n = inst.size();
  detail::require(inst.y_bar.size() == n, "y_bar length does not match the graph");
  Rng rng(seed);
  Observation obs;
  obs.p = p;
  obs.q = q;
  obs.seed = seed;
  obs.x = Eigen::MatrixXd::Zero(n, n);
  for (const auto &[u, v] : inst.graph.edges()) {
    const double truth = inst.y_bar(u) * inst.y_bar(v);
    const double value = rng.bernoulli(p) ? -truth : truth;
    obs.x(u, v) = value;
    obs.x(v, u) = value;
  }
  obs.c.resize(n);
  for (int u = 0; u < n; ++u) obs.c(u) = rng.bernoulli(q) ? -inst.y_bar(u) : inst.y_bar(u);
  return obs;
}

}  // namespace fairrec

#endif  // FAIRREC_MODEL_HPP
