#ifndef FAIRREC_EXPANSION_HPP
#define FAIRREC_EXPANSION_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairrec/error.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/spectral.hpp"

namespace fairrec {

enum class ExpansionMode { kExact, kSpectral };

inline const char *to_string(ExpansionMode mode) {
  return mode == ExpansionMode::kExact ? "exact" : "spectral-bounds";
}

inline constexpr int kMaxExactExpansionVertices = 24;

// Edge expansion (Cheeger constant) phi_G = min |E(S, S^C)| / |S| over
// nonempty S with |S| <= n / 2.
//
// Exact mode: lower == upper == phi, and cut_edges / subset_size == phi for
// the returned witness. Spectral mode: [lower, upper] is the Cheeger
// interval [lambda_2 / 2, sqrt(2 deg_max lambda_2)] and phi holds the
// lower endpoint, which is the value safe to plug into lower bounds.
struct CheegerResult {
  double phi = 0.0;
  ExpansionMode method = ExpansionMode::kExact;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<std::vector<int>> witness;
  long long cut_edges = 0;  // exact mode only
  int subset_size = 0;      // exact mode only
};

namespace detail {

inline CheegerResult exact_edge_expansion(const Graph &g) {
  const int n = g.vertex_count();
  std::vector<std::uint32_t> adjacency_mask(n, 0);
  for (const auto &[u, v] : g.edges()) {
    adjacency_mask[u] |= (1u << v);
    adjacency_mask[v] |= (1u << u);
  }

  // Gray-code walk over all subsets so each step toggles one vertex and
  // the cut size updates in O(1).
  std::uint32_t subset = 0;
  long long cut = 0;
  int size = 0;
  long long best_cut = -1;
  int best_size = 1;
  std::uint32_t best_subset = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int v = std::countr_zero(step);
    const std::uint32_t bit = 1u << v;
    const int inside = std::popcount(adjacency_mask[v] & subset);
    const int degree = std::popcount(adjacency_mask[v]);
    if (subset & bit) {
      subset &= ~bit;
      --size;
      cut -= degree - 2 * inside;
    } else {
      subset |= bit;
      ++size;
      cut += degree - 2 * inside;
    }
    if (size == 0 || 2 * size > n) continue;
    if (best_cut < 0 || cut * best_size < best_cut * size) {
      best_cut = cut;
      best_size = size;
      best_subset = subset;
    }
  }

  CheegerResult out;
  out.method = ExpansionMode::kExact;
  out.cut_edges = best_cut;
  out.subset_size = best_size;
  out.phi = static_cast<double>(best_cut) / best_size;
  out.lower = out.upper = out.phi;
  std::vector<int> witness;
  for (int v = 0; v < n; ++v)
    if (best_subset & (1u << v)) witness.push_back(v);
  out.witness = std::move(witness);
  return out;
}

}  // namespace detail

inline CheegerResult edge_expansion(const Graph &g, ExpansionMode mode) {
  detail::require(g.vertex_count() >= 2, "edge expansion needs at least two vertices");
  detail::require_connected(g, "edge_expansion");
  if (mode == ExpansionMode::kExact) {
    if (g.vertex_count() > kMaxExactExpansionVertices) {
      throw SizeLimitError("exact edge expansion supports at most " +
                           std::to_string(kMaxExactExpansionVertices) + " vertices, got " +
                           std::to_string(g.vertex_count()));
    }
    return detail::exact_edge_expansion(g);
  }
  const double lambda2 = std::max(0.0, laplacian_spectrum(g).eigenvalues(1));
  CheegerResult out;
  out.method = ExpansionMode::kSpectral;
  out.lower = lambda2 / 2.0;
  out.upper = std::sqrt(2.0 * g.max_degree() * lambda2);
  out.phi = out.lower;
  return out;
}

}  // namespace fairrec

#endif  // FAIRREC_EXPANSION_HPP
