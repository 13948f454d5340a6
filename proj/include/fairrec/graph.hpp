#ifndef FAIRREC_GRAPH_HPP
#define FAIRREC_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fairrec/error.hpp"
#include "fairrec/random.hpp"

namespace fairrec {

using Edge = std::pair<int, int>;

// Undirected simple graph on vertices 0..n-1. Immutable after construction;
// edges are stored normalized (u < v) and sorted.
class Graph {
 public:
  Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    detail::require(n >= 1, "graph must have at least one vertex");
    for (auto &[u, v] : edges_) {
      if (u > v) std::swap(u, v);
      detail::require(u >= 0 && v < n, "edge endpoint out of range: " + std::to_string(u) +
                                           " " + std::to_string(v));
      detail::require(u != v, "self-loop at vertex " + std::to_string(u));
    }
    std::sort(edges_.begin(), edges_.end());
    detail::require(std::adjacent_find(edges_.begin(), edges_.end()) == edges_.end(),
                    "duplicate edge");
    adjacency_.resize(n_);
    for (const auto &[u, v] : edges_) {
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    for (auto &list : adjacency_) std::sort(list.begin(), list.end());
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge> &edges() const { return edges_; }
  const std::vector<int> &neighbors(int v) const { return adjacency_.at(v); }
  int degree(int v) const { return static_cast<int>(adjacency_.at(v).size()); }

  int max_degree() const {
    int best = 0;
    for (const auto &list : adjacency_) best = std::max(best, static_cast<int>(list.size()));
    return best;
  }

  std::vector<int> degrees() const {
    std::vector<int> out(n_);
    for (int v = 0; v < n_; ++v) out[v] = degree(v);
    return out;
  }

  bool has_edge(int u, int v) const {
    const auto &list = adjacency_.at(u);
    return std::binary_search(list.begin(), list.end(), v);
  }

  bool is_connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adjacency_[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    return reached == n_;
  }

  friend bool operator==(const Graph &a, const Graph &b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

namespace detail {

inline void require_connected(const Graph &g, const char *what) {
  if (!g.is_connected()) {
    throw StructuralError(std::string(what) + " requires a connected graph");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Graph families

// m x n lattice; vertex (i, j) has index i * n + j.
inline Graph grid(int m, int n) {
  detail::require(m >= 1 && n >= 1, "grid dimensions must be positive");
  detail::require(m * n >= 2, "grid needs at least two vertices");
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const int v = i * n + j;
      if (j + 1 < n) edges.emplace_back(v, v + 1);
      if (i + 1 < m) edges.emplace_back(v, v + n);
    }
  }
  return Graph(m * n, std::move(edges));
}

inline Graph complete(int n) {
  detail::require(n >= 2, "complete graph needs n >= 2");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph(n, std::move(edges));
}

// Vertex 0 is the hub.
inline Graph star(int n) {
  detail::require(n >= 2, "star graph needs n >= 2");
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) edges.emplace_back(0, v);
  return Graph(n, std::move(edges));
}

// (K_{n-t}^C + H_t^C)^C where H_t is t isolated vertices and + is disjoint
// union. The complement of K_{n-t}^C + K_t is the complete graph on the
// first n - t vertices joined to an independent set on the last t
// vertices. t = n - 1 is star(n) and t = 1 is complete(n).
inline Graph complement_join(int n, int t) {
  detail::require(n >= 2, "complement_join needs n >= 2");
  detail::require(t >= 1 && t <= n - 1, "complement_join needs 1 <= t <= n - 1");
  const int clique = n - t;
  std::vector<Edge> edges;
  for (int u = 0; u < clique; ++u)
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph(n, std::move(edges));
}

// G(n, r): each of the n(n-1)/2 pairs, visited in lexicographic order,
// is kept with probability r. May be disconnected.
inline Graph erdos_renyi(int n, double r, std::uint64_t seed) {
  detail::require(n >= 1, "erdos_renyi needs n >= 1");
  detail::require(r >= 0.0 && r <= 1.0, "edge probability must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.bernoulli(r)) edges.emplace_back(u, v);
  return Graph(n, std::move(edges));
}

// L = D - A, dense.
inline Eigen::MatrixXd laplacian(const Graph &g) {
  const int n = g.vertex_count();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto &[u, v] : g.edges()) {
    lap(u, v) = -1.0;
    lap(v, u) = -1.0;
    lap(u, u) += 1.0;
    lap(v, v) += 1.0;
  }
  return lap;
}

// ---------------------------------------------------------------------------
// Edge-list text format: "n m" then m lines "u v" with u < v.

inline void write_edge_list(std::ostream &out, const Graph &g) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const auto &[u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline Graph read_edge_list(std::istream &in) {
  long long n = 0;
  long long m = 0;
  if (!(in >> n >> m)) throw InvalidArgument("edge list: missing 'n m' header");
  detail::require(n >= 1 && m >= 0, "edge list: bad header");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u = 0;
    long long v = 0;
    if (!(in >> u >> v)) {
      throw InvalidArgument("edge list: expected " + std::to_string(m) + " edges, got " +
                            std::to_string(i));
    }
    detail::require(u >= 0 && v >= 0 && u < n && v < n, "edge list: endpoint out of range");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  std::string trailing;
  if (in >> trailing) throw InvalidArgument("edge list: trailing content '" + trailing + "'");
  return Graph(static_cast<int>(n), std::move(edges));
}

inline std::string to_edge_list(const Graph &g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

}  // namespace fairrec

#endif  // FAIRREC_GRAPH_HPP
