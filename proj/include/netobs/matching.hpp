#pragma once

// Bipartite matchings: maximum cardinality, minimum cost maximum matching
// (MCMM), exhaustive enumeration and the path/cycle reading of a matching.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netobs/graph.hpp"

namespace netobs {

/// Bipartite graph over index spaces [0, left_count) and [0, right_count).
/// Every edge carries a weight, 0 unless given.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(std::size_t left_count, std::size_t right_count)
      : right_count_(right_count), adj_(left_count), weight_(left_count) {}

  std::size_t left_count() const { return adj_.size(); }
  std::size_t right_count() const { return right_count_; }
  std::size_t edge_count() const { return edge_count_; }

  /// Set semantics: re-adding an edge overwrites its weight and returns false.
  bool add_edge(Vertex l, Vertex r, double weight = 0.0) {
    if (l >= left_count() || r >= right_count_)
      throw std::out_of_range("bipartite edge (" + std::to_string(l) + ", " + std::to_string(r) +
                              ") out of range");
    auto& nb = adj_[l];
    auto it = std::lower_bound(nb.begin(), nb.end(), r);
    auto pos = static_cast<std::size_t>(it - nb.begin());
    if (it != nb.end() && *it == r) {
      weight_[l][pos] = weight;
      return false;
    }
    nb.insert(it, r);
    weight_[l].insert(weight_[l].begin() + static_cast<std::ptrdiff_t>(pos), weight);
    ++edge_count_;
    return true;
  }

  const std::vector<Vertex>& neighbors(Vertex l) const { return adj_.at(l); }
  const std::vector<double>& neighbor_weights(Vertex l) const { return weight_.at(l); }

  bool has_edge(Vertex l, Vertex r) const {
    if (l >= left_count()) return false;
    return std::binary_search(adj_[l].begin(), adj_[l].end(), r);
  }

  double weight(Vertex l, Vertex r) const {
    const auto& nb = adj_.at(l);
    auto it = std::lower_bound(nb.begin(), nb.end(), r);
    if (it == nb.end() || *it != r)
      throw std::invalid_argument("no bipartite edge (" + std::to_string(l) + ", " +
                                  std::to_string(r) + ")");
    return weight_[l][static_cast<std::size_t>(it - nb.begin())];
  }

  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(edge_count_);
    for (Vertex l = 0; l < left_count(); ++l)
      for (Vertex r : adj_[l]) out.emplace_back(l, r);
    return out;
  }

 private:
  std::size_t right_count_ = 0;
  std::vector<std::vector<Vertex>> adj_;
  std::vector<std::vector<double>> weight_;
  std::size_t edge_count_ = 0;
};

struct Matching {
  /// (left, right) pairs sorted by left index.
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<Vertex> left_unmatched;
  double cost = 0.0;

  std::size_t size() const { return edges.size(); }

  std::optional<Vertex> right_of(Vertex l) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), std::pair<Vertex, Vertex>{l, 0});
    if (it != edges.end() && it->first == l) return it->second;
    return std::nullopt;
  }

  friend bool operator==(const Matching&, const Matching&) = default;
};

namespace detail {

inline constexpr Vertex npos = static_cast<Vertex>(-1);

inline Matching make_matching(const BipartiteGraph& b, const std::vector<Vertex>& mate_left) {
  Matching m;
  for (Vertex l = 0; l < b.left_count(); ++l) {
    if (mate_left[l] == npos) {
      m.left_unmatched.push_back(l);
    } else {
      m.edges.emplace_back(l, mate_left[l]);
      m.cost += b.weight(l, mate_left[l]);
    }
  }
  return m;
}

// Finds the maximum matching of `adj` whose list of "real" edges is
// lexicographically smallest. Left vertices are decided in ascending order:
// each one takes the smallest real edge that still admits a maximum matching,
// and otherwise gives up its real edges. Feasibility of a tentative choice is
// restored with a single augmenting path search (Berge).
class LexMatcher {
 public:
  LexMatcher(std::size_t right_count, std::vector<std::vector<Vertex>> adj,
             std::vector<std::vector<bool>> real)
      : adj_(std::move(adj)),
        real_(std::move(real)),
        mate_l_(adj_.size(), npos),
        mate_r_(right_count, npos),
        fixed_l_(adj_.size(), false),
        blocked_r_(right_count, false),
        visited_(right_count, false) {}

  std::vector<Vertex> solve(std::size_t decided_left_count) {
    while (augment_once()) {
    }
    target_ = current_size();
    for (Vertex l = 0; l < decided_left_count; ++l) {
      bool fixed = false;
      for (std::size_t k = 0; k < adj_[l].size() && !fixed; ++k)
        if (real_[l][k]) fixed = try_fix(l, adj_[l][k]);
      if (!fixed) drop_real_edges(l);
    }
    return mate_l_;
  }

 private:
  std::size_t current_size() const {
    return static_cast<std::size_t>(
        std::count_if(mate_l_.begin(), mate_l_.end(), [](Vertex r) { return r != npos; }));
  }

  bool dfs(Vertex u) {
    for (Vertex r : adj_[u]) {
      if (blocked_r_[r] || visited_[r]) continue;
      visited_[r] = true;
      Vertex w = mate_r_[r];
      if (w == npos || (!fixed_l_[w] && dfs(w))) {
        mate_l_[u] = r;
        mate_r_[r] = u;
        return true;
      }
    }
    return false;
  }

  bool augment_once() {
    std::fill(visited_.begin(), visited_.end(), false);
    for (Vertex u = 0; u < adj_.size(); ++u)
      if (!fixed_l_[u] && mate_l_[u] == npos && dfs(u)) return true;
    return false;
  }

  bool try_fix(Vertex l, Vertex r) {
    if (mate_l_[l] == r) {
      fixed_l_[l] = true;
      blocked_r_[r] = true;
      return true;
    }
    auto saved_l = mate_l_;
    auto saved_r = mate_r_;
    Vertex r0 = mate_l_[l];
    Vertex l1 = mate_r_[r];
    if (r0 != npos) mate_r_[r0] = npos;
    if (l1 != npos) mate_l_[l1] = npos;
    mate_l_[l] = r;
    mate_r_[r] = l;
    fixed_l_[l] = true;
    blocked_r_[r] = true;
    if (current_size() >= target_ || augment_once()) return true;
    mate_l_ = std::move(saved_l);
    mate_r_ = std::move(saved_r);
    fixed_l_[l] = false;
    blocked_r_[r] = false;
    return false;
  }

  void drop_real_edges(Vertex l) {
    std::vector<Vertex> kept;
    std::vector<bool> kept_real;
    for (std::size_t k = 0; k < adj_[l].size(); ++k) {
      if (real_[l][k]) continue;
      kept.push_back(adj_[l][k]);
      kept_real.push_back(false);
    }
    Vertex r = mate_l_[l];
    bool was_real = r != npos && !std::binary_search(kept.begin(), kept.end(), r);
    adj_[l] = std::move(kept);
    real_[l] = std::move(kept_real);
    if (was_real) {
      mate_l_[l] = npos;
      mate_r_[r] = npos;
      if (!augment_once())
        throw std::logic_error("lexicographic matching lost cardinality");
    }
  }

  std::vector<std::vector<Vertex>> adj_;
  std::vector<std::vector<bool>> real_;
  std::vector<Vertex> mate_l_, mate_r_;
  std::vector<bool> fixed_l_, blocked_r_, visited_;
  std::size_t target_ = 0;
};

struct AssignmentSolution {
  std::vector<std::size_t> row_to_col;
  std::vector<double> row_potential, col_potential;
  double total = 0.0;
};

// Hungarian algorithm with potentials on a dense square cost matrix. The
// potentials stay dual feasible: cost[i][j] - u[i] - v[j] >= 0.
inline AssignmentSolution solve_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  AssignmentSolution sol;
  sol.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) sol.row_to_col[p[j] - 1] = j - 1;
  sol.row_potential.assign(u.begin() + 1, u.end());
  sol.col_potential.assign(v.begin() + 1, v.end());
  for (std::size_t i = 0; i < n; ++i) sol.total += cost[i][sol.row_to_col[i]];
  return sol;
}

}  // namespace detail

/// Maximum cardinality matching. Among all maximum matchings the one with the
/// lexicographically smallest (left, right) edge list is returned.
inline Matching maximum_matching(const BipartiteGraph& b) {
  std::vector<std::vector<Vertex>> adj(b.left_count());
  std::vector<std::vector<bool>> real(b.left_count());
  for (Vertex l = 0; l < b.left_count(); ++l) {
    adj[l] = b.neighbors(l);
    real[l].assign(adj[l].size(), true);
  }
  detail::LexMatcher solver(b.right_count(), std::move(adj), std::move(real));
  auto mate = solver.solve(b.left_count());
  Matching m = detail::make_matching(b, mate);
  m.cost = 0.0;
  return m;
}

/// Minimum cost maximum matching: maximum cardinality first, then minimum
/// total weight, then lexicographically smallest edge list.
///
/// Solved as a square assignment problem in which every non-edge (and every
/// padding cell) costs a sentinel larger than any achievable weight sum, so
/// one more matched edge always beats any weight saving. The tie-break is
/// taken over the equality subgraph of the optimal dual, which contains
/// exactly the optimal assignments.
inline Matching min_cost_maximum_matching(const BipartiteGraph& b) {
  const std::size_t L = b.left_count(), R = b.right_count();
  double max_w = 0.0;
  for (Vertex l = 0; l < L; ++l) {
    for (double w : b.neighbor_weights(l)) {
      if (!std::isfinite(w) || w < 0.0)
        throw std::invalid_argument("matching weights must be finite and nonnegative, got " +
                                    std::to_string(w) + " on left vertex " + std::to_string(l));
      max_w = std::max(max_w, w);
    }
  }
  if (L == 0 || R == 0 || b.edge_count() == 0) return detail::make_matching(b, std::vector<Vertex>(L, detail::npos));

  const std::size_t N = std::max(L, R);
  const double sentinel = (max_w + 1.0) * static_cast<double>(N + 1);
  std::vector<std::vector<double>> cost(N, std::vector<double>(N, sentinel));
  for (Vertex l = 0; l < L; ++l) {
    const auto& nb = b.neighbors(l);
    const auto& wt = b.neighbor_weights(l);
    for (std::size_t k = 0; k < nb.size(); ++k) cost[l][nb[k]] = wt[k];
  }
  auto sol = detail::solve_assignment(cost);

  const double eps = 1e-9 * sentinel;
  std::vector<std::vector<Vertex>> adj(N);
  std::vector<std::vector<bool>> real(N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      double reduced = cost[i][j] - sol.row_potential[i] - sol.col_potential[j];
      if (reduced > eps) continue;
      adj[i].push_back(j);
      real[i].push_back(i < L && j < R && b.has_edge(i, j));
    }
  }
  detail::LexMatcher solver(N, std::move(adj), std::move(real));
  auto mate = solver.solve(L);

  std::vector<Vertex> mate_left(L, detail::npos);
  for (Vertex l = 0; l < L; ++l)
    if (mate[l] != detail::npos && mate[l] < R && b.has_edge(l, mate[l])) mate_left[l] = mate[l];
  Matching m = detail::make_matching(b, mate_left);

  double expected = sol.total - sentinel * static_cast<double>(N - m.size());
  if (std::abs(expected - m.cost) > eps)
    throw std::logic_error("MCMM tie-break drifted from the optimal assignment cost");
  return m;
}

struct MatchingEnumeration {
  std::vector<Matching> matchings;
  /// Set when more maximum matchings exist than the cap allowed.
  bool truncated = false;
};

/// Lists maximum matchings in lexicographic order, up to `cap` of them.
/// Exponential; intended as a test oracle on small graphs.
inline MatchingEnumeration enumerate_maximum_matchings(const BipartiteGraph& b, std::size_t cap) {
  MatchingEnumeration out;
  const std::size_t L = b.left_count();
  const std::size_t k = maximum_matching(b).size();
  std::vector<Vertex> mate(L, detail::npos);
  std::vector<bool> used(b.right_count(), false);
  bool stop = false;

  auto rec = [&](auto&& self, Vertex l, std::size_t matched) -> void {
    if (stop || matched + (L - l) < k) return;
    if (l == L) {
      if (out.matchings.size() == cap) {
        out.truncated = true;
        stop = true;
        return;
      }
      out.matchings.push_back(detail::make_matching(b, mate));
      return;
    }
    for (Vertex r : b.neighbors(l)) {
      if (used[r]) continue;
      used[r] = true;
      mate[l] = r;
      self(self, l + 1, matched + 1);
      mate[l] = detail::npos;
      used[r] = false;
      if (stop) return;
    }
    self(self, l + 1, matched);
  };
  rec(rec, 0, 0);
  return out;
}

/// Bipartite form of a digraph: both sides are copies of the vertex set and
/// (u, v) is an edge iff u -> v.
inline BipartiteGraph bipartite_of(const Digraph& g) {
  BipartiteGraph b(g.size(), g.size());
  for (const Arc& e : g.edges()) b.add_edge(e.from, e.to);
  return b;
}

struct MatchingDecomposition {
  /// Elementary paths, each ending at a left-unmatched vertex. A vertex with
  /// no matched edge at all forms a single-vertex path.
  std::vector<std::vector<Vertex>> paths;
  /// Cycles, each listed from its smallest vertex; a self-loop is {v}.
  std::vector<std::vector<Vertex>> cycles;
};

/// Reads a matching of `bipartite_of(g)` back as digraph edges and splits
/// them into vertex-disjoint paths and cycles.
inline MatchingDecomposition matching_decomposition(const Digraph& g, const Matching& m) {
  const std::size_t n = g.size();
  std::vector<Vertex> next(n, detail::npos), prev(n, detail::npos);
  for (auto [u, v] : m.edges) {
    if (u >= n || v >= n || !g.has_edge(u, v))
      throw std::invalid_argument("matching edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") is not an edge of the digraph");
    if (next[u] != detail::npos || prev[v] != detail::npos)
      throw std::invalid_argument("matching edges share a vertex at (" + std::to_string(u) + ", " +
                                  std::to_string(v) + ")");
    next[u] = v;
    prev[v] = u;
  }

  MatchingDecomposition out;
  std::vector<bool> seen(n, false);
  for (Vertex s = 0; s < n; ++s) {
    if (prev[s] != detail::npos) continue;
    std::vector<Vertex> path;
    for (Vertex v = s; v != detail::npos; v = next[v]) {
      seen[v] = true;
      path.push_back(v);
    }
    out.paths.push_back(std::move(path));
  }
  for (Vertex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<Vertex> cycle;
    for (Vertex v = s; !seen[v]; v = next[v]) {
      seen[v] = true;
      cycle.push_back(v);
    }
    out.cycles.push_back(std::move(cycle));
  }
  return out;
}

}  // namespace netobs
