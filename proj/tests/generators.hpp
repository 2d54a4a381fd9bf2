#pragma once

// Seeded random instances for the property tests.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "netobs/graph.hpp"
#include "netobs/matching.hpp"
#include "netobs/structural.hpp"
#include "oracles.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<oracle::Edge> random_edges(Rng& rng, std::size_t n, double p,
                                              bool loops = false) {
  std::vector<oracle::Edge> out;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if ((loops || a != b) && coin(rng, p)) out.push_back({a, b});
  return out;
}

inline netobs::Digraph to_digraph(std::size_t n, const std::vector<oracle::Edge>& edges) {
  netobs::Digraph g(n);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

/// Integer weights in [0, wmax] so cost comparisons are exact.
inline std::vector<oracle::WeightedEdge> random_bipartite(Rng& rng, std::size_t left,
                                                          std::size_t right, double p,
                                                          int wmax) {
  std::vector<oracle::WeightedEdge> out;
  for (std::size_t l = 0; l < left; ++l)
    for (std::size_t r = 0; r < right; ++r)
      if (coin(rng, p))
        out.push_back({l, r, static_cast<double>(std::uniform_int_distribution<int>(0, wmax)(rng))});
  return out;
}

inline netobs::BipartiteGraph to_bipartite(std::size_t left, std::size_t right,
                                           const std::vector<oracle::WeightedEdge>& edges) {
  netobs::BipartiteGraph b(left, right);
  for (const auto& e : edges) b.add_edge(e.left, e.right, e.weight);
  return b;
}

/// Communication pattern with self-loops, a random Hamiltonian cycle (so the
/// graph is strongly connected) and extra links with probability p.
inline oracle::BoolMatrix strongly_connected_comm(Rng& rng, std::size_t m, double p) {
  oracle::BoolMatrix w(m, std::vector<char>(m, 0));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 0; k < m; ++k) {
    w[order[k]][order[k]] = 1;
    if (m > 1) w[order[(k + 1) % m]][order[k]] = 1;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (coin(rng, p)) w[i][j] = 1;
  return w;
}

inline oracle::PlainSystem random_system(Rng& rng, std::size_t n, std::size_t m, double pa,
                                         double pc, double pw) {
  oracle::PlainSystem s;
  s.n = n;
  s.m = m;
  s.a.assign(n, std::vector<char>(n, 0));
  s.c.assign(m, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s.a[i][j] = coin(rng, pa);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < n; ++j) s.c[k][j] = coin(rng, pc);
  s.w = strongly_connected_comm(rng, m, pw);
  return s;
}

/// Random system whose plant is structurally observable (per the oracle).
inline oracle::PlainSystem random_observable_system(Rng& rng, std::size_t nmax, std::size_t mmax) {
  for (;;) {
    std::size_t n = pick(rng, 1, nmax), m = pick(rng, 1, mmax);
    auto s = random_system(rng, n, m, 0.25, 0.25, 0.2);
    if (oracle::plant_observable(s)) return s;
  }
}

inline netobs::SystemSpec to_spec(const oracle::PlainSystem& p) {
  netobs::SystemSpec s;
  s.a_pattern = netobs::SparsityPattern(p.n, p.n);
  s.c_pattern = netobs::SparsityPattern(p.m, p.n);
  netobs::SparsityPattern w(p.m, p.m);
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = 0; j < p.n; ++j)
      if (p.a[i][j]) s.a_pattern.insert(i, j);
  for (std::size_t k = 0; k < p.m; ++k)
    for (std::size_t j = 0; j < p.n; ++j)
      if (p.c[k][j]) s.c_pattern.insert(k, j);
  for (std::size_t i = 0; i < p.m; ++i)
    for (std::size_t j = 0; j < p.m; ++j)
      if (p.w[i][j] || i == j) w.insert(i, j);
  s.comm = netobs::comm_from_pattern(w);
  return s;
}

inline oracle::PlainSystem from_spec(const netobs::SystemSpec& s) {
  oracle::PlainSystem p;
  p.n = s.n();
  p.m = s.m();
  p.a.assign(p.n, std::vector<char>(p.n, 0));
  p.c.assign(p.m, std::vector<char>(p.n, 0));
  p.w.assign(p.m, std::vector<char>(p.m, 0));
  for (auto [r, c] : s.a_pattern.nonzeros()) p.a[r][c] = 1;
  for (auto [r, c] : s.c_pattern.nonzeros()) p.c[r][c] = 1;
  for (const auto& e : s.comm.edges()) p.w[e.to][e.from] = 1;
  return p;
}

/// Nonzero values on a pattern, magnitudes in [0.5, 1.5] with random sign.
inline netobs::DenseMatrix random_values(Rng& rng, const netobs::SparsityPattern& p) {
  netobs::DenseMatrix m = netobs::DenseMatrix::Zero(static_cast<Eigen::Index>(p.rows()),
                                                    static_cast<Eigen::Index>(p.cols()));
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  for (auto [r, c] : p.nonzeros())
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
        (coin(rng, 0.5) ? 1.0 : -1.0) * mag(rng);
  return m;
}

}  // namespace gen
