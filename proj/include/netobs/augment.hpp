#pragma once

// Communication link design: strong-connectivity repair of the sensor graph
// and per-sensor repair of the matching condition with slack outputs.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netobs/graph.hpp"
#include "netobs/matching.hpp"
#include "netobs/structural.hpp"

namespace netobs {

/// Closes a matching into one cycle. `m` matches positions of `j_set` (left)
/// to positions of `i_set` (right); its pairs, in ascending left order, are
/// (i_1, j_1), ..., (i_k, j_k). Returns (i_l, j_{l-1}) for l = 2..k followed
/// by (i_1, j_k).
inline std::vector<std::pair<Vertex, Vertex>> sequential_pairing(std::span<const Vertex> i_set,
                                                                 std::span<const Vertex> j_set,
                                                                 const Matching& m) {
  if (m.edges.empty()) throw std::invalid_argument("sequential_pairing: empty matching");
  std::vector<Vertex> is, js;
  for (auto [l, r] : m.edges) {
    if (l >= j_set.size() || r >= i_set.size())
      throw std::out_of_range("sequential_pairing: matching index outside the index sets");
    js.push_back(j_set[l]);
    is.push_back(i_set[r]);
  }
  const std::size_t k = is.size();
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(k);
  for (std::size_t l = 1; l < k; ++l) out.emplace_back(is[l], js[l - 1]);
  out.emplace_back(is[0], js[k - 1]);
  return out;
}

struct StrongConnectResult {
  std::vector<Arc> added;
  std::size_t alpha = 0;  // source components
  std::size_t beta = 0;   // sink components
};

namespace detail {

// Endpoint choice for a new edge from component `from` into component `to`.
// Without costs the lowest vertices are used; with costs the cheapest pair,
// where costs(receiver, transmitter) prices transmitter -> receiver.
inline Arc pick_edge(const std::vector<Vertex>& from, const std::vector<Vertex>& to,
                     const DenseMatrix* costs) {
  if (!costs) return {from.front(), to.front()};
  Arc best{from.front(), to.front()};
  double best_cost = std::numeric_limits<double>::infinity();
  for (Vertex a : from) {
    for (Vertex b : to) {
      double c = (*costs)(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
      if (c < best_cost) {
        best_cost = c;
        best = {a, b};
      }
    }
  }
  return best;
}

}  // namespace detail

/// Adds max(alpha, beta) edges that make `g` strongly connected (none when it
/// already is). Sources are matched to sinks they reach; the matched pairs are
/// chained into one cycle by sequential pairing, leftover sinks feed leftover
/// sources, and any surplus source or sink is attached to the extended
/// component. `costs`, when given, steers the endpoint choice inside each
/// component (see detail::pick_edge).
inline StrongConnectResult strongly_connect(const Digraph& g, const DenseMatrix* costs = nullptr) {
  SccDecomposition scc = scc_decompose(g);
  StrongConnectResult res;
  res.alpha = scc.sources.size();
  res.beta = scc.sinks.size();
  if (scc.size() <= 1) return res;

  Digraph cond(scc.size());
  for (auto [a, b] : scc.dag_edges) cond.add_edge(a, b);
  BipartiteGraph reach(scc.sources.size(), scc.sinks.size());
  for (std::size_t p = 0; p < scc.sources.size(); ++p) {
    auto seen = reachable(cond, {scc.sources[p]});
    for (std::size_t q = 0; q < scc.sinks.size(); ++q)
      if (seen[scc.sinks[q]]) reach.add_edge(p, q);
  }
  Matching mm = maximum_matching(reach);

  Digraph work = g;
  auto add = [&](Arc e) {
    if (!work.add_edge(e.from, e.to))
      throw std::logic_error("strongly_connect proposed an existing edge");
    res.added.push_back(e);
  };
  const auto& comps = scc.components;

  for (auto [sink, source] : sequential_pairing(scc.sinks, scc.sources, mm))
    add(detail::pick_edge(comps[sink], comps[source], costs));

  std::vector<bool> source_used(scc.sources.size(), false), sink_used(scc.sinks.size(), false);
  for (auto [p, q] : mm.edges) {
    source_used[p] = true;
    sink_used[q] = true;
  }
  std::vector<std::size_t> free_sources, free_sinks;
  for (std::size_t p = 0; p < scc.sources.size(); ++p)
    if (!source_used[p]) free_sources.push_back(scc.sources[p]);
  for (std::size_t q = 0; q < scc.sinks.size(); ++q)
    if (!sink_used[q]) free_sinks.push_back(scc.sinks[q]);

  const std::size_t paired = std::min(free_sources.size(), free_sinks.size());
  for (std::size_t k = 0; k < paired; ++k)
    add(detail::pick_edge(comps[free_sinks[k]], comps[free_sources[k]], costs));

  if (free_sources.size() != free_sinks.size()) {
    SccDecomposition now = scc_decompose(work);
    Vertex anchor = comps[scc.sources[mm.edges.front().first]].front();
    const std::vector<Vertex>& extended = now.components[now.component_of[anchor]];
    for (std::size_t k = paired; k < free_sources.size(); ++k)
      add(detail::pick_edge(extended, comps[free_sources[k]], costs));
    for (std::size_t k = paired; k < free_sinks.size(); ++k)
      add(detail::pick_edge(comps[free_sinks[k]], extended, costs));
  }

  if (!is_strongly_connected(work))
    throw std::logic_error("strongly_connect failed to produce a strongly connected graph");
  return res;
}

/// A communication link "transmitter -> receiver" added by the design.
struct AddedLink {
  std::size_t transmitter = 0;
  std::size_t receiver = 0;
  /// Sensor whose matching condition required the link; empty for links
  /// added to restore strong connectivity.
  std::optional<std::size_t> attributed_to;
  double cost = 0.0;

  friend bool operator==(const AddedLink&, const AddedLink&) = default;
};

struct AugmentationResult {
  std::vector<AddedLink> added_links;
  std::size_t total_links = 0;
  double total_cost = 0.0;
  Digraph final_comm;
  /// MCMM cost of each sensor at the moment it was processed.
  std::vector<double> sensor_mcmm_cost;
};

enum class SensorOrder { ascending, descending };

/// Links sensor i needs so that its slack MCMM has zero cost: one link j -> i
/// per slack edge (z_j, s_j) in the MCMM.
inline std::vector<AddedLink> augment_for_sensor(const SystemSpec& s, std::size_t i,
                                                 Weighting weighting, double* mcmm_cost = nullptr) {
  SlackBipartite sb = build_slack_bipartite(s, i, weighting);
  Matching mm = min_cost_maximum_matching(sb.graph);
  if (!mm.left_unmatched.empty())
    throw std::domain_error("sensor " + std::to_string(i + 1) +
                            ": augmented states cannot all be matched; the plant is structurally "
                            "unobservable and no communication link can fix it");
  if (mcmm_cost) *mcmm_cost = mm.cost;
  std::vector<AddedLink> links;
  for (auto [l, r] : mm.edges) {
    auto j = sb.slack_sensor_of(r);
    if (!j) continue;
    links.push_back({*j, i, i, sb.graph.weight(l, r)});
  }
  return links;
}

/// Returns a copy of `s` with the given links added to the communication
/// graph (their costs become zero).
inline SystemSpec with_links(const SystemSpec& s, const std::vector<AddedLink>& links) {
  SystemSpec out = s;
  for (const AddedLink& e : links) out.comm.add_edge(e.transmitter, e.receiver);
  zero_existing_link_costs(out);
  return out;
}

/// Processes the sensors one at a time, committing each sensor's links before
/// moving on. Requires a structurally observable plant and a strongly
/// connected communication graph.
inline AugmentationResult augment_all(const SystemSpec& s, Weighting weighting,
                                      SensorOrder order = SensorOrder::ascending) {
  validate(s);
  if (weighting == Weighting::cost && !s.costs)
    throw std::invalid_argument("cost weighting requires a cost matrix");
  if (!check_structural_observability(s.a_pattern, s.c_pattern).ok)
    throw std::domain_error(
        "plant is structurally unobservable; no set of communication links can fix it");
  if (!is_strongly_connected(s.comm))
    throw std::domain_error("communication graph is not strongly connected; connect it first");

  AugmentationResult res;
  res.sensor_mcmm_cost.assign(s.m(), 0.0);
  SystemSpec current = s;
  for (std::size_t k = 0; k < s.m(); ++k) {
    std::size_t i = order == SensorOrder::ascending ? k : s.m() - 1 - k;
    auto links = augment_for_sensor(current, i, weighting, &res.sensor_mcmm_cost[i]);
    current = with_links(current, links);
    res.added_links.insert(res.added_links.end(), links.begin(), links.end());
  }
  res.total_links = res.added_links.size();
  for (const AddedLink& e : res.added_links) res.total_cost += e.cost;
  res.final_comm = current.comm;
  return res;
}

struct DesignOptions {
  Weighting weighting = Weighting::binary;
  SensorOrder order = SensorOrder::ascending;
  /// Repair strong connectivity of the communication graph before the
  /// per-sensor pass.
  bool connect_first = false;
};

/// Full link design: optional connectivity repair followed by augment_all.
/// Connectivity links cost 1 each in binary mode and their Γ entry otherwise.
inline AugmentationResult design_network(const SystemSpec& s, const DesignOptions& opt) {
  validate(s);
  if (opt.weighting == Weighting::cost && !s.costs)
    throw std::invalid_argument("cost weighting requires a cost matrix");
  std::vector<AddedLink> connect_links;
  SystemSpec base = s;
  if (opt.connect_first && !is_strongly_connected(s.comm)) {
    const DenseMatrix* costs = opt.weighting == Weighting::cost ? &*s.costs : nullptr;
    for (const Arc& e : strongly_connect(s.comm, costs).added) {
      double c = costs ? (*costs)(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from))
                       : 1.0;
      connect_links.push_back({e.from, e.to, std::nullopt, c});
    }
    base = with_links(s, connect_links);
  }
  AugmentationResult res = augment_all(base, opt.weighting, opt.order);
  res.added_links.insert(res.added_links.begin(), connect_links.begin(), connect_links.end());
  res.total_links = res.added_links.size();
  res.total_cost = 0.0;
  for (const AddedLink& e : res.added_links) res.total_cost += e.cost;
  return res;
}

}  // namespace netobs
