#pragma once

// Directed graphs and strongly connected components.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace netobs {

using Vertex = std::size_t;

/// Directed edge `from -> to`.
struct Arc {
  Vertex from = 0;
  Vertex to = 0;

  friend auto operator<=>(const Arc&, const Arc&) = default;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Role of a vertex in the structural graphs: plant state (X), sensor state
/// (Z), output (Y) or slack output (S).
enum class VertexClass : std::uint8_t { state, sensor, output, slack };

inline const char* to_string(VertexClass c) {
  switch (c) {
    case VertexClass::state: return "x";
    case VertexClass::sensor: return "z";
    case VertexClass::output: return "y";
    case VertexClass::slack: return "s";
  }
  return "?";
}

/// Simple digraph with set semantics on edges. Adjacency lists are kept
/// sorted so that every traversal is deterministic.
///
/// For the state digraph the edge `i -> j` means state i enters the update
/// of state j. For the communication graph the edge `j -> i` means sensor j
/// transmits to sensor i (transmitter -> receiver).
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(std::size_t vertex_count)
      : out_(vertex_count), in_(vertex_count) {}

  std::size_t size() const { return out_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  /// Inserts `from -> to`; returns false if it was already present.
  bool add_edge(Vertex from, Vertex to) {
    check_vertex(from);
    check_vertex(to);
    auto& succ = out_[from];
    auto it = std::lower_bound(succ.begin(), succ.end(), to);
    if (it != succ.end() && *it == to) return false;
    succ.insert(it, to);
    auto& pred = in_[to];
    pred.insert(std::lower_bound(pred.begin(), pred.end(), from), from);
    ++edge_count_;
    return true;
  }

  bool has_edge(Vertex from, Vertex to) const {
    if (from >= size() || to >= size()) return false;
    return std::binary_search(out_[from].begin(), out_[from].end(), to);
  }

  const std::vector<Vertex>& successors(Vertex v) const {
    check_vertex(v);
    return out_[v];
  }
  const std::vector<Vertex>& predecessors(Vertex v) const {
    check_vertex(v);
    return in_[v];
  }

  /// All edges, sorted by (from, to).
  std::vector<Arc> edges() const {
    std::vector<Arc> result;
    result.reserve(edge_count_);
    for (Vertex u = 0; u < size(); ++u)
      for (Vertex v : out_[u]) result.push_back({u, v});
    return result;
  }

  void set_labels(std::vector<VertexClass> labels) {
    if (labels.size() != size())
      throw std::invalid_argument("vertex label count does not match graph size");
    labels_ = std::move(labels);
  }
  const std::optional<std::vector<VertexClass>>& labels() const { return labels_; }

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.out_ == b.out_;
  }

 private:
  void check_vertex(Vertex v) const {
    if (v >= size())
      throw std::out_of_range("vertex " + std::to_string(v) + " out of range for digraph of size " +
                              std::to_string(size()));
  }

  std::vector<std::vector<Vertex>> out_;
  std::vector<std::vector<Vertex>> in_;
  std::size_t edge_count_ = 0;
  std::optional<std::vector<VertexClass>> labels_;
};

/// Vertices reachable from any vertex in `roots` (roots included). When
/// `reverse` is set, edges are followed backwards, i.e. the result is the set
/// of vertices that can reach a root.
inline std::vector<bool> reachable(const Digraph& g, const std::vector<Vertex>& roots,
                                   bool reverse = false) {
  std::vector<bool> seen(g.size(), false);
  std::vector<Vertex> stack;
  for (Vertex r : roots) {
    if (!seen.at(r)) {
      seen[r] = true;
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (Vertex v : reverse ? g.predecessors(u) : g.successors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

struct SccDecomposition {
  /// Components in topological order of the condensation; each list sorted.
  std::vector<std::vector<Vertex>> components;
  std::vector<std::size_t> component_of;
  /// Condensation edges (component index pairs), sorted, no self pairs.
  std::vector<std::pair<std::size_t, std::size_t>> dag_edges;
  std::vector<std::size_t> sources;
  std::vector<std::size_t> sinks;

  std::size_t size() const { return components.size(); }
};

/// Tarjan's algorithm (iterative). Components are numbered so that every
/// condensation edge goes from a lower to a higher index.
inline SccDecomposition scc_decompose(const Digraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<Vertex> stack;
  std::vector<std::vector<Vertex>> found;  // reverse topological order
  std::size_t counter = 0;

  struct Frame {
    Vertex v;
    std::size_t next;
  };
  std::vector<Frame> call;

  for (Vertex root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = g.successors(f.v);
      if (f.next < succ.size()) {
        Vertex w = succ[f.next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      Vertex v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<Vertex> comp;
        Vertex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        found.push_back(std::move(comp));
      }
    }
  }

  SccDecomposition result;
  result.components.assign(found.rbegin(), found.rend());
  result.component_of.assign(n, 0);
  for (std::size_t c = 0; c < result.components.size(); ++c)
    for (Vertex v : result.components[c]) result.component_of[v] = c;

  for (const Arc& e : g.edges()) {
    std::size_t a = result.component_of[e.from], b = result.component_of[e.to];
    if (a != b) result.dag_edges.emplace_back(a, b);
  }
  std::sort(result.dag_edges.begin(), result.dag_edges.end());
  result.dag_edges.erase(std::unique(result.dag_edges.begin(), result.dag_edges.end()),
                         result.dag_edges.end());

  std::vector<bool> has_in(result.size(), false), has_out(result.size(), false);
  for (auto [a, b] : result.dag_edges) {
    has_out[a] = true;
    has_in[b] = true;
  }
  for (std::size_t c = 0; c < result.size(); ++c) {
    if (!has_in[c]) result.sources.push_back(c);
    if (!has_out[c]) result.sinks.push_back(c);
  }
  return result;
}

/// Vacuously true for graphs with at most one vertex.
inline bool is_strongly_connected(const Digraph& g) {
  if (g.size() <= 1) return true;
  auto fwd = reachable(g, {0});
  if (std::find(fwd.begin(), fwd.end(), false) != fwd.end()) return false;
  auto bwd = reachable(g, {0}, true);
  return std::find(bwd.begin(), bwd.end(), false) == bwd.end();
}

}  // namespace netobs
