#pragma once

// Structural (sparsity pattern) representations of the plant, the sensor
// network and the augmented system, plus the structural observability tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netobs/error.hpp"
#include "netobs/graph.hpp"
#include "netobs/matching.hpp"

namespace netobs {

using DenseMatrix = Eigen::MatrixXd;

/// Zero/nonzero mask of a rows x cols matrix.
class SparsityPattern {
 public:
  SparsityPattern() = default;
  SparsityPattern(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), mask_(rows * cols, false) {}

  static SparsityPattern identity(std::size_t n) {
    SparsityPattern p(n, n);
    for (std::size_t i = 0; i < n; ++i) p.insert(i, i);
    return p;
  }

  /// Pattern of a numeric matrix (exact zeros are structural zeros).
  static SparsityPattern of(const DenseMatrix& m) {
    SparsityPattern p(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (m(r, c) != 0.0) p.insert(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    return p;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  bool contains(std::size_t r, std::size_t c) const {
    return r < rows_ && c < cols_ && mask_[r * cols_ + c];
  }

  void insert(std::size_t r, std::size_t c) {
    if (r >= rows_ || c >= cols_)
      throw std::out_of_range("pattern position (" + std::to_string(r) + ", " + std::to_string(c) +
                              ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
    mask_[r * cols_ + c] = true;
  }

  /// Nonzero positions in row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> nonzeros() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (mask_[r * cols_ + c]) out.emplace_back(r, c);
    return out;
  }

  std::size_t nnz() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true)); }

  /// 0/1 numeric realization.
  DenseMatrix to_dense() const {
    DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (auto [r, c] : nonzeros()) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 1.0;
    return m;
  }

  friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<bool> mask_;
};

/// Plant, measurements and sensor network.
///
/// Row i of `c_pattern` is the measurement vector of sensor i. `comm` stores
/// the communication graph as transmitter -> receiver; `costs(i, j)` is the
/// cost of the link "sensor j transmits to sensor i".
struct SystemSpec {
  SparsityPattern a_pattern;
  SparsityPattern c_pattern;
  Digraph comm;
  std::optional<DenseMatrix> costs;
  std::optional<DenseMatrix> a_values;
  std::optional<DenseMatrix> c_values;

  std::size_t n() const { return a_pattern.rows(); }
  std::size_t m() const { return c_pattern.rows(); }

  friend bool operator==(const SystemSpec& x, const SystemSpec& y) {
    auto same = [](const std::optional<DenseMatrix>& p, const std::optional<DenseMatrix>& q) {
      if (p.has_value() != q.has_value()) return false;
      return !p || (p->rows() == q->rows() && p->cols() == q->cols() && *p == *q);
    };
    return x.a_pattern == y.a_pattern && x.c_pattern == y.c_pattern && x.comm == y.comm &&
           same(x.costs, y.costs) && same(x.a_values, y.a_values) && same(x.c_values, y.c_values);
  }
};

/// W(G) pattern -> communication digraph: W(i, j) != 0 means j -> i.
inline Digraph comm_from_pattern(const SparsityPattern& w) {
  if (!w.square()) throw std::invalid_argument("communication pattern must be square");
  Digraph g(w.rows());
  for (auto [i, j] : w.nonzeros()) g.add_edge(j, i);
  return g;
}

/// Communication digraph -> W(G) pattern.
inline SparsityPattern comm_pattern(const Digraph& comm) {
  SparsityPattern w(comm.size(), comm.size());
  for (const Arc& e : comm.edges()) w.insert(e.to, e.from);
  return w;
}

/// Sensors whose state sensor i reads (transmitters into i), i included.
inline std::vector<Vertex> in_neighbors(const SystemSpec& s, std::size_t i) {
  if (i >= s.m()) throw std::out_of_range("sensor index " + std::to_string(i) + " out of range");
  return s.comm.predecessors(i);
}

/// Sets the cost of every existing link (diagonal included) to zero.
inline void zero_existing_link_costs(SystemSpec& s) {
  if (!s.costs) return;
  for (const Arc& e : s.comm.edges())
    (*s.costs)(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) = 0.0;
}

/// Throws InputError describing the first violated invariant.
inline void validate(const SystemSpec& s) {
  const std::size_t n = s.n(), m = s.m();
  std::ostringstream err;
  if (!s.a_pattern.square()) throw InputError("a: plant pattern must be square");
  if (s.c_pattern.cols() != n)
    throw InputError("c: expected " + std::to_string(n) + " columns, got " +
                     std::to_string(s.c_pattern.cols()));
  if (s.comm.size() != m)
    throw InputError("comm: expected " + std::to_string(m) + " sensors, got " +
                     std::to_string(s.comm.size()));
  for (std::size_t k = 0; k < m; ++k)
    if (!s.comm.has_edge(k, k))
      throw InputError("comm[" + std::to_string(k + 1) + "][" + std::to_string(k + 1) +
                       "]: self-loop required at sensor " + std::to_string(k + 1));
  if (s.costs) {
    const DenseMatrix& g = *s.costs;
    if (static_cast<std::size_t>(g.rows()) != m || static_cast<std::size_t>(g.cols()) != m)
      throw InputError("costs: expected " + std::to_string(m) + "x" + std::to_string(m) + " matrix");
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        const std::string where =
            "costs[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]";
        double v = g(i, j);
        if (!std::isfinite(v)) throw InputError(where + ": cost must be finite");
        if (v < 0.0) throw InputError(where + ": negative cost " + std::to_string(v));
        bool exists = s.comm.has_edge(static_cast<Vertex>(j), static_cast<Vertex>(i));
        if (exists && v != 0.0)
          throw InputError(where + ": existing link must have zero cost");
        if (!exists && v == 0.0)
          throw InputError(where + ": absent link " + std::to_string(j + 1) + "->" +
                           std::to_string(i + 1) + " must have a positive cost");
      }
    }
  }
  auto check_values = [](const std::optional<DenseMatrix>& values, const SparsityPattern& p,
                         const char* name) {
    if (!values) return;
    if (static_cast<std::size_t>(values->rows()) != p.rows() ||
        static_cast<std::size_t>(values->cols()) != p.cols())
      throw InputError(std::string(name) + ": dimensions do not match the pattern");
    for (std::size_t r = 0; r < p.rows(); ++r) {
      for (std::size_t c = 0; c < p.cols(); ++c) {
        double v = (*values)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        const std::string where =
            std::string(name) + "[" + std::to_string(r + 1) + "][" + std::to_string(c + 1) + "]";
        if (!std::isfinite(v)) throw InputError(where + ": value must be finite");
        if ((v != 0.0) != p.contains(r, c))
          throw InputError(where + ": value does not match the sparsity pattern");
      }
    }
  };
  check_values(s.a_values, s.a_pattern, "a_values");
  check_values(s.c_values, s.c_pattern, "c_values");
}

/// D(A): edge x_i -> x_j iff A(j, i) != 0.
inline Digraph state_digraph(const SparsityPattern& a) {
  if (!a.square()) throw std::invalid_argument("state_digraph: pattern must be square");
  Digraph g(a.rows());
  for (auto [j, i] : a.nonzeros()) g.add_edge(i, j);
  g.set_labels(std::vector<VertexClass>(a.rows(), VertexClass::state));
  return g;
}

/// D(A, C): vertices [0, n) are states, [n, n + m) outputs; x_j -> y_i iff
/// C(i, j) != 0.
inline Digraph state_output_digraph(const SparsityPattern& a, const SparsityPattern& c) {
  if (!a.square() || c.cols() != a.rows())
    throw std::invalid_argument("state_output_digraph: dimension mismatch");
  const std::size_t n = a.rows(), m = c.rows();
  Digraph g(n + m);
  for (auto [j, i] : a.nonzeros()) g.add_edge(i, j);
  for (auto [i, j] : c.nonzeros()) g.add_edge(j, n + i);
  std::vector<VertexClass> labels(n, VertexClass::state);
  labels.resize(n + m, VertexClass::output);
  g.set_labels(std::move(labels));
  return g;
}

/// Pattern of [A 0; C W(G)] with the diagonal of W(G) forced.
inline SparsityPattern augmented_pattern(const SystemSpec& s) {
  const std::size_t n = s.n(), m = s.m();
  SparsityPattern p(n + m, n + m);
  for (auto [r, c] : s.a_pattern.nonzeros()) p.insert(r, c);
  for (auto [r, c] : s.c_pattern.nonzeros()) p.insert(n + r, c);
  for (const Arc& e : s.comm.edges()) p.insert(n + e.to, n + e.from);
  for (std::size_t k = 0; k < m; ++k) p.insert(n + k, n + k);
  return p;
}

/// D(Ã(G)): states are [0, n), sensor states [n, n + m).
inline Digraph augmented_digraph(const SystemSpec& s) {
  Digraph g = state_digraph(augmented_pattern(s));
  std::vector<VertexClass> labels(s.n(), VertexClass::state);
  labels.resize(s.n() + s.m(), VertexClass::sensor);
  g.set_labels(std::move(labels));
  return g;
}

/// C̃_i: the row c_i (zero on sensor columns) followed by one selector row per
/// in-neighbor of sensor i, in ascending sensor order.
inline SparsityPattern sensor_output_pattern(const SystemSpec& s, std::size_t i) {
  auto nbrs = in_neighbors(s, i);
  const std::size_t n = s.n();
  SparsityPattern p(1 + nbrs.size(), n + s.m());
  for (std::size_t c = 0; c < n; ++c)
    if (s.c_pattern.contains(i, c)) p.insert(0, c);
  for (std::size_t k = 0; k < nbrs.size(); ++k) p.insert(1 + k, n + nbrs[k]);
  return p;
}

struct StructuralObservability {
  bool ok = false;
  bool reachability_ok = false;
  bool matching_ok = false;
  /// States with no path to any output.
  std::vector<Vertex> unreached;
  /// Maximum matching of B(A, C): left = states, right = states then outputs.
  Matching witness_matching;
};

/// Every state reaches an output, and B(A, C) has a maximum matching with
/// no left-unmatched state.
inline StructuralObservability check_structural_observability(const SparsityPattern& a,
                                                              const SparsityPattern& c) {
  Digraph g = state_output_digraph(a, c);
  const std::size_t n = a.rows(), m = c.rows();
  std::vector<Vertex> outputs(m);
  for (std::size_t k = 0; k < m; ++k) outputs[k] = n + k;
  auto reaches = reachable(g, outputs, true);

  StructuralObservability res;
  for (Vertex v = 0; v < n; ++v)
    if (!reaches[v]) res.unreached.push_back(v);

  BipartiteGraph b(n, n + m);
  for (const Arc& e : g.edges()) b.add_edge(e.from, e.to);
  res.witness_matching = maximum_matching(b);
  res.reachability_ok = res.unreached.empty();
  res.matching_ok = res.witness_matching.left_unmatched.empty();
  res.ok = res.reachability_ok && res.matching_ok;
  return res;
}

enum class Weighting { binary, cost };

/// State-output bipartite graph of (Ã(G), C̃_i) extended with slack outputs.
///
/// Right-side layout: [0, n + m) augmented states, then the outputs of C̃_i
/// (row order of sensor_output_pattern), then one slack s_j per sensor j
/// outside the in-neighborhood of i, ascending in j.
struct SlackBipartite {
  BipartiteGraph graph;
  std::size_t sensor = 0;
  std::size_t output_offset = 0;
  std::size_t output_count = 0;
  std::size_t slack_offset = 0;
  std::vector<std::size_t> slack_sensor;
  std::vector<Vertex> in_neighbors;

  std::optional<std::size_t> slack_sensor_of(Vertex right) const {
    if (right < slack_offset || right >= slack_offset + slack_sensor.size()) return std::nullopt;
    return slack_sensor[right - slack_offset];
  }
};

inline SlackBipartite build_slack_bipartite(const SystemSpec& s, std::size_t i, Weighting weighting) {
  if (i >= s.m()) throw std::out_of_range("sensor index " + std::to_string(i) + " out of range");
  if (weighting == Weighting::cost && !s.costs)
    throw std::invalid_argument("cost weighting requires a cost matrix");
  const std::size_t n = s.n(), m = s.m(), v_count = n + m;

  SlackBipartite out;
  out.sensor = i;
  out.in_neighbors = in_neighbors(s, i);
  out.output_offset = v_count;
  out.output_count = 1 + out.in_neighbors.size();
  out.slack_offset = out.output_offset + out.output_count;
  for (std::size_t j = 0; j < m; ++j)
    if (!std::binary_search(out.in_neighbors.begin(), out.in_neighbors.end(), j))
      out.slack_sensor.push_back(j);

  out.graph = BipartiteGraph(v_count, out.slack_offset + out.slack_sensor.size());
  for (auto [r, c] : augmented_pattern(s).nonzeros()) out.graph.add_edge(c, r);
  for (std::size_t c = 0; c < n; ++c)
    if (s.c_pattern.contains(i, c)) out.graph.add_edge(c, out.output_offset);
  for (std::size_t k = 0; k < out.in_neighbors.size(); ++k)
    out.graph.add_edge(n + out.in_neighbors[k], out.output_offset + 1 + k);
  for (std::size_t k = 0; k < out.slack_sensor.size(); ++k) {
    std::size_t j = out.slack_sensor[k];
    double w = weighting == Weighting::binary
                   ? 1.0
                   : (*s.costs)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    out.graph.add_edge(n + j, out.slack_offset + k, w);
  }
  return out;
}

struct SensorDdStatus {
  std::size_t sensor = 0;
  /// z_i is reachable from every vertex of D(Ã(G)).
  bool condition_i_ok = false;
  /// A zero-cost MCMM of the slack graph leaves no augmented state unmatched.
  bool condition_ii_ok = false;
  /// Sensors j whose link j -> i the MCMM asks for.
  std::vector<std::size_t> deficit_links;
  double mcmm_cost = 0.0;
  /// Augmented states left unmatched even with slacks (only when the plant
  /// itself is structurally unobservable).
  std::vector<Vertex> uncovered;
};

struct DdReport {
  bool plant_observable = false;
  std::vector<SensorDdStatus> per_sensor;
  bool overall_ok = false;
  /// Empty when overall_ok.
  std::string reason;
};

inline SensorDdStatus check_sensor_dd(const SystemSpec& s, const Digraph& augmented,
                                      std::size_t i) {
  SensorDdStatus st;
  st.sensor = i;
  auto reaches = reachable(augmented, {s.n() + i}, true);
  st.condition_i_ok = std::all_of(reaches.begin(), reaches.end(), [](bool b) { return b; });

  SlackBipartite sb = build_slack_bipartite(s, i, Weighting::binary);
  Matching mm = min_cost_maximum_matching(sb.graph);
  st.mcmm_cost = mm.cost;
  st.uncovered = mm.left_unmatched;
  for (auto [l, r] : mm.edges)
    if (auto j = sb.slack_sensor_of(r)) st.deficit_links.push_back(*j);
  std::sort(st.deficit_links.begin(), st.deficit_links.end());
  st.condition_ii_ok = st.uncovered.empty() && st.deficit_links.empty();
  return st;
}

/// Distributed-decentralized structural observability: the two conditions
/// are evaluated for every sensor. A structurally unobservable plant is
/// flagged through `reason` rather than thrown.
inline DdReport check_dd_observability(const SystemSpec& s) {
  validate(s);
  DdReport rep;
  rep.plant_observable = check_structural_observability(s.a_pattern, s.c_pattern).ok;
  Digraph aug = augmented_digraph(s);
  bool all_i = true, all_ii = true;
  for (std::size_t i = 0; i < s.m(); ++i) {
    rep.per_sensor.push_back(check_sensor_dd(s, aug, i));
    all_i = all_i && rep.per_sensor.back().condition_i_ok;
    all_ii = all_ii && rep.per_sensor.back().condition_ii_ok;
  }
  rep.overall_ok = rep.plant_observable && all_i && all_ii;
  if (!rep.plant_observable)
    rep.reason = "plant unobservable";
  else if (!all_i)
    rep.reason = "sensor state not reachable from every vertex";
  else if (!all_ii)
    rep.reason = "left-unmatched vertices outside sensor in-neighborhood";
  return rep;
}

}  // namespace netobs
