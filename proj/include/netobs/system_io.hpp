#pragma once

// JSON system files. Indices in files are 1-based; matrices are dense row
// lists or {"nonzeros": [[row, col], ...]}. The communication matrix is the
// W(G) pattern: comm[i][j] = 1 means sensor j transmits to sensor i.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "netobs/error.hpp"
#include "netobs/structural.hpp"

namespace netobs {

inline constexpr const char* kSchemaVersion = "1";

struct CostUnit {
  std::string symbol = "c";
  /// Numeric value of one unit; costs in the file are multiples of it.
  double scale = 1.0;

  friend bool operator==(const CostUnit&, const CostUnit&) = default;
};

struct SystemFile {
  std::string schema_version = kSchemaVersion;
  std::string name;
  SystemSpec system;
  std::optional<std::uint64_t> seed;
  CostUnit cost_unit;
  /// Reference results used by `demo`; null when absent.
  nlohmann::json expected;

  friend bool operator==(const SystemFile& x, const SystemFile& y) {
    return x.schema_version == y.schema_version && x.name == y.name && x.system == y.system &&
           x.seed == y.seed && x.cost_unit == y.cost_unit && x.expected == y.expected;
  }
};

namespace detail {

inline std::string coord(const std::string& key, std::size_t r, std::size_t c) {
  return key + "[" + std::to_string(r + 1) + "][" + std::to_string(c + 1) + "]";
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::size_t read_dim(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw InputError(std::string(key) + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

inline DenseMatrix read_dense(const nlohmann::json& v, const std::string& key, std::size_t rows,
                              std::size_t cols) {
  if (!v.is_array() || v.size() != rows)
    throw InputError(key + ": expected " + std::to_string(rows) + " rows");
  DenseMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = v[r];
    if (!row.is_array() || row.size() != cols)
      throw InputError(key + "[" + std::to_string(r + 1) + "]: expected " + std::to_string(cols) +
                       " columns");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw InputError(coord(key, r, c) + ": expected a number");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return out;
}

inline SparsityPattern read_pattern(const nlohmann::json& v, const std::string& key,
                                    std::size_t rows, std::size_t cols) {
  SparsityPattern p(rows, cols);
  if (v.is_object()) {
    const auto& nz = v.find("nonzeros");
    if (nz == v.end() || !nz->is_array())
      throw InputError(key + ": object form needs a \"nonzeros\" list");
    for (std::size_t k = 0; k < nz->size(); ++k) {
      const auto& e = (*nz)[k];
      const std::string where = key + ".nonzeros[" + std::to_string(k + 1) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw InputError(where + ": expected [row, col]");
      long long r = e[0].get<long long>(), c = e[1].get<long long>();
      if (r < 1 || static_cast<std::size_t>(r) > rows || c < 1 || static_cast<std::size_t>(c) > cols)
        throw InputError(where + ": (" + std::to_string(r) + ", " + std::to_string(c) +
                         ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
      p.insert(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(c - 1));
    }
    return p;
  }
  DenseMatrix d = read_dense(v, key, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      double x = d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (x == 1.0)
        p.insert(r, c);
      else if (x != 0.0)
        throw InputError(coord(key, r, c) + ": pattern entries must be 0 or 1");
    }
  return p;
}

// Dense lists for small patterns, edge lists once they get large and sparse.
inline nlohmann::json write_pattern(const SparsityPattern& p) {
  if (p.rows() * p.cols() > 1024 && p.nnz() * 4 < p.rows() * p.cols()) {
    nlohmann::json nz = nlohmann::json::array();
    for (auto [r, c] : p.nonzeros()) nz.push_back({r + 1, c + 1});
    return {{"nonzeros", nz}};
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < p.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < p.cols(); ++c) row.push_back(p.contains(r, c) ? 1 : 0);
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json write_dense(const DenseMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double v = m(r, c);
      if (v == static_cast<double>(static_cast<long long>(v)))
        row.push_back(static_cast<long long>(v));
      else
        row.push_back(v);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

/// Parses and validates a system document. Costs of links that already exist
/// are normalized to zero before validation.
inline SystemFile system_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("system file must be a JSON object");
  SystemFile f;
  const auto& ver = detail::require(j, "schema_version");
  if (!ver.is_string() || ver.get<std::string>() != kSchemaVersion)
    throw InputError(std::string("schema_version: expected \"") + kSchemaVersion + "\"");
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) throw InputError("name: expected a string");
    f.name = it->get<std::string>();
  }
  const std::size_t n = detail::read_dim(j, "n"), m = detail::read_dim(j, "m");
  SystemSpec& s = f.system;
  s.a_pattern = detail::read_pattern(detail::require(j, "a"), "a", n, n);
  s.c_pattern = detail::read_pattern(detail::require(j, "c"), "c", m, n);
  s.comm = comm_from_pattern(detail::read_pattern(detail::require(j, "comm"), "comm", m, m));
  if (auto it = j.find("costs"); it != j.end()) s.costs = detail::read_dense(*it, "costs", m, m);
  if (auto it = j.find("a_values"); it != j.end())
    s.a_values = detail::read_dense(*it, "a_values", n, n);
  if (auto it = j.find("c_values"); it != j.end())
    s.c_values = detail::read_dense(*it, "c_values", m, n);
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw InputError("seed: expected a nonnegative integer");
    f.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("cost_unit"); it != j.end()) {
    if (!it->is_object()) throw InputError("cost_unit: expected an object");
    if (auto sym = it->find("symbol"); sym != it->end()) {
      if (!sym->is_string()) throw InputError("cost_unit.symbol: expected a string");
      f.cost_unit.symbol = sym->get<std::string>();
    }
    if (auto sc = it->find("scale"); sc != it->end()) {
      if (!sc->is_number() || !(sc->get<double>() > 0.0))
        throw InputError("cost_unit.scale: expected a positive number");
      f.cost_unit.scale = sc->get<double>();
    }
  }
  if (auto it = j.find("expected"); it != j.end()) f.expected = *it;

  // Sign errors are reported before normalization so they are not hidden on
  // existing links.
  if (s.costs)
    for (Eigen::Index r = 0; r < s.costs->rows(); ++r)
      for (Eigen::Index c = 0; c < s.costs->cols(); ++c)
        if ((*s.costs)(r, c) < 0.0)
          throw InputError(detail::coord("costs", static_cast<std::size_t>(r),
                                         static_cast<std::size_t>(c)) +
                           ": negative cost");
  zero_existing_link_costs(s);
  validate(s);
  return f;
}

inline SystemFile parse_system_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  return system_from_json(j);
}

inline SystemFile parse_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_system_text(buf.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline nlohmann::json system_to_json(const SystemFile& f, bool include_expected = true) {
  const SystemSpec& s = f.system;
  nlohmann::json j;
  j["schema_version"] = f.schema_version;
  if (!f.name.empty()) j["name"] = f.name;
  j["n"] = s.n();
  j["m"] = s.m();
  j["a"] = detail::write_pattern(s.a_pattern);
  j["c"] = detail::write_pattern(s.c_pattern);
  j["comm"] = detail::write_pattern(comm_pattern(s.comm));
  if (s.costs) j["costs"] = detail::write_dense(*s.costs);
  if (s.costs || f.cost_unit != CostUnit{})
    j["cost_unit"] = {{"symbol", f.cost_unit.symbol}, {"scale", f.cost_unit.scale}};
  if (s.a_values) j["a_values"] = detail::write_dense(*s.a_values);
  if (s.c_values) j["c_values"] = detail::write_dense(*s.c_values);
  if (f.seed) j["seed"] = *f.seed;
  if (include_expected && !f.expected.is_null()) j["expected"] = f.expected;
  return j;
}

inline std::string serialize_system(const SystemFile& f, bool include_expected = true) {
  return system_to_json(f, include_expected).dump(2) + "\n";
}

/// 64-bit FNV-1a, used to fingerprint inputs in reports.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace netobs
