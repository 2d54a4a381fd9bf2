#pragma once

// The check / augment / verify / demo commands. Each returns a report
// document plus an exit code (0 success, 1 check failed, 2 input error);
// argument parsing lives in the executable.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netobs/augment.hpp"
#include "netobs/error.hpp"
#include "netobs/numeric.hpp"
#include "netobs/structural.hpp"
#include "netobs/system_io.hpp"

#ifndef NETOBS_DATA_DIR
#define NETOBS_DATA_DIR "data"
#endif

namespace netobs {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitInput = 2 };

struct CommandOptions {
  std::string command;
  /// File path, or the example name for `demo`.
  std::string target;
  Weighting mode = Weighting::binary;
  SensorOrder order = SensorOrder::ascending;
  bool connect_first = false;
  std::optional<std::uint64_t> seed;
  double tol = 1e-8;
  std::size_t trials = 1;
  bool json = false;
  /// Where `augment` writes the augmented system file.
  std::optional<std::string> system_out;
  /// Fixture directory for `demo`; falls back to NETOBS_DATA_DIR.
  std::optional<std::string> data_dir;
};

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  /// Diagnostic for stderr; empty on success.
  std::string error;
};

namespace report {

inline std::string vertex_label(Vertex v, std::size_t n) {
  return v < n ? "x" + std::to_string(v + 1) : "z" + std::to_string(v - n + 1);
}

inline nlohmann::json one_based(const std::vector<std::size_t>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t x : v) out.push_back(x + 1);
  return out;
}

inline nlohmann::json structural(const StructuralObservability& s) {
  return {{"observable", s.ok},
          {"reachability_ok", s.reachability_ok},
          {"matching_ok", s.matching_ok},
          {"matching_size", s.witness_matching.size()},
          {"unreached_states", one_based(s.unreached)},
          {"unmatched_states", one_based(s.witness_matching.left_unmatched)}};
}

inline nlohmann::json dd(const DdReport& r, const SystemSpec& s) {
  nlohmann::json sensors = nlohmann::json::array();
  for (const SensorDdStatus& st : r.per_sensor) {
    nlohmann::json uncovered = nlohmann::json::array();
    for (Vertex v : st.uncovered) uncovered.push_back(vertex_label(v, s.n()));
    sensors.push_back({{"sensor", st.sensor + 1},
                       {"in_neighbors", one_based(in_neighbors(s, st.sensor))},
                       {"condition_i", st.condition_i_ok},
                       {"condition_ii", st.condition_ii_ok},
                       {"missing_links_from", one_based(st.deficit_links)},
                       {"mcmm_cost", st.mcmm_cost},
                       {"uncovered", uncovered}});
  }
  return {{"overall_ok", r.overall_ok},
          {"plant_observable", r.plant_observable},
          {"reason", r.reason},
          {"per_sensor", sensors}};
}

inline nlohmann::json pattern_rows(const SparsityPattern& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < p.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < p.cols(); ++c) row.push_back(p.contains(r, c) ? 1 : 0);
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json augmentation(const AugmentationResult& a, Weighting mode,
                                   const CostUnit& unit) {
  nlohmann::json links = nlohmann::json::array();
  for (const AddedLink& e : a.added_links) {
    nlohmann::json l = {{"from", e.transmitter + 1}, {"to", e.receiver + 1}, {"cost", e.cost}};
    l["reason"] = e.attributed_to ? "sensor " + std::to_string(*e.attributed_to + 1)
                                  : std::string("connectivity");
    links.push_back(l);
  }
  nlohmann::json out = {{"mode", mode == Weighting::binary ? "binary" : "cost"},
                        {"added_links", links},
                        {"total_links", a.total_links},
                        {"total_cost", a.total_cost},
                        {"sensor_mcmm_cost", a.sensor_mcmm_cost},
                        {"final_comm", pattern_rows(comm_pattern(a.final_comm))}};
  if (mode == Weighting::cost) {
    out["cost_unit"] = unit.symbol;
    out["total_cost_value"] = a.total_cost * unit.scale;
  }
  return out;
}

inline nlohmann::json numeric(const NumericVerification& v) {
  nlohmann::json sensors = nlohmann::json::array();
  for (const SensorNumericSummary& p : v.per_sensor)
    sensors.push_back({{"sensor", p.sensor + 1},
                       {"observable_trials", p.observable_trials},
                       {"ambiguous_trials", p.ambiguous_trials},
                       {"min_pbh_margin", p.min_margin},
                       {"max_reconstruction_error", p.max_reconstruction_error}});
  nlohmann::json w = nlohmann::json::array();
  for (Eigen::Index r = 0; r < v.first_w.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < v.first_w.cols(); ++c) row.push_back(v.first_w(r, c));
    w.push_back(row);
  }
  return {{"all_observable", v.all_observable},
          {"seed", v.seed},
          {"trials", v.trials},
          {"horizon", v.horizon},
          {"tolerance", v.tolerance},
          {"w_first_trial", w},
          {"per_sensor", sensors}};
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Indented key/value rendering of a report; scalars use the JSON spelling so
// both forms print identical numbers.
inline void render_text(const nlohmann::json& j, std::ostream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  auto scalar_list = [](const nlohmann::json& arr) {
    for (const auto& x : arr)
      if (x.is_structured()) return false;
    return true;
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    os << pad << it.key() << ":";
    if (v.is_object()) {
      os << "\n";
      render_text(v, os, indent + 2);
    } else if (v.is_array() && !scalar_list(v)) {
      os << "\n";
      for (const auto& item : v) {
        if (item.is_object()) {
          os << pad << "  -\n";
          render_text(item, os, indent + 4);
        } else {
          os << pad << "  - " << item.dump() << "\n";
        }
      }
    } else if (v.is_string()) {
      os << " " << v.get<std::string>() << "\n";
    } else {
      os << " " << v.dump() << "\n";
    }
  }
}

}  // namespace report

/// JSON (`as_json`) or indented text rendering of a command report.
inline std::string render_report(const nlohmann::json& r, bool as_json) {
  if (as_json) return r.dump(2) + "\n";
  std::ostringstream os;
  report::render_text(r, os, 0);
  return os.str();
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::uint64_t parse_seed(const std::string& text, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (text.empty() || text[0] == '-') throw std::invalid_argument(text);
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw InputError(std::string(what) + ": expected a nonnegative integer, got \"" + text + "\"");
  return v;
}

// --seed, then NETOBS_SEED, then the file's seed, then 0.
inline std::uint64_t resolve_seed(const CommandOptions& o, const SystemFile& f) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("NETOBS_SEED"); env && *env)
    return parse_seed(env, "NETOBS_SEED");
  if (f.seed) return *f.seed;
  return 0;
}

inline nlohmann::json provenance(const CommandOptions& o, const std::string& input_name,
                                 const std::string& bytes, std::optional<std::uint64_t> seed) {
  nlohmann::json p = {{"command", o.command},
                      {"input", input_name},
                      {"input_hash", "fnv1a64:" + report::hex64(fnv1a64(bytes))},
                      {"tool_version", kToolVersion}};
  p["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return p;
}

struct LoadedInput {
  SystemFile file;
  std::string bytes;
  std::string name;
};

inline LoadedInput load(const std::string& path) {
  LoadedInput in;
  in.bytes = read_file(path);
  try {
    in.file = parse_system_text(in.bytes);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
  in.name = std::filesystem::path(path).filename().string();
  return in;
}

inline CommandResult run_check(const CommandOptions& o) {
  LoadedInput in = load(o.target);
  const SystemSpec& s = in.file.system;
  CommandResult res;
  DdReport dd = check_dd_observability(s);
  res.report["structural"] = report::structural(check_structural_observability(s.a_pattern, s.c_pattern));
  res.report["dd"] = report::dd(dd, s);
  res.report["provenance"] = provenance(o, in.name, in.bytes, std::nullopt);
  res.exit_code = dd.overall_ok ? kExitOk : kExitFailed;
  return res;
}

inline void require_costs(const CommandOptions& o, const SystemSpec& s) {
  if (o.mode == Weighting::cost && !s.costs)
    throw InputError("--mode cost needs a \"costs\" matrix in the input");
}

inline CommandResult run_augment(const CommandOptions& o) {
  LoadedInput in = load(o.target);
  const SystemSpec& s = in.file.system;
  require_costs(o, s);
  CommandResult res;
  StructuralObservability plant = check_structural_observability(s.a_pattern, s.c_pattern);
  res.report["structural"] = report::structural(plant);
  if (!plant.ok) {
    res.report["provenance"] = provenance(o, in.name, in.bytes, std::nullopt);
    res.exit_code = kExitFailed;
    res.error = "plant is structurally unobservable; no set of communication links can fix it";
    return res;
  }
  if (!o.connect_first && !is_strongly_connected(s.comm))
    throw InputError("communication graph is not strongly connected; rerun with --connect-first");

  AugmentationResult aug = design_network(s, {o.mode, o.order, o.connect_first});
  SystemFile out = in.file;
  out.system.comm = aug.final_comm;
  zero_existing_link_costs(out.system);
  out.expected = nullptr;
  DdReport after = check_dd_observability(out.system);
  res.report["augmentation"] = report::augmentation(aug, o.mode, in.file.cost_unit);
  res.report["dd"] = report::dd(after, out.system);

  std::optional<std::uint64_t> seed;
  bool numeric_ok = true;
  if (after.overall_ok) {
    seed = resolve_seed(o, in.file);
    NumericVerification nv = verify_numeric(out.system, *seed, o.trials, o.tol);
    res.report["numeric"] = report::numeric(nv);
    numeric_ok = nv.all_observable;
  }
  res.report["augmented_system"] = system_to_json(out, false);
  res.report["provenance"] = provenance(o, in.name, in.bytes, seed);
  if (o.system_out) {
    std::ofstream f(*o.system_out, std::ios::binary);
    if (!f) throw InputError("cannot write " + *o.system_out);
    f << serialize_system(out, false);
  }
  res.exit_code = after.overall_ok && numeric_ok ? kExitOk : kExitFailed;
  return res;
}

inline CommandResult run_verify(const CommandOptions& o) {
  LoadedInput in = load(o.target);
  CommandResult res;
  const std::uint64_t seed = resolve_seed(o, in.file);
  NumericVerification nv = verify_numeric(in.file.system, seed, o.trials, o.tol);
  res.report["numeric"] = report::numeric(nv);
  res.report["provenance"] = provenance(o, in.name, in.bytes, seed);
  res.exit_code = nv.all_observable ? kExitOk : kExitFailed;
  return res;
}

struct DemoCheck {
  nlohmann::json checks = nlohmann::json::array();
  bool ok = true;

  void expect(const std::string& name, const nlohmann::json& expected,
              const nlohmann::json& actual) {
    bool same = expected == actual;
    checks.push_back({{"name", name}, {"expected", expected}, {"actual", actual}, {"ok", same}});
    ok = ok && same;
  }
};

inline CommandResult run_demo(const CommandOptions& o) {
  if (o.target != "fig1" && o.target != "brain")
    throw InputError("unknown demo \"" + o.target + "\" (expected fig1 or brain)");
  std::string dir = NETOBS_DATA_DIR;
  if (const char* env = std::getenv("NETOBS_DATA_DIR"); env && *env) dir = env;
  if (o.data_dir) dir = *o.data_dir;
  LoadedInput in = load((std::filesystem::path(dir) / (o.target + ".json")).string());
  const SystemFile& f = in.file;
  const SystemSpec& s = f.system;
  const nlohmann::json& exp = f.expected;
  if (!exp.is_object()) throw InputError(in.name + ": no \"expected\" block");

  Weighting mode = exp.value("mode", "binary") == "cost" ? Weighting::cost : Weighting::binary;
  StructuralObservability plant = check_structural_observability(s.a_pattern, s.c_pattern);
  DdReport before = check_dd_observability(s);
  AugmentationResult aug = augment_all(s, mode, SensorOrder::ascending);
  SystemSpec gstar = s;
  gstar.comm = aug.final_comm;
  zero_existing_link_costs(gstar);
  DdReport after = check_dd_observability(gstar);
  const std::uint64_t seed = resolve_seed(o, f);
  NumericVerification nv = verify_numeric(gstar, seed, o.trials, o.tol);

  DemoCheck dc;
  nlohmann::json links = nlohmann::json::array();
  for (const AddedLink& e : aug.added_links) links.push_back({e.transmitter + 1, e.receiver + 1});
  nlohmann::json deficits = nlohmann::json::array();
  for (const SensorDdStatus& st : before.per_sensor) deficits.push_back(report::one_based(st.deficit_links));
  if (exp.contains("plant_observable")) dc.expect("plant_observable", exp["plant_observable"], plant.ok);
  if (exp.contains("initially_dd_observable"))
    dc.expect("initially_dd_observable", exp["initially_dd_observable"], before.overall_ok);
  if (exp.contains("missing_links_from")) dc.expect("missing_links_from", exp["missing_links_from"], deficits);
  if (exp.contains("added_links")) dc.expect("added_links", exp["added_links"], links);
  if (exp.contains("total_links")) dc.expect("total_links", exp["total_links"], aug.total_links);
  if (exp.contains("total_cost")) dc.expect("total_cost", exp["total_cost"], aug.total_cost);
  if (exp.contains("final_comm"))
    dc.expect("final_comm", exp["final_comm"], report::pattern_rows(comm_pattern(aug.final_comm)));
  dc.expect("dd_observable_after", true, after.overall_ok);
  dc.expect("numeric_all_observable", true, nv.all_observable);

  CommandResult res;
  res.report["demo"] = {{"name", o.target}, {"ok", dc.ok}, {"checks", dc.checks}};
  res.report["structural"] = report::structural(plant);
  res.report["augmentation"] = report::augmentation(aug, mode, f.cost_unit);
  res.report["dd"] = report::dd(after, gstar);
  res.report["numeric"] = report::numeric(nv);
  res.report["provenance"] = provenance(o, in.name, in.bytes, seed);
  res.exit_code = dc.ok ? kExitOk : kExitFailed;
  if (!dc.ok) {
    std::ostringstream diff;
    for (const auto& c : dc.checks)
      if (!c["ok"].get<bool>())
        diff << "mismatch in " << c["name"].get<std::string>() << ": expected "
             << c["expected"].dump() << ", got " << c["actual"].dump() << "\n";
    res.error = diff.str();
  }
  return res;
}

}  // namespace detail

/// Runs one command. Input problems become exit code 2 with the message in
/// `error`; failed checks and unfixable systems become exit code 1.
inline CommandResult run_command(const CommandOptions& o) {
  try {
    if (o.trials == 0) throw InputError("--trials must be at least 1");
    if (!(o.tol > 0.0)) throw InputError("--tol must be positive");
    if (o.command == "check") return detail::run_check(o);
    if (o.command == "augment") return detail::run_augment(o);
    if (o.command == "verify") return detail::run_verify(o);
    if (o.command == "demo") return detail::run_demo(o);
    throw InputError("unknown command \"" + o.command + "\"");
  } catch (const InputError& e) {
    return {kExitInput, nullptr, e.what()};
  } catch (const std::invalid_argument& e) {
    return {kExitInput, nullptr, e.what()};
  } catch (const std::domain_error& e) {
    return {kExitFailed, nullptr, e.what()};
  } catch (const std::runtime_error& e) {
    return {kExitFailed, nullptr, e.what()};
  }
}

}  // namespace netobs
