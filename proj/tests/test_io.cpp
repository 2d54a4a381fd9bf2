#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "netobs/commands.hpp"
#include "netobs/system_io.hpp"

namespace {

std::string error_of(const std::string& text) {
  try {
    netobs::parse_system_text(text);
  } catch (const netobs::InputError& e) {
    return e.what();
  }
  return "";
}

const char* kTiny = R"({"schema_version": "1", "n": 2, "m": 2,
  "a": [[0, 1], [1, 0]], "c": [[1, 0], [0, 1]], "comm": [[1, 1], [1, 1]]})";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("netobs_test_" + name)).string();
}

netobs::CommandOptions opts(const std::string& command, const std::string& target) {
  netobs::CommandOptions o;
  o.command = command;
  o.target = target;
  return o;
}

}  // namespace

TEST(Parse, WorkedExampleFixture) {
  auto f = netobs::parse_system(fixtures::data_path("fig1.json"));
  EXPECT_EQ(f.system.n(), 5u);
  EXPECT_EQ(f.system.m(), 4u);
  EXPECT_EQ(f.system, fixtures::fig1());
  EXPECT_EQ(f.seed, std::optional<std::uint64_t>(7));
  EXPECT_TRUE(f.expected.is_object());
}

TEST(Parse, BrainFixtureNormalizesExistingLinkCosts) {
  auto f = netobs::parse_system(fixtures::data_path("brain.json"));
  ASSERT_TRUE(f.system.costs.has_value());
  EXPECT_EQ((*f.system.costs)(0, 4), 0.0);  // 5 -> 1 exists
  EXPECT_EQ((*f.system.costs)(3, 1), 3.0);  // 2 -> 4 absent
  EXPECT_EQ(f.system.n(), 34u);
  EXPECT_EQ(f.cost_unit.symbol, "c");
}

TEST(Parse, EdgeListForm) {
  auto f = netobs::parse_system_text(R"({"schema_version": "1", "n": 2, "m": 1,
    "a": {"nonzeros": [[2, 1]]}, "c": {"nonzeros": [[1, 2]]}, "comm": [[1]]})");
  EXPECT_TRUE(f.system.a_pattern.contains(1, 0));
  EXPECT_EQ(f.system.a_pattern.nnz(), 1u);
  EXPECT_TRUE(f.system.c_pattern.contains(0, 1));
}

TEST(Parse, ErrorMessages) {
  EXPECT_NE(error_of(R"({"schema_version": "1", "n": 1, "m": 2, "a": [[0]], "c": [[1], [1]],
    "comm": [[1, 0], [1, 0]]})")
                .find("self-loop required at sensor 2"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version": "1", "n": 1, "m": 2, "a": [[0]], "c": [[1], [1]],
    "comm": [[1, 0], [0, 1]], "costs": [[0, -1], [1, 0]]})")
                .find("costs[1][2]: negative cost"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version": "1", "n": 2, "m": 1, "a": [[0, 2], [0, 0]],
    "c": [[1, 0]], "comm": [[1]]})")
                .find("a[1][2]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version": "1", "n": 2, "m": 1, "a": [[0, 1]], "c": [[1, 0]],
    "comm": [[1]]})")
                .find("a: expected 2 rows"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version": "1", "n": 2, "m": 1, "a": {"nonzeros": [[3, 1]]},
    "c": [[1, 0]], "comm": [[1]]})")
                .find("a.nonzeros[1]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version": "2"})").find("schema_version"), std::string::npos);
  EXPECT_NE(error_of("{not json").find("malformed JSON"), std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version": "1", "n": 1})").find("missing field \"m\""),
            std::string::npos);
}

TEST(Parse, MissingFile) {
  EXPECT_THROW(netobs::parse_system("/nonexistent/netobs.json"), netobs::InputError);
}

TEST(RoundTrip, AllFixtures) {
  for (const char* name : {"fig1.json", "fig1_gstar.json", "identity_complete.json", "brain.json"}) {
    auto f = netobs::parse_system(fixtures::data_path(name));
    auto again = netobs::parse_system_text(netobs::serialize_system(f));
    EXPECT_EQ(f, again) << name;
    EXPECT_EQ(netobs::serialize_system(f), netobs::serialize_system(again)) << name;
  }
}

TEST(RoundTrip, NumericValuesAndSeed) {
  auto f = netobs::parse_system_text(kTiny);
  f.system.a_values = netobs::DenseMatrix::Zero(2, 2);
  (*f.system.a_values)(0, 1) = 0.25;
  (*f.system.a_values)(1, 0) = -3.0;
  f.system.c_values = f.system.c_pattern.to_dense();
  f.seed = 99;
  f.cost_unit = {"k", 2.5};
  auto again = netobs::parse_system_text(netobs::serialize_system(f));
  EXPECT_EQ(f, again);
}

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(netobs::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(netobs::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(netobs::fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Commands, CheckExitCodes) {
  EXPECT_EQ(netobs::run_command(opts("check", fixtures::data_path("fig1.json"))).exit_code, 1);
  EXPECT_EQ(netobs::run_command(opts("check", fixtures::data_path("fig1_gstar.json"))).exit_code, 0);
  EXPECT_EQ(netobs::run_command(opts("check", fixtures::data_path("identity_complete.json"))).exit_code, 0);
  auto bad = netobs::run_command(opts("check", "/nonexistent.json"));
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_FALSE(bad.error.empty());
}

TEST(Commands, CheckReportShowsDeficit) {
  auto r = netobs::run_command(opts("check", fixtures::data_path("fig1.json")));
  const auto& s1 = r.report["dd"]["per_sensor"][0];
  EXPECT_EQ(s1["sensor"], 1);
  EXPECT_EQ(s1["missing_links_from"], nlohmann::json::array({4}));
  EXPECT_EQ(r.report["structural"]["observable"], true);
}

TEST(Commands, AugmentWorkedExampleAndIdempotence) {
  auto o = opts("augment", fixtures::data_path("fig1.json"));
  o.system_out = temp_path("gstar.json");
  auto r = netobs::run_command(o);
  ASSERT_EQ(r.exit_code, 0) << r.error;
  EXPECT_EQ(r.report["augmentation"]["total_links"], 2);
  EXPECT_TRUE(r.report.contains("numeric"));
  EXPECT_EQ(r.report["dd"]["overall_ok"], true);
  auto again = netobs::run_command(opts("augment", *o.system_out));
  ASSERT_EQ(again.exit_code, 0) << again.error;
  EXPECT_EQ(again.report["augmentation"]["total_links"], 0);
  std::filesystem::remove(*o.system_out);
}

TEST(Commands, AugmentErrors) {
  auto o = opts("augment", fixtures::data_path("fig1.json"));
  o.mode = netobs::Weighting::cost;
  EXPECT_EQ(netobs::run_command(o).exit_code, 2);

  // Unobservable plant: exit 1 with the structural section still reported.
  std::string path = temp_path("unobs.json");
  std::ofstream(path) << R"({"schema_version": "1", "n": 2, "m": 1, "a": [[0, 0], [0, 0]],
    "c": [[1, 0]], "comm": [[1]]})";
  auto r = netobs::run_command(opts("augment", path));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.report["structural"]["observable"], false);
  std::filesystem::remove(path);

  // Disconnected communication graph needs --connect-first.
  std::ofstream(path) << R"({"schema_version": "1", "n": 1, "m": 2, "a": [[0]],
    "c": [[1], [1]], "comm": [[1, 0], [0, 1]]})";
  EXPECT_EQ(netobs::run_command(opts("augment", path)).exit_code, 2);
  auto c = opts("augment", path);
  c.connect_first = true;
  auto fixed = netobs::run_command(c);
  EXPECT_EQ(fixed.exit_code, 0) << fixed.error;
  EXPECT_EQ(fixed.report["augmentation"]["total_links"], 2);
  std::filesystem::remove(path);
}

TEST(Commands, VerifyExitCodesAndSeedFallback) {
  auto o = opts("verify", fixtures::data_path("fig1_gstar.json"));
  o.seed = 7;
  auto ok = netobs::run_command(o);
  EXPECT_EQ(ok.exit_code, 0);
  for (const auto& p : ok.report["numeric"]["per_sensor"])
    EXPECT_LT(p["max_reconstruction_error"].get<double>(), 1e-6);
  EXPECT_EQ(netobs::run_command(opts("verify", fixtures::data_path("fig1.json"))).exit_code, 1);

  ::setenv("NETOBS_SEED", "123", 1);
  auto env = netobs::run_command(opts("verify", fixtures::data_path("fig1_gstar.json")));
  EXPECT_EQ(env.report["provenance"]["seed"], 123);
  ::setenv("NETOBS_SEED", "abc", 1);
  EXPECT_EQ(netobs::run_command(opts("verify", fixtures::data_path("fig1_gstar.json"))).exit_code, 2);
  ::unsetenv("NETOBS_SEED");
  auto file = netobs::run_command(opts("verify", fixtures::data_path("fig1_gstar.json")));
  EXPECT_EQ(file.report["provenance"]["seed"], 7);

  auto bad = opts("verify", fixtures::data_path("fig1_gstar.json"));
  bad.trials = 0;
  EXPECT_EQ(netobs::run_command(bad).exit_code, 2);
}

TEST(Commands, VerifySingleStateSingleSensor) {
  std::string path = temp_path("one.json");
  std::ofstream(path) << R"({"schema_version": "1", "n": 1, "m": 1, "a": [[0]], "c": [[1]],
    "comm": [[1]]})";
  EXPECT_EQ(netobs::run_command(opts("verify", path)).exit_code, 0);
  std::filesystem::remove(path);
}

TEST(Commands, Demos) {
  auto fig = netobs::run_command(opts("demo", "fig1"));
  EXPECT_EQ(fig.exit_code, 0) << fig.error;
  EXPECT_EQ(fig.report["demo"]["ok"], true);
  auto brain = netobs::run_command(opts("demo", "brain"));
  EXPECT_EQ(brain.exit_code, 0) << brain.error;
  EXPECT_EQ(brain.report["augmentation"]["total_cost"], 3.0);
  EXPECT_EQ(netobs::run_command(opts("demo", "unknown")).exit_code, 2);
}

TEST(Commands, DemoMismatchIsReported) {
  auto dir = std::filesystem::temp_directory_path() / "netobs_demo_dir";
  std::filesystem::create_directories(dir);
  auto f = netobs::parse_system(fixtures::data_path("fig1.json"));
  f.expected["total_links"] = 3;
  std::ofstream(dir / "fig1.json") << netobs::serialize_system(f);
  auto o = opts("demo", "fig1");
  o.data_dir = dir.string();
  auto r = netobs::run_command(o);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.error.find("total_links"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Commands, ReportsAreByteIdentical) {
  for (const char* cmd : {"check", "augment", "verify"}) {
    auto o = opts(cmd, fixtures::data_path("fig1.json"));
    o.seed = 3;
    for (bool as_json : {true, false}) {
      auto a = netobs::render_report(netobs::run_command(o).report, as_json);
      auto b = netobs::render_report(netobs::run_command(o).report, as_json);
      EXPECT_EQ(a, b) << cmd;
    }
  }
}

TEST(Commands, ProvenanceHashesInputBytes) {
  auto r = netobs::run_command(opts("check", fixtures::data_path("identity_complete.json")));
  std::ifstream in(fixtures::data_path("identity_complete.json"), std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(netobs::fnv1a64(bytes)));
  EXPECT_EQ(r.report["provenance"]["input_hash"], std::string("fnv1a64:") + buf);
  EXPECT_EQ(r.report["provenance"]["tool_version"], netobs::kToolVersion);
}
