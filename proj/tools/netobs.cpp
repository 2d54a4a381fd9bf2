#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "netobs/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Observability checks and communication link design for sensor networks"};
  app.set_version_flag("--version", std::string(netobs::kToolVersion));
  app.require_subcommand(1);

  netobs::CommandOptions opt;
  std::string mode = "binary", order = "asc";
  std::optional<std::string> out;
  std::uint64_t seed = 0;

  const std::map<std::string, std::string> help = {
      {"check", "structural and distributed-decentralized observability of a system file"},
      {"augment", "add communication links until every sensor can observe the network"},
      {"verify", "numeric check: random W(G), PBH test and batch reconstruction"},
      {"demo", "run a bundled example (fig1 or brain) against its recorded results"}};
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("target", opt.target, name == "demo" ? "example name" : "system file")
        ->required();
    sub->add_option("--mode", mode, "link weighting")
        ->check(CLI::IsMember({"binary", "cost"}));
    sub->add_option("--order", order, "sensor processing order")
        ->check(CLI::IsMember({"asc", "desc"}));
    sub->add_flag("--connect-first", opt.connect_first,
                  "make the communication graph strongly connected first");
    sub->add_option("--seed", seed, "seed for W(G) draws (default: NETOBS_SEED, then the file)");
    sub->add_option("--tol", opt.tol, "PBH tolerance before dimension scaling");
    sub->add_option("--trials", opt.trials, "number of W(G) draws");
    sub->add_option("--out", out, "write the report here instead of stdout");
    sub->add_flag("--json", opt.json, "JSON report");
    sub->add_option("--system-out", opt.system_out, "augment: write the augmented system file");
    sub->add_option("--data-dir", opt.data_dir, "demo: fixture directory");
    sub->callback([&, name = name, sub] {
      opt.command = name;
      if (sub->count("--seed") > 0) opt.seed = seed;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : netobs::kExitInput;
  }
  opt.mode = mode == "cost" ? netobs::Weighting::cost : netobs::Weighting::binary;
  opt.order = order == "desc" ? netobs::SensorOrder::descending : netobs::SensorOrder::ascending;

  netobs::CommandResult res = netobs::run_command(opt);
  if (!res.report.is_null()) {
    std::string text = netobs::render_report(res.report, opt.json);
    if (out) {
      std::ofstream f(*out, std::ios::binary);
      if (!f) {
        std::cerr << "error: cannot write " << *out << "\n";
        return netobs::kExitInput;
      }
      f << text;
    } else {
      std::cout << text;
    }
  }
  if (!res.error.empty()) std::cerr << "error: " << res.error << (res.error.back() == '\n' ? "" : "\n");
  return res.exit_code;
}
