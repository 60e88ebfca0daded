// ringnc: command-line front end.
//   analyze   --config <file> --method <tag|all> [--policy arbitrary|fp] [--format csv|json] [--out <file>] [--subpaths]
//   scenario  <1|2|3|4> --out <dir> [--format csv|json] [--all-flows]
//   stability --config <file> [--policy arbitrary|fp]
//   frontier  --method <tag> [--nodes M] [--step pct]
// Exit status: 0 success, 2 infeasible, 1 error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ringnc/ringnc.hpp"

namespace {

using namespace ringnc;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

const std::map<std::string, Policy> kPolicies{{"arbitrary", Policy::Arbitrary}, {"fp", Policy::FixedPriority}};
const std::map<std::string, ReportFormat> kFormats{{"csv", ReportFormat::Csv}, {"json", ReportFormat::Json}};

void print_utilization(const RingNetwork& net) {
  for (const auto& load : net.utilization_report())
    std::fprintf(stderr, "node %d utilization %.6f\n", load.node, load.utilization);
}

void write_rows(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << (format == ReportFormat::Csv ? to_csv(rows) : to_json_text(rows));
  } else {
    emit_report(rows, format, out);
  }
}

int run_analyze(const std::string& config, const std::string& method_text, Policy policy, ReportFormat format,
                const std::string& out, bool subpaths) {
  const RingNetwork net = load_network(config);
  print_utilization(net);
  std::vector<MethodTag> methods;
  if (method_text == "all") {
    methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
  } else {
    const auto tag = parse_method(method_text);
    if (!tag) throw ValidationError("unknown method '" + method_text + "'");
    methods.push_back(*tag);
  }

  std::vector<ReportRow> rows;
  bool all_feasible = true;
  for (MethodTag method : methods) {
    const auto bounds = analyze(net, method, policy);
    if (!bounds.feasible) {
      all_feasible = false;
      std::fprintf(stderr, "%s: infeasible: %s\n", to_string(method), bounds.reason.c_str());
    }
    for (std::size_t f = 0; f < net.flow_count(); ++f) {
      const Flow& flow = net.flow(f);
      for (int n = subpaths ? 1 : flow.hops; n <= flow.hops; ++n) {
        ReportRow r;
        r.method = method;
        r.scenario = 0;
        r.nodes = net.node_count();
        r.load_pct = net.max_utilization() * 100.0;
        r.burst_bytes = flow.sigma0 / 8.0;
        r.traffic_class = "P" + std::to_string(flow.priority);
        r.flow_id = flow.id;
        r.hops = n;
        r.delay_bound_s = bounds.bound(f, n);
        r.stable = bounds.feasible;
        r.det_margin = bounds.margin;
        rows.push_back(std::move(r));
      }
    }
  }
  write_rows(rows, format, out);
  return all_feasible ? kOk : kInfeasible;
}

int run_scenario_cmd(int id, const std::string& dir, ReportFormat format, bool all_flows) {
  auto cfg = default_scenario(id);
  cfg.all_flows = all_flows;
  const auto rows = run_scenario(cfg);
  std::filesystem::create_directories(dir);
  const std::string path =
      (std::filesystem::path(dir) / ("scenario" + std::to_string(id) + (format == ReportFormat::Csv ? ".csv" : ".json")))
          .string();
  emit_report(rows, format, path);
  std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), path.c_str());
  return kOk;
}

int run_stability(const std::string& config, Policy policy) {
  const RingNetwork net = load_network(config);
  print_utilization(net);
  const auto sol = pmoo::solve_network(net, policy);
  std::printf("verdict %s\n", pmoo::to_string(sol.verdict));
  std::printf("determinant %s\n", format_number(sol.determinant).c_str());
  std::printf("max_utilization %s\n", format_number(net.max_utilization()).c_str());
  if (!sol.reason.empty()) std::printf("reason %s\n", sol.reason.c_str());
  return sol.feasible() ? kOk : kInfeasible;
}

int run_frontier(const std::string& method_text, int nodes, double step) {
  const auto tag = parse_method(method_text);
  if (!tag) throw ValidationError("unknown method '" + method_text + "'");
  const auto fr = feasibility_frontier(*tag, nodes, step, 100.0, step);
  std::printf("method %s\n", to_string(*tag));
  std::printf("last_feasible_pct %s\n", format_number(fr.last_feasible_pct).c_str());
  std::printf("first_infeasible_pct %s\n", format_number(fr.first_infeasible_pct).c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case delay analysis for unidirectional rings"};
  app.require_subcommand(1);

  std::string config;
  std::string method = "all";
  std::string out;
  Policy policy = Policy::Arbitrary;
  ReportFormat format = ReportFormat::Csv;
  bool subpaths = false;
  bool all_flows = false;
  int scenario_id = 1;
  int nodes = 10;
  double step = 0.01;

  auto* analyze_cmd = app.add_subcommand("analyze", "Bound every flow of a network file");
  analyze_cmd->add_option("--config", config, "Network JSON file")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--method", method, "RING_PMOO, TIME_STOPPING, BACKLOG_BASED, WCD_LOWER or all");
  analyze_cmd->add_option("--policy", policy, "arbitrary or fp")->transform(CLI::CheckedTransformer(kPolicies));
  analyze_cmd->add_option("--format", format, "csv or json")->transform(CLI::CheckedTransformer(kFormats));
  analyze_cmd->add_option("--out", out, "Output file (stdout when omitted)");
  analyze_cmd->add_flag("--subpaths", subpaths, "Report every prefix of every flow");

  auto* scenario_cmd = app.add_subcommand("scenario", "Run one of the four evaluation sweeps");
  scenario_cmd->add_option("id", scenario_id, "Scenario 1-4")->required()->check(CLI::Range(1, 4));
  scenario_cmd->add_option("--out", out, "Output directory")->required();
  scenario_cmd->add_option("--format", format, "csv or json")->transform(CLI::CheckedTransformer(kFormats));
  scenario_cmd->add_flag("--all-flows", all_flows, "Report every flow instead of one per class");

  auto* stability_cmd = app.add_subcommand("stability", "Solvability of the ring system");
  stability_cmd->add_option("--config", config, "Network JSON file")->required()->check(CLI::ExistingFile);
  stability_cmd->add_option("--policy", policy, "arbitrary or fp")->transform(CLI::CheckedTransformer(kPolicies));

  auto* frontier_cmd = app.add_subcommand("frontier", "Highest feasible load of a broadcast ring");
  frontier_cmd->add_option("--method", method, "Method tag")->required();
  frontier_cmd->add_option("--nodes", nodes, "Ring size")->check(CLI::Range(2, 1000));
  frontier_cmd->add_option("--step", step, "Load step in percent")->check(CLI::Range(1e-6, 100.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*analyze_cmd) return run_analyze(config, method, policy, format, out, subpaths);
    if (*scenario_cmd) return run_scenario_cmd(scenario_id, out, format, all_flows);
    if (*stability_cmd) return run_stability(config, policy);
    if (*frontier_cmd) return run_frontier(method, nodes, step);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kError;
}
