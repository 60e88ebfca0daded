#pragma once

// Broadcast ring generator and the four evaluation sweeps.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringnc/baselines.hpp"
#include "ringnc/errors.hpp"
#include "ringnc/model.hpp"
#include "ringnc/report.hpp"

namespace ringnc {

struct TrafficClass {
  std::string name;
  double payload_bytes{0.0};
  double rate_kbps{0.0};
  int priority{0};
};

inline const TrafficClass kHrt{"HRT", 64.0, 80.0, 0};
inline const TrafficClass kSrt{"SRT", 128.0, 128.0, 1};
inline const TrafficClass kNrt{"NRT", 1024.0, 1000.0, 2};

inline constexpr double kDefaultLinkRate = 1e9;
inline constexpr double kDefaultNodeLatency = 600e-9;
inline constexpr double kDefaultOverheadBytes = 38.0;

struct BroadcastOptions {
  double overhead_bytes{kDefaultOverheadBytes};
  // Target per-node utilization in (0, 1]; every flow gets the same rho.
  std::optional<double> load;
  double rate{kDefaultLinkRate};
  double latency{kDefaultNodeLatency};
  // Replaces sigma0 of every flow (bits); the frame size is unaffected.
  std::optional<double> burst_bits;
};

// One full-loop flow per (node, class). Flow ids are (k-1)*C + j + 1 for node
// k and class j, so the node-1 flow of class j has index j.
inline RingNetwork build_broadcast_ring(int m, std::span<const TrafficClass> classes, const BroadcastOptions& opt = {}) {
  if (m < 2) throw DegenerateRing("broadcast ring needs at least 2 nodes, got " + std::to_string(m));
  if (classes.empty()) throw ValidationError("broadcast ring needs at least one traffic class");
  for (const auto& c : classes)
    if (!(c.payload_bytes > 0.0) || !(c.rate_kbps > 0.0))
      throw ValidationError("traffic class " + c.name + ": payload and rate must be > 0");
  const double c = static_cast<double>(classes.size());
  std::vector<Node> nodes(static_cast<std::size_t>(m), Node{opt.rate, opt.latency});
  std::vector<Flow> flows;
  for (int k = 1; k <= m; ++k) {
    for (std::size_t j = 0; j < classes.size(); ++j) {
      const auto& cls = classes[j];
      Flow f;
      f.id = (k - 1) * static_cast<int>(classes.size()) + static_cast<int>(j) + 1;
      f.source = k;
      f.hops = m;
      f.max_frame = (cls.payload_bytes + opt.overhead_bytes) * 8.0;
      f.sigma0 = opt.burst_bits ? *opt.burst_bits : f.max_frame;
      f.rho = opt.load ? *opt.load * opt.rate / (m * c) : cls.rate_kbps * 1000.0;
      f.priority = cls.priority;
      flows.push_back(f);
    }
  }
  return RingNetwork(std::move(nodes), std::move(flows));
}

struct ScenarioConfig {
  int id{1};
  std::vector<TrafficClass> classes;
  Policy policy{Policy::Arbitrary};
  std::vector<int> node_sweep;           // one entry when M is fixed
  std::vector<double> burst_bytes_sweep;  // scenario 1
  std::vector<double> load_pct_sweep;     // scenario 2
  double rate{kDefaultLinkRate};
  double latency{kDefaultNodeLatency};
  double overhead_bytes{kDefaultOverheadBytes};
  bool all_flows{false};
};

inline ScenarioConfig default_scenario(int id) {
  ScenarioConfig cfg;
  cfg.id = id;
  cfg.classes = {kSrt};
  switch (id) {
    case 1:
      cfg.node_sweep = {35};
      cfg.burst_bytes_sweep = {166, 300, 500, 700, 900, 1100, 1300, 1500};
      break;
    case 2:
      cfg.node_sweep = {10};
      for (int p = 10; p <= 100; p += 10) cfg.load_pct_sweep.push_back(p);
      break;
    case 3:
    case 4:
      for (int m = 10; m <= 100; m += 10) cfg.node_sweep.push_back(m);
      if (id == 4) {
        cfg.classes = {kHrt, kSrt, kNrt};
        cfg.policy = Policy::FixedPriority;
      }
      break;
    default: throw ValidationError("scenario id must be 1, 2, 3 or 4, got " + std::to_string(id));
  }
  return cfg;
}

namespace detail {

template <class T>
void check_sweep(const std::vector<T>& v, const char* name) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ValidationError(std::string(name) + ": sweep must be strictly increasing");
}

inline MethodBounds safe_analyze(const RingNetwork& net, MethodTag method, Policy policy) {
  try {
    return analyze(net, method, policy);
  } catch (const Error& e) {
    MethodBounds out;
    out.method = method;
    out.feasible = false;
    out.reason = e.what();
    return out;
  }
}

}  // namespace detail

inline void validate(const ScenarioConfig& cfg) {
  if (cfg.id < 1 || cfg.id > 4) throw ValidationError("scenario id must be 1, 2, 3 or 4");
  if (cfg.classes.empty()) throw ValidationError("scenario: no traffic classes");
  if (cfg.node_sweep.empty()) throw ValidationError("scenario: node sweep is empty");
  if (cfg.id == 1 && cfg.burst_bytes_sweep.empty()) throw ValidationError("scenario 1: burst sweep is empty");
  if (cfg.id == 2 && cfg.load_pct_sweep.empty()) throw ValidationError("scenario 2: load sweep is empty");
  detail::check_sweep(cfg.node_sweep, "node_sweep");
  detail::check_sweep(cfg.burst_bytes_sweep, "burst_bytes_sweep");
  detail::check_sweep(cfg.load_pct_sweep, "load_pct_sweep");
  for (double p : cfg.load_pct_sweep)
    if (!(p > 0.0 && p <= 100.0)) throw ValidationError("load_pct_sweep: values must lie in (0, 100]");
}

struct SweepPoint {
  int nodes{0};
  std::optional<double> load;        // fraction
  std::optional<double> burst_bits;
};

inline std::vector<SweepPoint> sweep_points(const ScenarioConfig& cfg) {
  std::vector<SweepPoint> pts;
  for (int m : cfg.node_sweep) {
    if (cfg.id == 1) {
      for (double b : cfg.burst_bytes_sweep) pts.push_back({m, std::nullopt, b * 8.0});
    } else if (cfg.id == 2) {
      for (double p : cfg.load_pct_sweep) pts.push_back({m, p / 100.0, std::nullopt});
    } else {
      pts.push_back({m, std::nullopt, std::nullopt});
    }
  }
  return pts;
}

inline RingNetwork build_point(const ScenarioConfig& cfg, const SweepPoint& pt) {
  BroadcastOptions opt;
  opt.overhead_bytes = cfg.overhead_bytes;
  opt.load = pt.load;
  opt.rate = cfg.rate;
  opt.latency = cfg.latency;
  opt.burst_bits = pt.burst_bits;
  return build_broadcast_ring(pt.nodes, cfg.classes, opt);
}

// Rows ordered by sweep point, then method, then flow. Failures at one point
// become infeasible rows; the sweep always completes.
inline std::vector<ReportRow> run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  std::vector<ReportRow> rows;
  for (const auto& pt : sweep_points(cfg)) {
    const RingNetwork net = build_point(cfg, pt);
    std::vector<std::size_t> reported;
    if (cfg.all_flows) {
      for (std::size_t i = 0; i < net.flow_count(); ++i) reported.push_back(i);
    } else {
      for (std::size_t j = 0; j < cfg.classes.size(); ++j) reported.push_back(j);
    }
    for (MethodTag method : kAllMethods) {
      const auto bounds = detail::safe_analyze(net, method, cfg.policy);
      for (std::size_t i : reported) {
        const Flow& f = net.flow(i);
        ReportRow r;
        r.method = method;
        r.scenario = cfg.id;
        r.nodes = pt.nodes;
        r.load_pct = net.max_utilization() * 100.0;
        r.burst_bytes = f.sigma0 / 8.0;
        r.traffic_class = cfg.classes[i % cfg.classes.size()].name;
        r.flow_id = f.id;
        r.hops = f.hops;
        r.stable = bounds.feasible;
        r.delay_bound_s = bounds.feasible ? bounds.bound(i, f.hops) : std::numeric_limits<double>::infinity();
        r.det_margin = bounds.margin;
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

struct Frontier {
  double last_feasible_pct{0.0};   // NaN when even the lower end fails
  double first_infeasible_pct{0.0};  // +inf when the upper end is feasible
};

// Bisection over integer multiples of step_pct in [lo_pct, hi_pct] on the
// scenario-2 family (single class, uniform rho), assuming feasibility is
// monotone in load.
inline Frontier feasibility_frontier(MethodTag method, int m, double lo_pct, double hi_pct, double step_pct,
                                     const TrafficClass& cls = kSrt, Policy policy = Policy::Arbitrary) {
  const std::vector<TrafficClass> classes{cls};
  const auto feasible = [&](long long n) {
    BroadcastOptions opt;
    opt.load = static_cast<double>(n) * step_pct / 100.0;
    return detail::safe_analyze(build_broadcast_ring(m, classes, opt), method, policy).feasible;
  };
  long long lo = std::llround(lo_pct / step_pct);
  long long hi = std::llround(hi_pct / step_pct);
  if (!feasible(lo)) return {std::numeric_limits<double>::quiet_NaN(), static_cast<double>(lo) * step_pct};
  if (feasible(hi)) return {static_cast<double>(hi) * step_pct, std::numeric_limits<double>::infinity()};
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    (feasible(mid) ? lo : hi) = mid;
  }
  return {static_cast<double>(lo) * step_pct, static_cast<double>(hi) * step_pct};
}

}  // namespace ringnc
