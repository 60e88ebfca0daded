#pragma once

// Reference analyses compared against the ring service-curve method: Cruz's
// time stopping, a backlog-based ring bound, and an achievable lower bound.
// Every analysis returns one end-to-end delay per (f, n).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ringnc/curves.hpp"
#include "ringnc/linalg.hpp"
#include "ringnc/model.hpp"
#include "ringnc/pmoo.hpp"

namespace ringnc {

enum class MethodTag { RingPmoo, TimeStopping, BacklogBased, WcdLower };

inline constexpr MethodTag kAllMethods[] = {MethodTag::RingPmoo, MethodTag::TimeStopping, MethodTag::BacklogBased,
                                            MethodTag::WcdLower};

inline const char* to_string(MethodTag m) {
  switch (m) {
    case MethodTag::RingPmoo: return "RING_PMOO";
    case MethodTag::TimeStopping: return "TIME_STOPPING";
    case MethodTag::BacklogBased: return "BACKLOG_BASED";
    case MethodTag::WcdLower: return "WCD_LOWER";
  }
  return "?";
}

// Accepts the tag names case-insensitively, with '-' for '_'.
inline std::optional<MethodTag> parse_method(std::string_view text) {
  std::string norm;
  for (char c : text) norm.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (MethodTag m : kAllMethods)
    if (norm == to_string(m)) return m;
  return std::nullopt;
}

struct MethodBounds {
  MethodTag method{MethodTag::RingPmoo};
  bool feasible{true};
  std::string reason;
  pmoo::SubpathIndex index;
  std::vector<double> delay;  // per (f, n); empty when infeasible
  // Distance to the method's stability boundary: det(Id - A1 A2) for the
  // ring method and the lower bound, the burst system determinant for time
  // stopping, 1 - max utilization for the backlog bound.
  double margin{std::numeric_limits<double>::quiet_NaN()};

  // +inf when infeasible.
  double bound(std::size_t f, int n) const {
    return feasible ? delay[index(f, n)] : std::numeric_limits<double>::infinity();
  }
};

inline MethodBounds ring_pmoo_analysis(const RingNetwork& net, Policy policy) {
  MethodBounds out;
  out.method = MethodTag::RingPmoo;
  const auto sol = pmoo::solve_network(net, policy);
  out.index = sol.index;
  out.margin = sol.determinant;
  if (!sol.feasible()) {
    out.feasible = false;
    out.reason = sol.reason;
    return out;
  }
  out.delay.resize(sol.index.size());
  for (std::size_t r = 0; r < sol.index.size(); ++r) {
    const auto& key = sol.index.key(r);
    out.delay[r] = net.flow(key.flow).sigma0 / sol.rate[r] + sol.latency[r];
  }
  return out;
}

// Service-curve latency with the burst of every interferer entering f's source
// set to zero; interferers keep their initial bursts where they join.
inline MethodBounds wcd_lower_bound(const RingNetwork& net, Policy policy) {
  MethodBounds out;
  out.method = MethodTag::WcdLower;
  out.index = pmoo::SubpathIndex(net);
  try {
    const auto sys = pmoo::build_matrix_system(net, policy);
    out.delay.resize(sys.size());
    for (std::size_t r = 0; r < sys.size(); ++r)
      out.delay[r] = net.flow(sys.flow_of(r)).sigma0 / sys.residual_rates[r] + sys.c1[r];
    if (sys.size() > 0) out.margin = linalg::determinant(sys.reduced_system_matrix());
  } catch (const UnstableSubpath& e) {
    out.feasible = false;
    out.reason = e.what();
    out.delay.clear();
  }
  return out;
}

namespace detail {

inline int effective_priority(const Flow& f, Policy policy) { return policy == Policy::Arbitrary ? 0 : f.priority; }

}  // namespace detail

// Cruz's two-step method. Step one assumes finite entry bursts and bounds the
// delay d(k, p) of priority class p at node k as a FIFO aggregate behind the
// higher classes:
//   d(k, p) = T + (rho_H T + L_p + sum_{P(i) <= p} sigma_i^{entry k}) / (R - rho_H)
// with sigma_i^{entry k} = sigma_i^0 + rho_i * (sum of d over i's upstream hops).
// Step two solves that linear system; a singular matrix or a negative delay
// means the assumed bursts cannot exist. Each flow's per-node bound is then
// the horizontal deviation of its entry arrival curve against its left-over
// service curve at that node, and end-to-end bounds add them up.
inline MethodBounds time_stopping_analysis(const RingNetwork& net, Policy policy) {
  MethodBounds out;
  out.method = MethodTag::TimeStopping;
  out.index = pmoo::SubpathIndex(net);
  const int m = net.node_count();
  int levels = 1;
  for (const auto& f : net.flows()) levels = std::max(levels, detail::effective_priority(f, policy) + 1);
  const auto var = [levels](int k, int p) { return static_cast<std::size_t>((k - 1) * levels + p); };
  const std::size_t size = static_cast<std::size_t>(m * levels);

  auto fail = [&](std::string why) {
    out.feasible = false;
    out.reason = std::move(why);
    out.delay.clear();
    return out;
  };

  linalg::DenseMatrix a = linalg::DenseMatrix::identity(size);
  std::vector<double> rhs(size, 0.0);
  for (int k = 1; k <= m; ++k) {
    const Node& node = net.node(k);
    for (int p = 0; p < levels; ++p) {
      double rho_h = 0.0;
      double frame = 0.0;
      for (std::size_t i : net.crossing_flows(k)) {
        const int pi = detail::effective_priority(net.flow(i), policy);
        if (pi < p) rho_h += net.flow(i).rho;
        if (pi > p) frame = std::max(frame, net.flow(i).max_frame);
      }
      const double rate = node.rate - rho_h;
      if (!(rate > 0.0)) return fail("node " + std::to_string(k) + ": higher priority traffic exhausts the rate");
      const std::size_t row = var(k, p);
      rhs[row] = node.latency + (rho_h * node.latency + frame) / rate;
      for (std::size_t i : net.crossing_flows(k)) {
        const Flow& fi = net.flow(i);
        const int pi = detail::effective_priority(fi, policy);
        if (pi > p) continue;
        rhs[row] += fi.sigma0 / rate;
        const int d = net.depth(i, k);
        for (int h = 0; h < d; ++h) a(row, var(net.ring_add(fi.source, h), pi)) -= fi.rho / rate;
      }
    }
  }

  const linalg::LuDecomposition lu(a);
  out.margin = lu.determinant();
  if (lu.singular()) return fail("burst system is singular");
  const auto delay = lu.solve(rhs);
  for (double v : delay)
    if (!(v >= 0.0) || !std::isfinite(v)) return fail("burst system has a negative solution");

  // prefix[i][h]: sum of d over the first h hops of flow i.
  std::vector<std::vector<double>> prefix(net.flow_count());
  for (std::size_t i = 0; i < net.flow_count(); ++i) {
    const Flow& fi = net.flow(i);
    const int pi = detail::effective_priority(fi, policy);
    auto& pre = prefix[i];
    pre.assign(static_cast<std::size_t>(fi.hops) + 1, 0.0);
    for (int h = 0; h < fi.hops; ++h) pre[h + 1] = pre[h] + delay[var(net.ring_add(fi.source, h), pi)];
  }
  const auto entry_burst = [&](std::size_t i, int k) {
    return net.flow(i).sigma0 + net.flow(i).rho * prefix[i][static_cast<std::size_t>(net.depth(i, k))];
  };

  out.delay.resize(out.index.size());
  for (std::size_t f = 0; f < net.flow_count(); ++f) {
    const Flow& ff = net.flow(f);
    const int pf = detail::effective_priority(ff, policy);
    double total = 0.0;
    for (int n = 1; n <= ff.hops; ++n) {
      const int k = net.ring_add(ff.source, n - 1);
      double sigma = 0.0;
      double rho = 0.0;
      double frame = 0.0;
      for (std::size_t i : net.crossing_flows(k)) {
        if (i == f) continue;
        const int pi = detail::effective_priority(net.flow(i), policy);
        if (pi > pf) {
          frame = std::max(frame, net.flow(i).max_frame);
          continue;
        }
        sigma += entry_burst(i, k);
        rho += net.flow(i).rho;
      }
      const RateLatencyCurve node = net.node(k).service();
      if (!(rho < node.rate)) return fail("node " + std::to_string(k) + ": cross traffic exhausts the rate");
      const TokenBucketCurve cross{sigma, rho};
      const auto leftover = leftover_fp_single_node(node, std::span<const TokenBucketCurve>(&cross, 1), frame);
      if (!(ff.rho <= leftover.rate)) return fail("node " + std::to_string(k) + ": flow rate exceeds left-over rate");
      total += horizontal_deviation({entry_burst(f, k), ff.rho}, leftover);
      out.delay[out.index(f, n)] = total;
    }
  }
  return out;
}

// Circulation amplification of the per-node backlog: 1 + nu * M (M - 1),
// with nu the largest node utilization.
inline double backlog_amplification(const RingNetwork& net) {
  const double m = net.node_count();
  return 1.0 + net.max_utilization() * m * (m - 1.0);
}

// Per-node backlog bound B^k = (sum_{i at k} sigma_i^0 + R^k T^k) times the
// ring amplification; each node delays a bit by at most B^k / R^k and the
// end-to-end bound sums the crossed nodes.
inline MethodBounds backlog_based_analysis(const RingNetwork& net) {
  MethodBounds out;
  out.method = MethodTag::BacklogBased;
  out.index = pmoo::SubpathIndex(net);
  out.margin = 1.0 - net.max_utilization();
  const double amp = backlog_amplification(net);
  std::vector<double> node_delay(static_cast<std::size_t>(net.node_count()));
  for (int k = 1; k <= net.node_count(); ++k) {
    const Node& node = net.node(k);
    double bursts = 0.0;
    for (std::size_t i : net.crossing_flows(k)) bursts += net.flow(i).sigma0;
    node_delay[k - 1] = (bursts + node.rate * node.latency) * amp / node.rate;
  }
  out.delay.resize(out.index.size());
  for (std::size_t f = 0; f < net.flow_count(); ++f) {
    double total = 0.0;
    for (int n = 1; n <= net.flow(f).hops; ++n) {
      total += node_delay[net.ring_add(net.flow(f).source, n - 1) - 1];
      out.delay[out.index(f, n)] = total;
    }
  }
  return out;
}

inline MethodBounds analyze(const RingNetwork& net, MethodTag method, Policy policy) {
  switch (method) {
    case MethodTag::RingPmoo: return ring_pmoo_analysis(net, policy);
    case MethodTag::TimeStopping: return time_stopping_analysis(net, policy);
    case MethodTag::BacklogBased: return backlog_based_analysis(net);
    case MethodTag::WcdLower: return wcd_lower_bound(net, policy);
  }
  return {};
}

}  // namespace ringnc
