#pragma once

// Oracles and instance generators shared by the unit tests and the acceptance
// binary. Generators draw from std::mt19937_64 with explicit seeds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "ringnc/ringnc.hpp"

namespace ringnc::testing {

// |a - b| <= tol * max(|a|, |b|).
inline bool rel_close(double a, double b, double tol = 1e-9) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 gen_;
};

// ---------- curve oracles on uniform grids ----------

// Candidate times: a uniform grid of `steps` intervals on [0, horizon] plus
// every breakpoint of either curve.
inline std::vector<double> grid_times(const PiecewiseLinearCurve& a, const PiecewiseLinearCurve& b, double horizon,
                                      int steps) {
  std::vector<double> ts;
  for (int i = 0; i <= steps; ++i) ts.push_back(horizon * i / steps);
  for (const auto& p : a.breakpoints()) ts.push_back(p.time);
  for (const auto& p : b.breakpoints()) ts.push_back(p.time);
  std::sort(ts.begin(), ts.end());
  return ts;
}

// Pseudo-inverse inf{s >= 0 : beta(s) >= y} by bisection.
inline double pseudo_inverse(const PiecewiseLinearCurve& beta, double y) {
  if (y <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (beta(hi) < y) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (beta(mid) >= y ? hi : lo) = mid;
  }
  return hi;
}

// sup over the grid of the horizontal distance; the arrival is taken at its
// right limit so the jump at 0 counts.
inline double grid_horizontal_deviation(const PiecewiseLinearCurve& alpha, const PiecewiseLinearCurve& beta,
                                        double horizon, int steps = 20000) {
  double best = 0.0;
  for (double t : grid_times(alpha, beta, horizon, steps))
    best = std::max(best, pseudo_inverse(beta, alpha.right_limit(t)) - t);
  return best;
}

inline double grid_vertical_deviation(const PiecewiseLinearCurve& alpha, const PiecewiseLinearCurve& beta,
                                      double horizon, int steps = 20000) {
  double best = 0.0;
  for (double t : grid_times(alpha, beta, horizon, steps)) best = std::max(best, alpha.right_limit(t) - beta(t));
  return best;
}

// (b1 (x) b2)(t) = inf_{0 <= s <= t} b1(s) + b2(t - s) over a grid of s that
// includes the kinks of both terms.
inline double grid_convolution_at(const PiecewiseLinearCurve& b1, const PiecewiseLinearCurve& b2, double t,
                                  int steps = 2000) {
  std::vector<double> ss;
  for (int i = 0; i <= steps; ++i) ss.push_back(t * i / steps);
  for (const auto& p : b1.breakpoints())
    if (p.time <= t) ss.push_back(p.time);
  for (const auto& p : b2.breakpoints())
    if (p.time <= t) ss.push_back(t - p.time);
  double best = std::numeric_limits<double>::infinity();
  for (double s : ss) best = std::min(best, b1(s) + b2(t - s));
  return best;
}

// (a (/) b)(t) = sup_{u >= 0} a(t + u) - b(u), u on a grid over [0, horizon].
inline double grid_deconvolution_at(const PiecewiseLinearCurve& a, const PiecewiseLinearCurve& b, double t,
                                    double horizon, int steps = 2000) {
  std::vector<double> us;
  for (int i = 0; i <= steps; ++i) us.push_back(horizon * i / steps);
  for (const auto& p : b.breakpoints()) us.push_back(p.time);
  double best = -std::numeric_limits<double>::infinity();
  for (double u : us) best = std::max(best, a.right_limit(t + u) - b(u));
  return best;
}

// Non-decreasing closure of [beta(t) - load(t)]^+ evaluated at t by scanning a grid.
inline double grid_leftover_at(const PiecewiseLinearCurve& beta, const std::vector<PiecewiseLinearCurve>& loads,
                               double extra, double t, int steps = 2000) {
  double best = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double s = t * i / steps;
    double v = beta(s) - extra;
    for (const auto& l : loads) v -= l.right_limit(s);
    best = std::max(best, v);
  }
  return best;
}

// ---------- ring model oracles ----------

// K_f(n) by enumeration over nodes, without using interference_set.
inline std::set<std::size_t> brute_interference(const RingNetwork& net, std::size_t f, int n) {
  std::set<std::size_t> out;
  for (int k : net.subpath(f, n))
    for (std::size_t i = 0; i < net.flow_count(); ++i)
      if (i != f && net.crosses(i, k)) out.insert(i);
  return out;
}

// ---------- instance generators ----------

struct RandomRingOptions {
  int max_nodes{8};
  int max_flows{8};
  double max_utilization{0.5};  // target of the most loaded node
  bool priorities{false};
};

// Heterogeneous ring with arbitrary sources and hop counts. Rates are scaled
// so the busiest node sits at a utilization drawn from (0, max_utilization].
inline RingNetwork random_ring(Rng& rng, const RandomRingOptions& opt = {}) {
  const int m = rng.integer(2, opt.max_nodes);
  const int count = rng.integer(1, opt.max_flows);
  std::vector<Node> nodes;
  for (int k = 0; k < m; ++k) nodes.push_back({rng.uniform(50.0, 150.0), rng.uniform(0.0, 0.02)});
  std::vector<Flow> flows;
  for (int i = 0; i < count; ++i) {
    Flow f;
    f.id = i + 1;
    f.source = rng.integer(1, m);
    f.hops = rng.integer(1, m);
    f.rho = rng.uniform(0.1, 1.0);
    f.sigma0 = rng.uniform(0.0, 5.0);
    f.priority = opt.priorities ? rng.integer(0, 2) : 0;
    f.max_frame = opt.priorities ? rng.uniform(0.0, 2.0) : 0.0;
    flows.push_back(f);
  }
  double worst = 0.0;
  for (int k = 1; k <= m; ++k) {
    double load = 0.0;
    for (const auto& f : flows)
      if (((k - f.source) % m + m) % m < f.hops) load += f.rho;
    worst = std::max(worst, load / nodes[k - 1].rate);
  }
  const double target = rng.uniform(0.02, opt.max_utilization);
  for (auto& f : flows) f.rho *= target / worst;
  return RingNetwork(std::move(nodes), std::move(flows));
}

// No flow wraps past node M and flow index 0 starts at node 1, so every
// interferer of flow 0 joins at its own source.
// Homogeneous tandems share one rate and latency across nodes; the single
// rate-latency curve of a path is only tight then.
inline RingNetwork random_tandem(Rng& rng, int max_nodes = 8, int max_flows = 6, bool homogeneous = false) {
  const int m = rng.integer(2, max_nodes);
  const int count = rng.integer(1, max_flows);
  std::vector<Node> nodes;
  const Node common{rng.uniform(50.0, 150.0), rng.uniform(0.0, 0.02)};
  for (int k = 0; k < m; ++k)
    nodes.push_back(homogeneous ? common : Node{rng.uniform(50.0, 150.0), rng.uniform(0.0, 0.02)});
  std::vector<Flow> flows;
  Flow f0;
  f0.id = 1;
  f0.source = 1;
  f0.hops = rng.integer(1, m);
  f0.rho = rng.uniform(0.5, 5.0);
  f0.sigma0 = rng.uniform(0.0, 5.0);
  flows.push_back(f0);
  for (int i = 1; i < count; ++i) {
    Flow f;
    f.id = i + 1;
    f.source = rng.integer(1, m);
    f.hops = rng.integer(1, m - f.source + 1);
    f.rho = rng.uniform(0.5, 5.0);
    f.sigma0 = rng.uniform(0.0, 5.0);
    flows.push_back(f);
  }
  return RingNetwork(std::move(nodes), std::move(flows));
}

// One full-loop flow per node, identical parameters.
inline RingNetwork broadcast_ring(int m, double rate, double latency, double sigma0, double rho) {
  std::vector<Node> nodes(static_cast<std::size_t>(m), Node{rate, latency});
  std::vector<Flow> flows;
  for (int k = 1; k <= m; ++k) flows.push_back({k, k, m, rho, sigma0, 0, 0.0});
  return RingNetwork(std::move(nodes), std::move(flows));
}

// Copy of net with one field changed through a mutator.
template <class Mutate>
RingNetwork mutated(const RingNetwork& net, Mutate&& mutate) {
  std::vector<Node> nodes(net.nodes().begin(), net.nodes().end());
  std::vector<Flow> flows(net.flows().begin(), net.flows().end());
  mutate(nodes, flows);
  return RingNetwork(std::move(nodes), std::move(flows));
}

// The two-node fixture: R = 100, T = 0.01, two full-loop flows (1, 10).
inline RingNetwork two_node_fixture() { return broadcast_ring(2, 100.0, 0.01, 1.0, 10.0); }

}  // namespace ringnc::testing
