#pragma once

// Picard iteration on the latency/burst coupling. Independent of the matrix
// assembly: each step re-evaluates every subpath service curve directly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ringnc/pmoo.hpp"

namespace ringnc::pmoo {

struct FixedPointOptions {
  double tolerance{1e-12};  // max relative change between iterations
  std::size_t max_iterations{100000};
  double divergence_limit{1e18};
};

inline Solution fixed_point_oracle(const RingNetwork& net, Policy policy, const FixedPointOptions& opt = {}) {
  Solution out;
  out.index = SubpathIndex(net);
  const std::size_t rows = out.index.size();
  out.latency.assign(rows, 0.0);
  out.burst.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) out.burst[r] = net.flow(out.index.key(r).flow).sigma0;

  const BurstLookup lookup = [&](std::size_t i, int m) {
    return m == 0 ? net.flow(i).sigma0 : out.burst[out.index(i, m)];
  };

  try {
    out.rate.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) out.rate[r] = residual_rate(net, out.index.key(r).flow, out.index.key(r).hops, policy);
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
      out.iterations = it;
      std::vector<double> latency(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto& key = out.index.key(r);
        latency[r] = subpath_service_curve(net, key.flow, key.hops, policy, lookup).latency;
      }
      double change = 0.0;
      double peak = 0.0;
      std::vector<double> burst(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const Flow& f = net.flow(out.index.key(r).flow);
        burst[r] = f.sigma0 + f.rho * latency[r];
        const double scale_t = std::max(std::abs(latency[r]), 1e-300);
        const double scale_b = std::max(std::abs(burst[r]), 1e-300);
        change = std::max(change, std::abs(latency[r] - out.latency[r]) / scale_t);
        change = std::max(change, std::abs(burst[r] - out.burst[r]) / scale_b);
        peak = std::max({peak, latency[r], burst[r]});
      }
      out.latency = std::move(latency);
      out.burst = std::move(burst);
      if (!std::isfinite(peak) || peak > opt.divergence_limit) {
        out.verdict = Verdict::Diverged;
        out.reason = "iterates exceeded " + std::to_string(opt.divergence_limit);
        return out;
      }
      if (change < opt.tolerance) return out;
    }
  } catch (const UnstableSubpath& e) {
    out.verdict = Verdict::UnstableSubpath;
    out.reason = e.what();
    return out;
  }
  out.verdict = Verdict::Diverged;
  out.reason = "no convergence within " + std::to_string(opt.max_iterations) + " iterations";
  return out;
}

}  // namespace ringnc::pmoo
