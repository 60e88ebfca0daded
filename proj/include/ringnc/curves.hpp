#pragma once

// Min-plus algebra restricted to token-bucket arrival curves and
// rate-latency service curves. All quantities are SI: bits, bits/s, seconds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ringnc/errors.hpp"

namespace ringnc {

// alpha(t) = sigma + rho * t for t > 0, alpha(0) = 0.
struct TokenBucketCurve {
  double sigma{0.0};
  double rho{0.0};

  double operator()(double t) const { return t > 0.0 ? sigma + rho * t : 0.0; }

  bool valid() const { return sigma >= 0.0 && rho >= 0.0 && std::isfinite(sigma) && std::isfinite(rho); }

  friend bool operator==(const TokenBucketCurve&, const TokenBucketCurve&) = default;
};

// beta(t) = max(0, rate * (t - latency)). An infinite rate is the pure delay
// element, and (inf, 0) is the neutral element of convolution.
struct RateLatencyCurve {
  double rate{std::numeric_limits<double>::infinity()};
  double latency{0.0};

  double operator()(double t) const {
    if (t <= latency) return 0.0;
    if (std::isinf(rate)) return rate;
    return rate * (t - latency);
  }

  bool valid() const { return rate > 0.0 && latency >= 0.0 && std::isfinite(latency); }

  friend bool operator==(const RateLatencyCurve&, const RateLatencyCurve&) = default;
};

namespace detail {

inline void require_valid(const TokenBucketCurve& a) {
  if (!a.valid()) throw Error("token bucket requires sigma >= 0 and rho >= 0");
}

inline void require_valid(const RateLatencyCurve& b) {
  if (!b.valid()) throw Error("rate-latency curve requires rate > 0 and latency >= 0");
}

inline void require_not_faster(const TokenBucketCurve& a, const RateLatencyCurve& b) {
  if (a.rho > b.rate)
    throw UnstableNode("arrival rate " + std::to_string(a.rho) + " exceeds service rate " +
                       std::to_string(b.rate));
}

inline void require_strictly_slower(double rho, double rate) {
  if (!(rho < rate))
    throw UnstableNode("cross traffic rate " + std::to_string(rho) + " exhausts service rate " +
                       std::to_string(rate));
}

}  // namespace detail

// Concatenation of two rate-latency servers.
inline RateLatencyCurve convolve_rate_latency(const RateLatencyCurve& a, const RateLatencyCurve& b) {
  detail::require_valid(a);
  detail::require_valid(b);
  return {std::min(a.rate, b.rate), a.latency + b.latency};
}

// Output arrival curve alpha (/) beta.
inline TokenBucketCurve deconvolve_output_arrival(const TokenBucketCurve& alpha, const RateLatencyCurve& beta) {
  detail::require_valid(alpha);
  detail::require_valid(beta);
  detail::require_not_faster(alpha, beta);
  return {alpha.sigma + alpha.rho * beta.latency, alpha.rho};
}

// Delay bound h(alpha, beta).
inline double horizontal_deviation(const TokenBucketCurve& alpha, const RateLatencyCurve& beta) {
  detail::require_valid(alpha);
  detail::require_valid(beta);
  detail::require_not_faster(alpha, beta);
  return alpha.sigma / beta.rate + beta.latency;
}

// Backlog bound v(alpha, beta).
inline double vertical_deviation(const TokenBucketCurve& alpha, const RateLatencyCurve& beta) {
  detail::require_valid(alpha);
  detail::require_valid(beta);
  detail::require_not_faster(alpha, beta);
  return alpha.sigma + alpha.rho * beta.latency;
}

// (beta - alpha)_up for a strict server under arbitrary multiplexing.
inline RateLatencyCurve leftover_arbitrary(const RateLatencyCurve& beta, const TokenBucketCurve& alpha) {
  detail::require_valid(alpha);
  detail::require_valid(beta);
  detail::require_strictly_slower(alpha.rho, beta.rate);
  const double rate = beta.rate - alpha.rho;
  return {rate, beta.latency + (alpha.sigma + alpha.rho * beta.latency) / rate};
}

// (beta - sum(higher) - max_lower_frame)_up under non-preemptive fixed priority.
inline RateLatencyCurve leftover_fp_single_node(const RateLatencyCurve& beta,
                                                std::span<const TokenBucketCurve> higher,
                                                double max_lower_frame) {
  detail::require_valid(beta);
  if (!(max_lower_frame >= 0.0)) throw Error("maximum lower-priority frame must be >= 0");
  double sigma = 0.0;
  double rho = 0.0;
  for (const auto& a : higher) {
    detail::require_valid(a);
    sigma += a.sigma;
    rho += a.rho;
  }
  detail::require_strictly_slower(rho, beta.rate);
  const double rate = beta.rate - rho;
  return {rate, beta.latency + (sigma + rho * beta.latency + max_lower_frame) / rate};
}

// Non-preemptive blocking by one lower-priority frame: (R, T + L/R).
inline RateLatencyCurve leftover_lower_priority(const RateLatencyCurve& beta, double max_lower_frame) {
  detail::require_valid(beta);
  if (!(max_lower_frame >= 0.0)) throw Error("maximum lower-priority frame must be >= 0");
  if (max_lower_frame == 0.0) return beta;
  return {beta.rate, beta.latency + max_lower_frame / beta.rate};
}

// Generic non-decreasing piecewise-linear curve. Only used as an oracle carrier
// in tests: each breakpoint stores the right-limit value at its time and the
// slope up to the next breakpoint. f(0) is 0 unless zero_at_origin is false.
class PiecewiseLinearCurve {
 public:
  struct Breakpoint {
    double time;
    double value;
    double slope;
  };

  PiecewiseLinearCurve() = default;

  explicit PiecewiseLinearCurve(std::vector<Breakpoint> points, bool zero_at_origin = true)
      : points_(std::move(points)), zero_at_origin_(zero_at_origin) {
    if (points_.empty() || points_.front().time != 0.0)
      throw Error("piecewise-linear curve must start at time 0");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (p.value < 0.0 || p.slope < 0.0) throw Error("piecewise-linear curve must be non-negative");
      if (i + 1 < points_.size()) {
        const auto& q = points_[i + 1];
        if (!(q.time > p.time)) throw Error("breakpoint times must be strictly increasing");
        if (q.value < p.value + p.slope * (q.time - p.time) - 1e-12 * std::max(1.0, q.value))
          throw Error("piecewise-linear curve must be non-decreasing");
      }
    }
  }

  static PiecewiseLinearCurve from(const TokenBucketCurve& a) { return PiecewiseLinearCurve({{0.0, a.sigma, a.rho}}); }

  static PiecewiseLinearCurve from(const RateLatencyCurve& b) {
    if (b.latency == 0.0) return PiecewiseLinearCurve({{0.0, 0.0, b.rate}});
    return PiecewiseLinearCurve({{0.0, 0.0, 0.0}, {b.latency, 0.0, b.rate}});
  }

  double operator()(double t) const {
    if (t <= 0.0) return zero_at_origin_ ? 0.0 : points_.front().value;
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double x, const Breakpoint& p) { return x < p.time; });
    const auto& p = *std::prev(it);
    return p.value + p.slope * (t - p.time);
  }

  // Right limit at t (equals operator() except at 0).
  double right_limit(double t) const {
    if (t <= 0.0) return points_.front().value;
    return (*this)(t);
  }

  const std::vector<Breakpoint>& breakpoints() const { return points_; }

 private:
  std::vector<Breakpoint> points_;
  bool zero_at_origin_ = true;
};

}  // namespace ringnc
