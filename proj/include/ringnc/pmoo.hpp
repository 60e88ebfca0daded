#pragma once

// End-to-end service curves for flows on a ring with cyclic dependencies
// (pay-multiplexing-only-once extended with a second convergence point at the
// source of the flow of interest), and resolution of the coupled
// latency/burst system.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ringnc/curves.hpp"
#include "ringnc/linalg.hpp"
#include "ringnc/model.hpp"

namespace ringnc::pmoo {

// (flow index, n) with n in [1, h_f]; n = 0 designates the source burst.
struct SubpathKey {
  std::size_t flow{0};
  int hops{1};
  friend bool operator==(const SubpathKey&, const SubpathKey&) = default;
};

struct SubpathServiceCurve {
  SubpathKey key;
  double rate{0.0};
  double latency{0.0};

  RateLatencyCurve curve() const { return {rate, latency}; }
};

struct DelayBound {
  SubpathKey key;
  double bound{0.0};
};

// Burst of flow i after crossing m nodes (m = 0 is sigma_i^0).
using BurstLookup = std::function<double(std::size_t flow, int m)>;

// Flat index over every (f, n), grouped by flow then n.
class SubpathIndex {
 public:
  SubpathIndex() = default;
  explicit SubpathIndex(const RingNetwork& net) {
    offsets_.reserve(net.flow_count() + 1);
    std::size_t acc = 0;
    for (const auto& f : net.flows()) {
      offsets_.push_back(acc);
      acc += static_cast<std::size_t>(f.hops);
    }
    offsets_.push_back(acc);
    keys_.reserve(acc);
    for (std::size_t f = 0; f + 1 < offsets_.size(); ++f)
      for (std::size_t r = offsets_[f]; r < offsets_[f + 1]; ++r)
        keys_.push_back({f, static_cast<int>(r - offsets_[f]) + 1});
  }

  std::size_t size() const { return keys_.size(); }
  std::size_t operator()(std::size_t flow, int n) const { return offsets_[flow] + static_cast<std::size_t>(n - 1); }
  const SubpathKey& key(std::size_t row) const { return keys_[row]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<SubpathKey> keys_;
};

namespace detail {

inline bool counts_as_interferer(const RingNetwork& net, std::size_t i, std::size_t f, Policy policy) {
  if (i == f) return false;
  return policy == Policy::Arbitrary || net.flow(i).priority <= net.flow(f).priority;
}

}  // namespace detail

// Node latency seen by f at node k: T^k, plus one lower-priority frame of
// blocking under fixed priority.
inline double effective_node_latency(const RingNetwork& net, std::size_t f, int k, Policy policy) {
  const Node& node = net.node(k);
  if (policy == Policy::Arbitrary) return node.latency;
  double frame = 0.0;
  for (std::size_t j : net.crossing_flows(k))
    if (net.flow(j).priority > net.flow(f).priority) frame = std::max(frame, net.flow(j).max_frame);
  return leftover_lower_priority(node.service(), frame).latency;
}

// Rate left to f at node k after the interfering flows' rates.
inline double node_residual_rate(const RingNetwork& net, std::size_t f, int k, Policy policy) {
  double load = 0.0;
  for (std::size_t j : net.crossing_flows(k))
    if (detail::counts_as_interferer(net, j, f, policy)) load += net.flow(j).rho;
  return net.node(k).rate - load;
}

// min over subpath_f(n) of R^k minus the interfering rates at k.
inline double residual_rate(const RingNetwork& net, std::size_t f, int n, Policy policy) {
  net.check_hops(f, n);
  double rate = std::numeric_limits<double>::infinity();
  for (int k : net.subpath(f, n)) rate = std::min(rate, node_residual_rate(net, f, k, policy));
  if (!(rate > 0.0))
    throw UnstableSubpath("flow " + std::to_string(net.flow(f).id) + " on " + std::to_string(n) +
                          " hops: residual rate " + std::to_string(rate) + " is not positive");
  return rate;
}

// Burst of i entering f's source, i.e. after crossing the nodes from i.first
// up to f.first (-) 1. Only meaningful when i crosses f.first downstream of its
// own source.
inline int upstream_hops(const RingNetwork& net, std::size_t i, std::size_t f) {
  return net.distance(net.flow(i).source, net.flow(f).source);
}

// Service curve of f over subpath_f(n) with the given bursts. With
// include_cyclic = false the burst of each interferer entering f's source is
// taken as zero.
inline SubpathServiceCurve subpath_service_curve(const RingNetwork& net, std::size_t f, int n, Policy policy,
                                                 const BurstLookup& bursts, bool include_cyclic = true) {
  const double rate = residual_rate(net, f, n, policy);
  const auto path = net.subpath(f, n);
  double latency = 0.0;
  for (int k : path) latency += effective_node_latency(net, f, k, policy);

  double interference = 0.0;
  for (std::size_t i : net.interference_set(f, n, policy)) {
    const auto category = net.classify_interferer(i, f, n);
    const Flow& fi = net.flow(i);
    if (category != InterfererCategory::CrossesFSource) interference += fi.sigma0;
    if (category != InterfererCategory::SourceOnSubpath && include_cyclic)
      interference += bursts(i, upstream_hops(net, i, f));
    double shared = 0.0;
    for (int k : path)
      if (net.crosses(i, k)) shared += effective_node_latency(net, f, k, policy);
    interference += fi.rho * shared;
  }
  return {{f, n}, rate, latency + interference / rate};
}

// Closed form for tandem-like interference: every interferer enters at its own
// source on the subpath.
inline SubpathServiceCurve tandem_service_curve(const RingNetwork& net, std::size_t f, int n,
                                                Policy policy = Policy::Arbitrary) {
  for (std::size_t i : net.interference_set(f, n, policy))
    if (net.classify_interferer(i, f, n) != InterfererCategory::SourceOnSubpath)
      throw NotFeedforward("flow " + std::to_string(net.flow(i).id) + " reaches the source of flow " +
                           std::to_string(net.flow(f).id) + " from upstream");
  return subpath_service_curve(
      net, f, n, policy, [](std::size_t, int) { return 0.0; }, false);
}

// T = C1 + A1 sigma, sigma = C2 + A2 T over the SubpathIndex space (T and
// sigma share the index: entry (i, m) of sigma is the burst of i after m hops).
//
// A1 is stored structurally: row (f, n) has the value row_scale[(f, n)] =
// 1/R^{subpath_f(n)} on every column of cyclic_columns[f], the bursts entering
// f's source. A2 is diagonal with rho of the row's flow.
struct MatrixSystem {
  SubpathIndex index;
  std::vector<double> c1;
  std::vector<double> c2;
  std::vector<double> a2;
  std::vector<double> row_scale;
  std::vector<double> residual_rates;
  std::vector<std::vector<std::size_t>> cyclic_columns;  // per flow, sorted

  std::size_t size() const { return index.size(); }
  std::size_t flow_of(std::size_t row) const { return index.key(row).flow; }

  double a1(std::size_t row, std::size_t col) const {
    const auto& cols = cyclic_columns[flow_of(row)];
    return std::binary_search(cols.begin(), cols.end(), col) ? row_scale[row] : 0.0;
  }

  std::vector<double> c3() const {
    std::vector<double> out = c1;
    for (std::size_t r = 0; r < size(); ++r)
      for (std::size_t col : cyclic_columns[flow_of(r)]) out[r] += row_scale[r] * c2[col];
    return out;
  }

  linalg::DenseMatrix dense_a1() const {
    linalg::DenseMatrix m(size(), size());
    for (std::size_t r = 0; r < size(); ++r)
      for (std::size_t col : cyclic_columns[flow_of(r)]) m(r, col) = row_scale[r];
    return m;
  }

  linalg::DenseMatrix dense_a2() const {
    linalg::DenseMatrix m(size(), size());
    for (std::size_t r = 0; r < size(); ++r) m(r, r) = a2[r];
    return m;
  }

  // Id - A1 x A2, built through the dense product. Only for small systems.
  linalg::DenseMatrix dense_system_matrix() const {
    auto prod = linalg::matmul(dense_a1(), dense_a2());
    auto m = linalg::DenseMatrix::identity(size());
    for (std::size_t r = 0; r < size(); ++r)
      for (std::size_t c = 0; c < size(); ++c) m(r, c) -= prod(r, c);
    return m;
  }

  // Per-flow reduction of Id - A1 A2 (same determinant): with
  // V_f = sum of the cyclic bursts of f, T = C1 + row_scale * V_flow and
  // (I - W) V = c.
  linalg::DenseMatrix reduced_system_matrix() const {
    const std::size_t flows = cyclic_columns.size();
    auto m = linalg::DenseMatrix::identity(std::max<std::size_t>(flows, 1));
    for (std::size_t f = 0; f < flows; ++f)
      for (std::size_t col : cyclic_columns[f]) m(f, flow_of(col)) -= a2[col] * row_scale[col];
    return m;
  }

  std::vector<double> reduced_rhs() const {
    const std::size_t flows = cyclic_columns.size();
    std::vector<double> out(std::max<std::size_t>(flows, 1), 0.0);
    for (std::size_t f = 0; f < flows; ++f)
      for (std::size_t col : cyclic_columns[f]) out[f] += c2[col] + a2[col] * c1[col];
    return out;
  }
};

inline MatrixSystem build_matrix_system(const RingNetwork& net, Policy policy) {
  MatrixSystem sys;
  sys.index = SubpathIndex(net);
  const std::size_t rows = sys.index.size();
  sys.c1.assign(rows, 0.0);
  sys.c2.assign(rows, 0.0);
  sys.a2.assign(rows, 0.0);
  sys.row_scale.assign(rows, 0.0);
  sys.residual_rates.assign(rows, 0.0);
  sys.cyclic_columns.assign(net.flow_count(), {});

  for (std::size_t f = 0; f < net.flow_count(); ++f) {
    const Flow& flow = net.flow(f);
    const int f_first = flow.source;

    auto& cols = sys.cyclic_columns[f];
    for (std::size_t i = 0; i < net.flow_count(); ++i) {
      if (!detail::counts_as_interferer(net, i, f, policy)) continue;
      if (net.flow(i).source == f_first || !net.crosses(i, f_first)) continue;
      cols.push_back(sys.index(i, upstream_hops(net, i, f)));
    }
    std::sort(cols.begin(), cols.end());

    double rate = std::numeric_limits<double>::infinity();
    double node_latencies = 0.0;
    double numerator = 0.0;
    for (int n = 1; n <= flow.hops; ++n) {
      const int k = net.ring_add(f_first, n - 1);
      const double t_eff = effective_node_latency(net, f, k, policy);
      node_latencies += t_eff;
      rate = std::min(rate, node_residual_rate(net, f, k, policy));
      for (std::size_t i : net.crossing_flows(k)) {
        if (!detail::counts_as_interferer(net, i, f, policy)) continue;
        numerator += net.flow(i).rho * t_eff;
        if (net.flow(i).source == k) numerator += net.flow(i).sigma0;
      }
      if (!(rate > 0.0))
        throw UnstableSubpath("flow " + std::to_string(flow.id) + " on " + std::to_string(n) +
                              " hops: residual rate " + std::to_string(rate) + " is not positive");
      const std::size_t row = sys.index(f, n);
      sys.residual_rates[row] = rate;
      sys.row_scale[row] = 1.0 / rate;
      sys.c1[row] = node_latencies + numerator / rate;
      sys.c2[row] = flow.sigma0;
      sys.a2[row] = flow.rho;
    }
  }
  return sys;
}

enum class Verdict { Feasible, UnstableSubpath, Singular, NegativeSolution, Diverged };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::UnstableSubpath: return "unstable-subpath";
    case Verdict::Singular: return "singular";
    case Verdict::NegativeSolution: return "negative-solution";
    case Verdict::Diverged: return "diverged";
  }
  return "?";
}

struct Solution {
  Verdict verdict{Verdict::Feasible};
  std::string reason;
  SubpathIndex index;
  std::vector<double> latency;  // T(f, n)
  std::vector<double> burst;    // sigma(f, n)
  std::vector<double> rate;     // R^{subpath_f(n)}
  double determinant{std::numeric_limits<double>::quiet_NaN()};
  std::size_t iterations{0};

  bool feasible() const { return verdict == Verdict::Feasible; }

  // sigma_f after m hops, m in [0, h_f].
  double burst_after(const RingNetwork& net, std::size_t f, int m) const {
    return m == 0 ? net.flow(f).sigma0 : burst[index(f, m)];
  }

  double latency_of(std::size_t f, int n) const { return latency[index(f, n)]; }
};

inline Solution solve_system(const MatrixSystem& sys) {
  Solution out;
  out.index = sys.index;
  if (sys.size() == 0) {
    out.determinant = 1.0;
    return out;
  }
  const auto w = sys.reduced_system_matrix();
  const linalg::LuDecomposition lu(w);
  out.determinant = lu.determinant();
  if (lu.singular()) {
    out.verdict = Verdict::Singular;
    out.reason = "Id - A1*A2 is singular";
    return out;
  }
  const auto v = lu.solve(sys.reduced_rhs());
  out.rate = sys.residual_rates;
  out.latency.resize(sys.size());
  out.burst.resize(sys.size());
  for (std::size_t r = 0; r < sys.size(); ++r) {
    out.latency[r] = sys.c1[r] + sys.row_scale[r] * v[sys.flow_of(r)];
    out.burst[r] = sys.c2[r] + sys.a2[r] * out.latency[r];
  }
  for (std::size_t r = 0; r < sys.size(); ++r)
    if (out.latency[r] < 0.0 || out.burst[r] < 0.0 || !std::isfinite(out.latency[r])) {
      out.verdict = Verdict::NegativeSolution;
      out.reason = "negative latency or burst: outside the stability region";
      return out;
    }
  return out;
}

// Solves T = (Id - A1 A2)^-1 C3 with the full dense matrices. Cost is cubic in
// the number of subpaths; used to cross-check solve_system on small rings.
inline Solution solve_system_dense(const MatrixSystem& sys) {
  Solution out;
  out.index = sys.index;
  if (sys.size() == 0) {
    out.determinant = 1.0;
    return out;
  }
  const linalg::LuDecomposition lu(sys.dense_system_matrix());
  out.determinant = lu.determinant();
  if (lu.singular()) {
    out.verdict = Verdict::Singular;
    out.reason = "Id - A1*A2 is singular";
    return out;
  }
  out.latency = lu.solve(sys.c3());
  out.rate = sys.residual_rates;
  out.burst.resize(sys.size());
  for (std::size_t r = 0; r < sys.size(); ++r) out.burst[r] = sys.c2[r] + sys.a2[r] * out.latency[r];
  for (std::size_t r = 0; r < sys.size(); ++r)
    if (out.latency[r] < 0.0 || out.burst[r] < 0.0) {
      out.verdict = Verdict::NegativeSolution;
      out.reason = "negative latency or burst: outside the stability region";
      return out;
    }
  return out;
}

// Builds and solves; residual-rate exhaustion becomes an UnstableSubpath verdict.
inline Solution solve_network(const RingNetwork& net, Policy policy) {
  try {
    return solve_system(build_matrix_system(net, policy));
  } catch (const UnstableSubpath& e) {
    Solution out;
    out.verdict = Verdict::UnstableSubpath;
    out.reason = e.what();
    out.index = SubpathIndex(net);
    return out;
  }
}

inline BurstLookup solved_bursts(const RingNetwork& net, const Solution& sol) {
  return [&net, &sol](std::size_t i, int m) { return sol.burst_after(net, i, m); };
}

inline SubpathServiceCurve e2e_service_curve(const RingNetwork& net, std::size_t f, int n, Policy policy,
                                             const Solution& sol) {
  if (!sol.feasible()) throw Error("e2e_service_curve: system has no feasible solution (" + sol.reason + ")");
  return subpath_service_curve(net, f, n, policy, solved_bursts(net, sol));
}

// sigma_f^0 / R + T, i.e. h((sigma_f^0, rho_f), curve).
inline DelayBound delay_bound(const RingNetwork& net, const SubpathServiceCurve& curve) {
  const Flow& f = net.flow(curve.key.flow);
  return {curve.key, horizontal_deviation(f.arrival(), curve.curve())};
}

struct BroadcastStability {
  bool stable{false};
  double x{std::numeric_limits<double>::quiet_NaN()};  // rho / (R - (M-1) rho)
  double threshold_rho{0.0};                           // R / (2 (M-1))
  double determinant{std::numeric_limits<double>::quiet_NaN()};
  double margin{0.0};  // 1/(M-1) - x
};

// Closed form for M nodes each sending one (sigma, rho) flow around the whole
// ring: det(Id - A1 A2) = (1-M)(x+1)^(M-1)(x - 1/(M-1)). The boundary itself
// is reported unstable.
inline BroadcastStability broadcast_stability(int m, double rate, double rho) {
  if (m < 2) throw DegenerateRing("broadcast stability needs at least 2 nodes, got " + std::to_string(m));
  BroadcastStability out;
  const double others = static_cast<double>(m - 1);
  out.threshold_rho = rate / (2.0 * others);
  const double residual = rate - others * rho;
  if (!(residual > 0.0)) {
    out.margin = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.x = rho / residual;
  out.determinant = (1.0 - m) * std::pow(out.x + 1.0, others) * (out.x - 1.0 / others);
  out.margin = 1.0 / others - out.x;
  out.stable = out.margin > 0.0;
  return out;
}

}  // namespace ringnc::pmoo
