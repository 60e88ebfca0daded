#pragma once

// Unidirectional ring: M nodes labelled 1..M, flows on fixed simple paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ringnc/curves.hpp"
#include "ringnc/errors.hpp"

namespace ringnc {

struct Node {
  double rate{0.0};     // R^k, bits/s
  double latency{0.0};  // T^k, seconds

  RateLatencyCurve service() const { return {rate, latency}; }
  friend bool operator==(const Node&, const Node&) = default;
};

struct Flow {
  int id{0};
  int source{1};  // first hop, 1-based
  int hops{1};
  double rho{0.0};        // bits/s
  double sigma0{0.0};     // initial burst, bits
  int priority{0};        // 0 is highest
  double max_frame{0.0};  // bits

  TokenBucketCurve arrival() const { return {sigma0, rho}; }
  friend bool operator==(const Flow&, const Flow&) = default;
};

enum class Policy { Arbitrary, FixedPriority };

enum class InterfererCategory {
  SourceOnSubpath,  // single convergence point at the interferer's own source
  CrossesFSource,   // single convergence point at the source of f
  Both,             // two distinct convergence points
};

inline const char* to_string(InterfererCategory c) {
  switch (c) {
    case InterfererCategory::SourceOnSubpath: return "SOURCE_ON_SUBPATH";
    case InterfererCategory::CrossesFSource: return "CROSSES_F_SOURCE";
    case InterfererCategory::Both: return "BOTH";
  }
  return "?";
}

struct NodeLoad {
  int node;
  double utilization;
};

// Immutable after construction. Flows are kept sorted by id and addressed by
// their position in that order ("flow index"); nodes are addressed 1..M.
class RingNetwork {
 public:
  // Relative slack accepted on the per-node utilization bound.
  static constexpr double kUtilizationSlack = 1e-9;

  RingNetwork(std::vector<Node> nodes, std::vector<Flow> flows) : nodes_(std::move(nodes)), flows_(std::move(flows)) {
    const int m = node_count();
    if (m < 1) throw ValidationError("nodes: ring must have at least one node");
    for (int k = 0; k < m; ++k) {
      const auto& n = nodes_[k];
      if (!(n.rate > 0.0) || !std::isfinite(n.rate))
        throw ValidationError("nodes[" + std::to_string(k) + "].rate_bps must be > 0");
      if (!(n.latency >= 0.0) || !std::isfinite(n.latency))
        throw ValidationError("nodes[" + std::to_string(k) + "].latency_s must be >= 0");
    }
    std::stable_sort(flows_.begin(), flows_.end(), [](const Flow& a, const Flow& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      const auto& f = flows_[i];
      const std::string where = "flow " + std::to_string(f.id);
      if (i > 0 && flows_[i - 1].id == f.id) throw ValidationError(where + ": duplicate id");
      if (f.source < 1 || f.source > m)
        throw ValidationError(where + ": source " + std::to_string(f.source) + " outside [1," + std::to_string(m) + "]");
      if (f.hops < 1 || f.hops > m)
        throw ValidationError(where + ": hops " + std::to_string(f.hops) + " outside [1," + std::to_string(m) + "]");
      if (!(f.rho >= 0.0) || !std::isfinite(f.rho)) throw ValidationError(where + ": rho_bps must be >= 0");
      if (!(f.sigma0 >= 0.0) || !std::isfinite(f.sigma0)) throw ValidationError(where + ": sigma0_bits must be >= 0");
      if (f.priority < 0) throw ValidationError(where + ": priority must be >= 0");
      if (!(f.max_frame >= 0.0) || !std::isfinite(f.max_frame))
        throw ValidationError(where + ": max_frame_bits must be >= 0");
    }

    crossing_.assign(m, {});
    for (std::size_t i = 0; i < flows_.size(); ++i)
      for (int d = 0; d < flows_[i].hops; ++d) crossing_[ring_add(flows_[i].source, d) - 1].push_back(i);

    for (int k = 1; k <= m; ++k) {
      const double u = utilization(k);
      if (u > 1.0 + kUtilizationSlack)
        throw ValidationError("node " + std::to_string(k) + ": utilization " + std::to_string(u) + " exceeds 1");
    }
  }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  std::size_t flow_count() const { return flows_.size(); }

  const Node& node(int k) const { return nodes_.at(static_cast<std::size_t>(k - 1)); }
  const Flow& flow(std::size_t index) const { return flows_.at(index); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Flow> flows() const { return flows_; }

  std::size_t index_of(int flow_id) const {
    auto it = std::lower_bound(flows_.begin(), flows_.end(), flow_id, [](const Flow& f, int id) { return f.id < id; });
    if (it == flows_.end() || it->id != flow_id) throw Error("unknown flow id " + std::to_string(flow_id));
    return static_cast<std::size_t>(it - flows_.begin());
  }

  // l (+) k on labels 1..M.
  int ring_add(int l, int k) const {
    const int m = node_count();
    int r = ((l - 1 + k) % m + m) % m;
    return r + 1;
  }

  int ring_sub(int l, int k) const { return ring_add(l, -k); }

  // Hops needed to travel from node a to node b, in [0, M).
  int distance(int from, int to) const { return ring_add(to, -(from - 1)) - 1; }

  // Position of node k on the path of flow i (0 for the source), or -1.
  int depth(std::size_t i, int k) const {
    const auto& f = flows_[i];
    const int d = distance(f.source, k);
    return d < f.hops ? d : -1;
  }

  bool crosses(std::size_t i, int k) const { return depth(i, k) >= 0; }

  // Node k is in subpath_f(n).
  bool on_subpath(std::size_t f, int n, int k) const {
    const int d = distance(flows_[f].source, k);
    return d < n;
  }

  void check_hops(std::size_t f, int n) const {
    if (n < 1 || n > flows_.at(f).hops)
      throw InvalidHopCount("flow " + std::to_string(flows_[f].id) + ": hop count " + std::to_string(n) +
                            " outside [1," + std::to_string(flows_[f].hops) + "]");
  }

  // The n physical nodes of subpath_f(n), in crossing order.
  std::vector<int> subpath(std::size_t f, int n) const {
    check_hops(f, n);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) out.push_back(ring_add(flows_[f].source, d));
    return out;
  }

  // Flow indices crossing node k, by increasing id.
  std::span<const std::size_t> crossing_flows(int k) const { return crossing_.at(static_cast<std::size_t>(k - 1)); }

  // K_f(n), or K_{<=f}(n) when priority_filter is set.
  std::vector<std::size_t> interference_set(std::size_t f, int n, bool priority_filter) const {
    check_hops(f, n);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      if (i == f) continue;
      if (priority_filter && flows_[i].priority > flows_[f].priority) continue;
      if (intersects_subpath(i, f, n)) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> interference_set(std::size_t f, int n, Policy policy) const {
    return interference_set(f, n, policy == Policy::FixedPriority);
  }

  // (hp_f^k, lp_f^k): flows at k other than f with priority <= P(f), and
  // flows at k with priority > P(f).
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> hp_lp_sets(std::size_t f, int k) const {
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
    for (std::size_t i : crossing_flows(k)) {
      if (flows_[i].priority > flows_[f].priority)
        out.second.push_back(i);
      else if (i != f)
        out.first.push_back(i);
    }
    return out;
  }

  InterfererCategory classify_interferer(std::size_t i, std::size_t f, int n) const {
    check_hops(f, n);
    if (i == f || !intersects_subpath(i, f, n))
      throw NotAnInterferer("flow " + std::to_string(flows_[i].id) + " does not interfere with flow " +
                            std::to_string(flows_[f].id) + " on " + std::to_string(n) + " hops");
    const int f_first = flows_[f].source;
    const bool source_on_subpath = on_subpath(f, n, flows_[i].source);
    const bool crosses_f_source = crosses(i, f_first) && flows_[i].source != f_first;
    if (source_on_subpath && crosses_f_source) return InterfererCategory::Both;
    if (crosses_f_source) return InterfererCategory::CrossesFSource;
    return InterfererCategory::SourceOnSubpath;
  }

  double utilization(int k) const {
    double load = 0.0;
    for (std::size_t i : crossing_flows(k)) load += flows_[i].rho;
    return load / node(k).rate;
  }

  double max_utilization() const {
    double u = 0.0;
    for (int k = 1; k <= node_count(); ++k) u = std::max(u, utilization(k));
    return u;
  }

  std::vector<NodeLoad> utilization_report() const {
    std::vector<NodeLoad> out;
    for (int k = 1; k <= node_count(); ++k) out.push_back({k, utilization(k)});
    return out;
  }

  friend bool operator==(const RingNetwork& a, const RingNetwork& b) {
    return a.nodes_ == b.nodes_ && a.flows_ == b.flows_;
  }

 private:
  bool intersects_subpath(std::size_t i, std::size_t f, int n) const {
    const int start = flows_[f].source;
    for (int d = 0; d < n; ++d)
      if (crosses(i, ring_add(start, d))) return true;
    return false;
  }

  std::vector<Node> nodes_;
  std::vector<Flow> flows_;
  std::vector<std::vector<std::size_t>> crossing_;
};

}  // namespace ringnc
