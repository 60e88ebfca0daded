#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <vector>

#include "support.hpp"

using namespace ringnc;
using namespace ringnc::pmoo;
using ringnc::testing::rel_close;
using ringnc::testing::Rng;

namespace {

// Closed-form determinant of Id - A1 A2 for the one-flow-per-node broadcast.
double broadcast_det(int m, double rate, double rho) {
  const double x = rho / (rate - (m - 1) * rho);
  return (1.0 - m) * std::pow(x + 1.0, m - 1) * (x - 1.0 / (m - 1));
}

void check_same_solution(const Solution& a, const Solution& b, double tol = 1e-9) {
  REQUIRE(a.latency.size() == b.latency.size());
  for (std::size_t r = 0; r < a.latency.size(); ++r) {
    INFO("row " << r);
    CHECK(rel_close(a.latency[r], b.latency[r], tol));
    CHECK(rel_close(a.burst[r], b.burst[r], tol));
  }
}

std::vector<double> all_delays(const RingNetwork& net, Policy policy) {
  const auto bounds = ring_pmoo_analysis(net, policy);
  if (!bounds.feasible) return std::vector<double>(SubpathIndex(net).size(), INFINITY);
  return bounds.delay;
}

}  // namespace

TEST_CASE("two-node fixture", "[pmoo]") {
  const auto net = testing::two_node_fixture();
  const auto sys = build_matrix_system(net, Policy::Arbitrary);
  const std::size_t f1n1 = sys.index(0, 1);
  const std::size_t f2n1 = sys.index(1, 1);
  CHECK(rel_close(sys.c1[f1n1], 0.01 + 0.1 / 90.0));
  CHECK(rel_close(sys.a1(f1n1, f2n1), 1.0 / 90.0));
  CHECK(sys.a1(f1n1, sys.index(1, 2)) == 0.0);
  CHECK(sys.a1(f1n1, f1n1) == 0.0);

  for (const auto& sol : {solve_system(sys), solve_system_dense(sys), fixed_point_oracle(net, Policy::Arbitrary)}) {
    REQUIRE(sol.feasible());
    CHECK(rel_close(sol.latency_of(0, 1), 0.025));
    CHECK(rel_close(sol.burst[sol.index(0, 1)], 1.25));
    CHECK(rel_close(sol.latency_of(0, 2), 0.0472222222222222222));
    CHECK(rel_close(sol.latency_of(1, 2), 0.0472222222222222222));
  }
  const auto sol = solve_network(net, Policy::Arbitrary);
  const auto curve = e2e_service_curve(net, 0, 2, Policy::Arbitrary, sol);
  CHECK(rel_close(curve.rate, 90.0));
  CHECK(rel_close(delay_bound(net, curve).bound, 0.0583333333333333333));
  CHECK_THROWS_AS(tandem_service_curve(net, 0, 2), NotFeedforward);
}

TEST_CASE("closed form on a two-node tandem", "[pmoo]") {
  const RingNetwork net({{100.0, 0.01}, {100.0, 0.01}}, {{1, 1, 2, 10.0, 1.0, 0, 0.0}, {2, 1, 2, 10.0, 1.0, 0, 0.0}});
  const auto curve = tandem_service_curve(net, 0, 2);
  CHECK(curve.rate == 90.0);
  CHECK(rel_close(curve.latency, 0.02 + 1.2 / 90.0));
  CHECK(rel_close(curve.latency, 0.0333333333333));
}

TEST_CASE("reduced and dense solves agree", "[pmoo][property]") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = testing::random_ring(rng, {6, 6, 0.5, false});
    const auto sys = build_matrix_system(net, Policy::Arbitrary);
    const auto reduced = solve_system(sys);
    const auto dense = solve_system_dense(sys);
    INFO("trial " << trial);
    CHECK(rel_close(reduced.determinant, dense.determinant, 1e-9));
    CHECK(reduced.verdict == dense.verdict);
    if (reduced.feasible() && dense.feasible()) check_same_solution(reduced, dense);
  }
}

TEST_CASE("matrix solve agrees with the fixed-point oracle", "[pmoo][property]") {
  Rng rng(2024);
  int feasible = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    // Every tenth instance is a broadcast ring pushed past its threshold.
    const int m = rng.integer(3, 8);
    const auto net = trial % 10 == 9
                         ? testing::broadcast_ring(m, 100.0, 0.01, 1.0, rng.uniform(1.05, 1.5) * 100.0 / (2.0 * (m - 1)))
                         : testing::random_ring(rng, {8, 8, trial % 5 == 0 ? 1.0 : 0.5, false});
    const auto sol = solve_network(net, Policy::Arbitrary);
    const auto oracle = fixed_point_oracle(net, Policy::Arbitrary);
    INFO("trial " << trial << " verdicts " << to_string(sol.verdict) << " / " << to_string(oracle.verdict));
    REQUIRE(sol.feasible() == oracle.feasible());
    if (sol.feasible()) {
      ++feasible;
      check_same_solution(sol, oracle);
    } else {
      ++infeasible;
    }
  }
  CHECK(feasible >= 100);
  CHECK(infeasible >= 1);
}

TEST_CASE("solved system satisfies the direct service-curve equations", "[pmoo][property]") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = testing::random_ring(rng, {8, 8, 0.5, trial % 2 == 1});
    const Policy policy = trial % 2 ? Policy::FixedPriority : Policy::Arbitrary;
    const auto sol = solve_network(net, policy);
    if (!sol.feasible()) continue;
    for (std::size_t r = 0; r < sol.index.size(); ++r) {
      const auto& key = sol.index.key(r);
      const Flow& f = net.flow(key.flow);
      CHECK(sol.burst[r] == f.sigma0 + f.rho * sol.latency[r]);
      const auto curve = e2e_service_curve(net, key.flow, key.hops, policy, sol);
      CHECK(rel_close(curve.latency, sol.latency[r]));
      CHECK(curve.rate == sol.rate[r]);
    }
  }
}

TEST_CASE("determinant law for broadcast rings", "[pmoo]") {
  for (int m = 2; m <= 8; ++m) {
    for (double frac : {0.1, 0.5, 0.9, 1.5}) {
      const double rate = 1000.0;
      const double rho = frac * rate / (2.0 * (m - 1));
      if (m * rho > rate) continue;
      const auto net = testing::broadcast_ring(m, rate, 0.001, 2.0, rho);
      const auto sys = build_matrix_system(net, Policy::Arbitrary);
      const double expected = broadcast_det(m, rate, rho);
      INFO("M " << m << " frac " << frac);
      CHECK(rel_close(linalg::determinant(sys.dense_system_matrix()), expected));
      CHECK(rel_close(linalg::determinant(sys.reduced_system_matrix()), expected));
      const auto bs = broadcast_stability(m, rate, rho);
      CHECK(rel_close(bs.determinant, expected));
      CHECK(bs.stable == (frac < 1.0));
      CHECK(solve_network(net, Policy::Arbitrary).feasible() == (frac < 1.0));
    }
  }
}

TEST_CASE("broadcast stability boundary", "[pmoo]") {
  const auto bs = broadcast_stability(10, 1e9, 1e9 / 18.0);
  CHECK_FALSE(bs.stable);
  CHECK(rel_close(bs.threshold_rho, 1e9 / 18.0));
  CHECK(broadcast_stability(10, 1e9, 0.999 * 1e9 / 18.0).stable);
  CHECK_FALSE(broadcast_stability(10, 1e9, 1e9 / 9.0).stable);
  CHECK_FALSE(broadcast_stability(10, 1e9, 1e9 / 5.0).stable);
  CHECK_THROWS_AS(broadcast_stability(1, 1e9, 1.0), DegenerateRing);

  const auto boundary = testing::broadcast_ring(4, 600.0, 0.001, 1.0, 100.0);
  CHECK_FALSE(solve_network(boundary, Policy::Arbitrary).feasible());
  const auto beyond = solve_network(testing::broadcast_ring(4, 600.0, 0.001, 1.0, 150.0), Policy::Arbitrary);
  CHECK(beyond.verdict == Verdict::NegativeSolution);
  CHECK(beyond.determinant < 0.0);
  CHECK(fixed_point_oracle(testing::broadcast_ring(4, 600.0, 0.001, 1.0, 150.0), Policy::Arbitrary).verdict ==
        Verdict::Diverged);
}

TEST_CASE("exhausted residual rate is an unstable subpath", "[pmoo]") {
  const RingNetwork net({{100.0, 0.01}}, {{1, 1, 1, 0.0, 1.0, 0, 0.0}, {2, 1, 1, 100.0, 1.0, 0, 0.0}});
  CHECK_THROWS_AS(residual_rate(net, 0, 1, Policy::Arbitrary), UnstableSubpath);
  CHECK_THROWS_AS(build_matrix_system(net, Policy::Arbitrary), UnstableSubpath);
  CHECK(solve_network(net, Policy::Arbitrary).verdict == Verdict::UnstableSubpath);
  CHECK(fixed_point_oracle(net, Policy::Arbitrary).verdict == Verdict::UnstableSubpath);
  CHECK_THROWS_AS(e2e_service_curve(net, 0, 1, Policy::Arbitrary, solve_network(net, Policy::Arbitrary)), Error);
}

TEST_CASE("feedforward reduction and PBOO dominance on tandems", "[pmoo][property]") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = testing::random_tandem(rng);
    const auto sol = solve_network(net, Policy::Arbitrary);
    REQUIRE(sol.feasible());
    const Flow& f = net.flow(0);
    for (int n = 1; n <= f.hops; ++n) {
      const auto e2e = e2e_service_curve(net, 0, n, Policy::Arbitrary, sol);
      const auto tandem = tandem_service_curve(net, 0, n);
      CHECK(e2e.rate == tandem.rate);
      CHECK(e2e.latency == tandem.latency);
    }

    // Node by node: left-over of the aggregate cross traffic at its entry
    // burst. Additive pays f's burst at every node, PBOO convolves first.
    double additive = 0.0;
    double burst = f.sigma0;
    std::optional<RateLatencyCurve> chain;
    for (int k : net.subpath(0, f.hops)) {
      TokenBucketCurve cross{0.0, 0.0};
      for (std::size_t i : net.crossing_flows(k)) {
        if (i == 0) continue;
        cross.sigma += sol.burst_after(net, i, net.depth(i, k));
        cross.rho += net.flow(i).rho;
      }
      const auto lo = leftover_arbitrary(net.node(k).service(), cross);
      chain = chain ? convolve_rate_latency(*chain, lo) : lo;
      const double d = horizontal_deviation({burst, f.rho}, lo);
      additive += d;
      burst += f.rho * d;
    }
    const double pboo = horizontal_deviation({f.sigma0, f.rho}, *chain);
    INFO("trial " << trial);
    CHECK(pboo <= additive * (1.0 + 1e-12));
  }
}

TEST_CASE("delay bounds are monotone under parameter perturbation", "[pmoo][property]") {
  Rng rng(313);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto net = testing::random_ring(rng, {6, 6, 0.35, false});
    const auto base = all_delays(net, Policy::Arbitrary);
    if (!std::isfinite(base.front())) continue;
    ++checked;
    const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<int>(net.flow_count()) - 1));
    const int k = rng.integer(1, net.node_count());
    const double bump = rng.uniform(1.01, 1.5);

    const auto more_sigma = all_delays(testing::mutated(net, [&](auto&, auto& fs) { fs[i].sigma0 += bump; }),
                                       Policy::Arbitrary);
    const auto more_rho = all_delays(testing::mutated(net, [&](auto&, auto& fs) { fs[i].rho *= bump; }),
                                     Policy::Arbitrary);
    const auto more_latency = all_delays(
        testing::mutated(net, [&](auto& ns, auto&) { ns[k - 1].latency += 0.01 * bump; }), Policy::Arbitrary);
    const auto more_rate =
        all_delays(testing::mutated(net, [&](auto& ns, auto&) { ns[k - 1].rate *= bump; }), Policy::Arbitrary);
    for (std::size_t r = 0; r < base.size(); ++r) {
      INFO("trial " << trial << " row " << r);
      CHECK(more_sigma[r] >= base[r]);
      CHECK(more_rho[r] >= base[r]);
      CHECK(more_latency[r] >= base[r]);
      CHECK(more_rate[r] <= base[r]);
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("fixed priority coincides with arbitrary multiplexing when priorities are flat", "[pmoo][property]") {
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = testing::random_ring(rng, {8, 8, 0.5, false});
    const auto a = solve_network(net, Policy::Arbitrary);
    const auto b = solve_network(net, Policy::FixedPriority);
    REQUIRE(a.verdict == b.verdict);
    if (!a.feasible()) continue;
    CHECK(a.latency == b.latency);
    CHECK(a.burst == b.burst);
  }
}

TEST_CASE("fixed priority never exceeds arbitrary without lower-priority frames", "[pmoo][property]") {
  Rng rng(405);
  for (int trial = 0; trial < 100; ++trial) {
    auto net = testing::random_ring(rng, {8, 8, 0.5, true});
    net = testing::mutated(net, [](auto&, auto& fs) {
      for (auto& f : fs) f.max_frame = 0.0;
    });
    const auto arb = all_delays(net, Policy::Arbitrary);
    const auto fp = all_delays(net, Policy::FixedPriority);
    for (std::size_t r = 0; r < arb.size(); ++r) CHECK(fp[r] <= arb[r] * (1.0 + 1e-12));
  }
}

TEST_CASE("lower-priority frames add blocking latency", "[pmoo]") {
  // f has priority 0; the other flow has priority 1 and an 8-bit frame.
  const RingNetwork net({{100.0, 0.01}, {100.0, 0.01}}, {{1, 1, 2, 10.0, 1.0, 0, 0.0}, {2, 2, 2, 10.0, 1.0, 1, 8.0}});
  const auto sol = solve_network(net, Policy::FixedPriority);
  REQUIRE(sol.feasible());
  // f sees no interferer; each node adds L/R = 0.08 to its latency.
  CHECK(sol.rate[sol.index(0, 2)] == 100.0);
  CHECK(rel_close(sol.latency_of(0, 2), 2 * (0.01 + 0.08)));
  CHECK(rel_close(effective_node_latency(net, 0, 1, Policy::FixedPriority), 0.09));
  CHECK(effective_node_latency(net, 1, 1, Policy::FixedPriority) == 0.01);
}
