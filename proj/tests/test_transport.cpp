#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "wh1/transport.hpp"

using namespace wh1;
using namespace wh1::testing;

namespace {

void expect_marginals(const TransportPlan& plan) {
  const auto rows = row_sums(plan);
  const auto cols = column_sums(plan);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(rows[i], plan.source[i].w, 1e-9);
  for (std::size_t j = 0; j < cols.size(); ++j) EXPECT_NEAR(cols[j], plan.target[j].w, 1e-9);
  EXPECT_LE(plan.entries.size(), plan.source.size() + plan.target.size() - 1);
  double cost = 0.0;
  for (const auto& e : plan.entries) {
    EXPECT_GE(e.mass, 0.0);
    cost += e.mass * cost_pow(plan.source[e.i].x, plan.target[e.j].x, plan.p);
  }
  EXPECT_NEAR(cost, plan.cost, 1e-12);
}

}  // namespace

TEST(SolveOT, IdenticalListsCostZero) {
  const Atoms a{{Point(0, 0), 0.2}, {Point(1, 0), 0.3}, {Point(0, 1), 0.5}};
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const auto plan = solve_ot(a, a, p);
    EXPECT_NEAR(plan.cost, 0.0, 1e-15);
    for (const auto& e : plan.entries) EXPECT_EQ(e.i, e.j);
    expect_marginals(plan);
  }
}

TEST(SolveOT, TwoDiracs) {
  const auto plan = solve_ot({{Point(0, 0), 1.0}}, {{Point(2, 0), 1.0}}, 2.0);
  EXPECT_DOUBLE_EQ(plan.cost, 4.0);
}

TEST(SolveOT, TwoByTwoVertexExample) {
  // Points placed so that the cost matrix is [[0,1],[1,0]] for p = 1.
  const Atoms mu{{Point(0, 0), 0.7}, {Point(1, 0), 0.3}};
  const Atoms nu{{Point(0, 0), 0.4}, {Point(1, 0), 0.6}};
  const auto plan = solve_ot(mu, nu, 1.0);
  EXPECT_NEAR(plan.cost, 0.3, 1e-15);
  ASSERT_EQ(plan.entries.size(), 3u);
  EXPECT_NEAR(plan.entries[0].mass, 0.4, 1e-15);
  EXPECT_NEAR(plan.entries[1].mass, 0.3, 1e-15);
  EXPECT_NEAR(plan.entries[2].mass, 0.3, 1e-15);
  EXPECT_EQ(plan.entries[2].i, 1);
  EXPECT_EQ(plan.entries[2].j, 1);
}

TEST(SolveOT, UnbalancedMarginals) {
  try {
    solve_ot({{Point(0, 0), 1.0}}, {{Point(1, 0), 0.5}}, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "unbalanced marginals");
  }
}

TEST(SolveOT, MatchesOracle) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5), m = 1 + static_cast<int>(rng() % 5);
    const double p = std::vector<double>{1.0, 1.5, 2.0, 3.0}[rng() % 4];
    const Atoms mu = random_atoms(rng, n), nu = random_atoms(rng, m);
    const auto plan = solve_ot(mu, nu, p);
    EXPECT_NEAR(plan.cost, oracle_ot_cost(mu, nu, p), 1e-9);
    expect_marginals(plan);
  }
}

TEST(SolveOT, OracleAgreesWithSubsetEnumerationOnTinyInstances) {
  // Independent check of the oracle: for 2x2 problems the polytope is a
  // segment parameterised by γ11 ∈ [max(0, a1 − b2), min(a1, b1)].
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Atoms mu = random_atoms(rng, 2), nu = random_atoms(rng, 2);
    const double a1 = mu[0].w, b1 = nu[0].w, b2 = nu[1].w;
    auto cost = [&](double g11) {
      const double g12 = a1 - g11, g21 = b1 - g11, g22 = b2 - g12;
      return g11 * cost_pow(mu[0].x, nu[0].x, 2) + g12 * cost_pow(mu[0].x, nu[1].x, 2) +
             g21 * cost_pow(mu[1].x, nu[0].x, 2) + g22 * cost_pow(mu[1].x, nu[1].x, 2);
    };
    const double lo = std::max(0.0, a1 - b2), hi = std::min(a1, b1);
    EXPECT_NEAR(oracle_ot_cost(mu, nu, 2.0), std::min(cost(lo), cost(hi)), 1e-12);
  }
}

TEST(SolveOT, MetricAxioms) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const double p = trial % 2 ? 1.0 : 2.0;
    const Atoms a = random_atoms(rng, 1 + static_cast<int>(rng() % 5));
    const Atoms b = random_atoms(rng, 1 + static_cast<int>(rng() % 5));
    const Atoms c = random_atoms(rng, 1 + static_cast<int>(rng() % 5));
    auto W = [&](const Atoms& x, const Atoms& y) { return std::pow(solve_ot(x, y, p).cost, 1.0 / p); };
    EXPECT_NEAR(W(a, a), 0.0, 1e-9);
    EXPECT_NEAR(W(a, b), W(b, a), 1e-9);
    EXPECT_LE(W(a, c), W(a, b) + W(b, c) + 1e-9);
  }
}

TEST(SolveOT, DegenerateInstancesTerminate) {
  // Equal weights everywhere produce many degenerate pivots.
  Atoms mu, nu;
  for (int k = 0; k < 12; ++k) {
    mu.push_back({Point(k % 4, k / 4), 1.0 / 12});
    nu.push_back({Point(k % 3, k / 3), 1.0 / 12});
  }
  const auto plan = solve_ot(mu, nu, 2.0);
  expect_marginals(plan);
}

TEST(LowerBounded, ZeroLowerIsNearestAssignment) {
  const Atoms mu{{Point(0, 0), 0.5}, {Point(3, 0), 0.5}};
  const Atoms t{{Point(1, 0), 0}, {Point(2.5, 0), 0}, {Point(10, 0), 0}};
  const auto plan = solve_ot_lower_bounded(mu, t, {0, 0, 0}, 2.0);
  EXPECT_NEAR(plan.cost, 0.5 * 1.0 + 0.5 * 0.25, 1e-12);
  EXPECT_NEAR(plan.target[0].w, 0.5, 1e-12);
  EXPECT_NEAR(plan.target[1].w, 0.5, 1e-12);
  EXPECT_NEAR(plan.target[2].w, 0.0, 1e-12);
}

TEST(LowerBounded, FullMarginalEqualsSolveOT) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Atoms mu = random_atoms(rng, 4), nu = random_atoms(rng, 5);
    std::vector<double> lower;
    for (const auto& b : nu) lower.push_back(b.w);
    EXPECT_NEAR(solve_ot_lower_bounded(mu, nu, lower, 2.0).cost, solve_ot(mu, nu, 2.0).cost, 1e-9);
  }
}

TEST(LowerBounded, OneSourceTwoTargets) {
  const auto plan =
      solve_ot_lower_bounded({{Point(0, 0), 1.0}}, {{Point(1, 0), 0}, {Point(2, 0), 0}}, {0.3, 0.2}, 1.0);
  EXPECT_NEAR(plan.cost, 1.2, 1e-12);
  EXPECT_NEAR(plan.target[0].w, 0.8, 1e-12);
  EXPECT_NEAR(plan.target[1].w, 0.2, 1e-12);
}

TEST(LowerBounded, InsufficientMass) {
  try {
    solve_ot_lower_bounded({{Point(0, 0), 1.0}}, {{Point(1, 0), 0}, {Point(2, 0), 0}}, {0.7, 0.5}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "insufficient mass");
  }
}

TEST(LowerBounded, CostMonotoneInLowerBounds) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Atoms mu = random_atoms(rng, 4);
    Atoms t = random_atoms(rng, 6);
    std::vector<double> lower(6);
    for (auto& l : lower) l = uniform(rng, 0.0, 0.15);
    double prev = solve_ot_lower_bounded(mu, t, lower, 2.0).cost;
    for (int step = 0; step < 4; ++step) {
      for (auto& l : lower) l *= uniform(rng, 0.3, 1.0);
      const double c = solve_ot_lower_bounded(mu, t, lower, 2.0).cost;
      EXPECT_LE(c, prev + 1e-12);
      prev = c;
    }
  }
}

TEST(Interpolate, Endpoints) {
  const Atoms mu{{Point(0, 0), 0.5}, {Point(1, 1), 0.5}};
  const Atoms nu{{Point(2, 0), 0.25}, {Point(3, 3), 0.75}};
  const auto plan = solve_ot(mu, nu, 2.0);
  const auto src = interpolate(plan, 1.0);
  const auto tgt = interpolate(plan, 0.0);
  EXPECT_NEAR(total_mass(src), 1.0, 1e-15);
  for (const auto& a : src) {
    const auto it = std::find_if(mu.begin(), mu.end(), [&](const Atom& b) { return b.x == a.x; });
    ASSERT_NE(it, mu.end());
    EXPECT_NEAR(it->w, a.w, 1e-15);
  }
  for (const auto& a : tgt) {
    const auto it = std::find_if(nu.begin(), nu.end(), [&](const Atom& b) { return b.x == a.x; });
    ASSERT_NE(it, nu.end());
    EXPECT_NEAR(it->w, a.w, 1e-15);
  }
}

TEST(Interpolate, Midpoint) {
  const auto plan = solve_ot({{Point(0, 0), 1.0}}, {{Point(2, 0), 1.0}}, 2.0);
  const auto mid = interpolate(plan, 0.5);
  ASSERT_EQ(mid.size(), 1u);
  EXPECT_EQ(mid[0].x, Point(1, 0));
  EXPECT_EQ(mid[0].w, 1.0);
  EXPECT_THROW(interpolate(plan, 1.5), Error);
}

TEST(Interpolate, GeodesicProperty) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = trial % 2 ? 1.0 : 2.0;
    const Atoms mu = random_atoms(rng, 3), nu = random_atoms(rng, 4);
    const auto plan = solve_ot(mu, nu, p);
    const double w = std::pow(plan.cost, 1.0 / p);
    for (double s : {0.25, 0.5, 0.8}) {
      const double ws = std::pow(solve_ot(mu, interpolate(plan, s), p).cost, 1.0 / p);
      EXPECT_NEAR(ws, (1.0 - s) * w, 1e-7);
    }
  }
}

TEST(Blowup, Examples) {
  const Atoms a{{Point(2, 0), 0.5}, {Point(-1, 3), 0.5}};
  const auto id = blowup_pushforward(a, Point(0, 0), 1.0);
  EXPECT_EQ(id[0].x, a[0].x);
  EXPECT_EQ(id[1].w, 0.5);

  const auto b = blowup_pushforward({{Point(2, 0), 0.5}}, Point(1, 0), 0.5);
  EXPECT_EQ(b[0].x, Point(2, 0));
  EXPECT_EQ(b[0].w, 1.0);

  const auto twice = blowup_pushforward(blowup_pushforward(a, Point(0, 0), 0.5), Point(0, 0), 0.25);
  const auto once = blowup_pushforward(a, Point(0, 0), 0.125);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(distance(twice[k].x, once[k].x), 0.0, 1e-12);
    EXPECT_NEAR(twice[k].w, once[k].w, 1e-12);
  }
  EXPECT_THROW(blowup_pushforward(a, Point(0, 0), 0.0), Error);
}

TEST(Blowup, ScalingIdentity) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = std::vector<double>{1.0, 1.5, 2.0, 3.0}[trial % 4];
    const Atoms mu = random_atoms(rng, 3), nu = random_atoms(rng, 3);
    const Point y0(uniform(rng), uniform(rng));
    const double w = solve_ot(mu, nu, p).cost;
    for (double r : {0.1, 0.5, 2.0}) {
      const double wb = solve_ot(blowup_pushforward(mu, y0, r), blowup_pushforward(nu, y0, r), p).cost;
      EXPECT_LE(std::abs(std::pow(r, p + 1) * wb - w), 1e-9 * (1 + w));
    }
  }
}

TEST(Discretize, Examples) {
  const auto two = discretize_network(segment(Point(0, 0), Point(1, 0)), 0.5);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_DOUBLE_EQ(two[0].t, 0.25);
  EXPECT_DOUBLE_EQ(two[1].t, 0.75);
  EXPECT_DOUBLE_EQ(two[0].share, 0.5);

  const auto four = discretize_network(segment(Point(0, 0), Point(1, 0)), 0.3);
  ASSERT_EQ(four.size(), 4u);
  for (const auto& q : four) EXPECT_DOUBLE_EQ(q.share, 0.25);

  const auto tri = discretize_network(triangle(), 1.0);
  ASSERT_EQ(tri.size(), 3u);
  for (int e = 0; e < 3; ++e) EXPECT_EQ(tri[e].edge, e);
  EXPECT_THROW(discretize_network(triangle(), 0.0), Error);
}

TEST(Discretize, SharesSumToLength) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = random_connected_network(rng, 7, 2);
    const double h = uniform(rng, 0.01, 0.3);
    double total = 0.0;
    for (const auto& q : discretize_network(net, h)) {
      total += q.share;
      EXPECT_LE(q.share, h + 1e-12);
    }
    EXPECT_NEAR(total, network_length(net), 1e-9);
  }
}
