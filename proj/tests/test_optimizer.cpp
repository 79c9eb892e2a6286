#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "wh1/optimizer.hpp"

using namespace wh1;
using namespace wh1::testing;

namespace {

OptimizerConfig config(double lambda, double p, double h) {
  OptimizerConfig c;
  c.energy.lambda = lambda;
  c.energy.p = p;
  c.energy.h = h;
  return c;
}

void expect_same_report(const SolveReport& a, const SolveReport& b) {
  EXPECT_EQ(a.final_energy, b.final_energy);
  EXPECT_EQ(a.energy_trace, b.energy_trace);
  EXPECT_EQ(a.rounds, b.rounds);
  ASSERT_EQ(a.moves.size(), b.moves.size());
  for (std::size_t k = 0; k < a.moves.size(); ++k) {
    EXPECT_EQ(a.moves[k].kind, b.moves[k].kind);
    EXPECT_EQ(a.moves[k].index, b.moves[k].index);
    EXPECT_EQ(a.moves[k].details, b.moves[k].details);
  }
  ASSERT_EQ(a.final_net.vertices.size(), b.final_net.vertices.size());
  for (std::size_t k = 0; k < a.final_net.vertices.size(); ++k) EXPECT_EQ(a.final_net.vertices[k], b.final_net.vertices[k]);
  EXPECT_EQ(a.final_net.edges, b.final_net.edges);
}

}  // namespace

TEST(SplitCollapse, InversePairOnStraightEdge) {
  const Network seg = polyline({Point(0, 0), Point(1, 0.5), Point(1.5, 2)});
  for (int e = 0; e < 2; ++e) {
    const Network s = split_edge(seg, e);
    EXPECT_EQ(s.vertices.size(), 4u);
    EXPECT_NEAR(network_length(s), network_length(seg), 1e-15);
    const Network back = collapse_edge(s, e);
    EXPECT_NEAR(hausdorff_distance(back, seg, 1e-3), 0.0, 1e-12);
    EXPECT_EQ(back.vertices.size(), 3u);
    EXPECT_EQ(back.edges.size(), 2u);
    EXPECT_NEAR(network_length(back), network_length(seg), 1e-12);
  }
}

TEST(SplitCollapse, SplitPreservesLengthExactly) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = random_connected_network(rng, 6, 1);
    const int e = static_cast<int>(rng() % net.edges.size());
    EXPECT_NEAR(network_length(split_edge(net, e)), network_length(net), 1e-15);
  }
}

TEST(SplitCollapse, CollapseTriangleEdge) {
  const Network c = collapse_edge(triangle(), 0);
  EXPECT_EQ(c.vertices.size(), 2u);
  EXPECT_EQ(c.edges.size(), 1u);
  EXPECT_TRUE(is_connected(c));
}

TEST(SplitCollapse, CollapseKeepsConnectivity) {
  std::mt19937_64 rng(74);
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = random_connected_network(rng, 6, 2);
    for (int e = 0; e < static_cast<int>(net.edges.size()); ++e) EXPECT_TRUE(is_connected(collapse_edge(net, e)));
  }
  EXPECT_THROW(collapse_edge(triangle(), 9), Error);
}

TEST(VertexStep, FixedPointAtBarycentre) {
  const SourceMeasure rho = atoms_measure({{Point(0, 0), 0.25}, {Point(1, 0), 0.25}, {Point(0.5, 1), 0.5}});
  Network pt;
  pt.add_vertex(Point(0.5, 0.5));
  const auto out = vertex_step(pt, rho, config(0.1, 2, 0.1), 0);
  EXPECT_NEAR(distance(out.vertices[0], pt.vertices[0]), 0.0, 1e-15);
}

TEST(VertexStep, SymmetricSourcePreservesAxis) {
  // ρ0 symmetric about x = 0.5, edge symmetric about x = 0.5.
  const SourceMeasure rho = atoms_measure(
      {{Point(0.3, 0.8), 0.3}, {Point(0.7, 0.8), 0.3}, {Point(0.45, 0.1), 0.2}, {Point(0.55, 0.1), 0.2}});
  const Network seg = segment(Point(0.2, 0.5), Point(0.8, 0.5));
  const OptimizerConfig cfg = config(0.05, 2, 0.1);
  const Network s0 = vertex_step(seg, rho, cfg, 0);
  const Network s1 = vertex_step(seg, rho, cfg, 1);
  EXPECT_NEAR(s0.vertices[0][0] + s1.vertices[1][0], 1.0, 1e-12);
  EXPECT_NEAR(s0.vertices[0][1], s1.vertices[1][1], 1e-12);
}

TEST(VertexStep, SingleVertexMatchesGridMinimiser) {
  const SourceMeasure rho = atoms_measure({{Point(0.1, 0.2), 0.3}, {Point(0.8, 0.6), 0.7}});
  Network pt;
  pt.add_vertex(Point(0.5, 0.1));
  OptimizerConfig cfg = config(0.1, 2, 0.1);
  cfg.eta = 1.0;
  const Point v = vertex_step(pt, rho, cfg, 0).vertices[0];
  // Brute-force 2D grid minimisation of the single-point energy.
  double best = 1e300;
  Point arg;
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 200; ++j) {
      const Point q(i / 200.0, j / 200.0);
      const double e = energy_uniform(Network{2, {q}, {}}, rho, cfg.energy);
      if (e < best) {
        best = e;
        arg = q;
      }
    }
  EXPECT_LE(distance(v, arg), 1.0 / 200.0);
}

TEST(SectorDirections, CountsAndUnitLength) {
  EXPECT_EQ(sector_directions(2, Point(1, 0)).size(), 8u);
  EXPECT_EQ(sector_directions(3, Point(1, 0, 0)).size(), 26u);
  for (const auto& d : sector_directions(3, Point(0, 0, 1))) EXPECT_NEAR(norm(d), 1.0, 1e-15);
}

TEST(OpenLoop, ReducesCycleRankByOne) {
  const OptimizerConfig cfg = config(0.05, 2, 0.05);
  const SourceMeasure rho = atoms_measure({{Point(0.5, 0.1), 0.25}, {Point(0.9, 0.5), 0.25}, {Point(0.5, 0.9), 0.25},
                                           {Point(0.1, 0.5), 0.25}});
  std::vector<Network> nets{unit_square_loop(), triangle(0.8)};
  Network eight = closed_polygon({Point(0.2, 0.2), Point(0.5, 0.5), Point(0.2, 0.8)});
  const int a = eight.add_vertex(Point(0.8, 0.8));
  const int b = eight.add_vertex(Point(0.8, 0.2));
  eight.add_edge(1, a);
  eight.add_edge(a, b);
  eight.add_edge(b, 1);
  nets.push_back(eight);
  for (const auto& net : nets) {
    const auto ev = evaluate_uniform(net, source_to_atoms(rho, 1), cfg.energy);
    const int rank = cycle_rank(net);
    for (const auto& cyc : find_cycles(net)) {
      const auto cand = open_loop(net, ev, cfg, cyc);
      ASSERT_TRUE(cand.has_value());
      EXPECT_EQ(cycle_rank(cand->net), rank - 1);
      EXPECT_TRUE(is_connected(cand->net));
      EXPECT_EQ(cand->cut.crossings, 2);
    }
  }
}

TEST(OpenLoop, NeverCentresOnASourceAtom) {
  const Network tri = triangle();
  Atoms atoms;
  for (int e = 0; e < 3; ++e) atoms.push_back({tri.point_on_edge(e, 0.5), 1.0 / 3.0});
  const SourceMeasure rho = atoms_measure(atoms);
  const OptimizerConfig cfg = config(0.05, 2, 0.1);
  const auto ev = evaluate_uniform(tri, atoms, cfg.energy);
  const auto cand = open_loop(tri, ev, cfg, find_cycles(tri)[0]);
  ASSERT_TRUE(cand.has_value());
  for (const auto& a : atoms) EXPECT_GT(distance(a.x, cand->cut.point), 1e-9);
}

TEST(OpenLoop, SquareWithFaceAtomsIsEvaluatedAndOnlyAcceptedIfBetter) {
  const SourceMeasure rho = atoms_measure({{Point(0.5, -0.2), 0.25}, {Point(1.2, 0.5), 0.25}, {Point(0.5, 1.2), 0.25},
                                           {Point(-0.2, 0.5), 0.25}});
  OptimizerConfig cfg = config(0.05, 2, 0.05);
  const auto [net, rep] = optimize(rho, unit_square_loop(0.3, 0.7), cfg);
  EXPECT_GT(rep.open_loop_attempts, 0);
  for (const auto& m : rep.moves) {
    if (m.kind != MoveKind::open_loop) continue;
    if (m.accepted) {
      EXPECT_LT(m.energy_after, m.energy_before - cfg.accept_tol);
    }
  }
  EXPECT_EQ(cycle_rank(net), 0);
}

TEST(Optimize, SingleDiracShrinksTowardsTheAtom) {
  const SourceMeasure rho = atoms_measure({{Point(0.5, 0.5), 1.0}});
  const Network init = segment(Point(0.45, 0.5), Point(0.6, 0.55));
  const OptimizerConfig cfg = config(0.1, 2, 0.02);
  const auto [net, rep] = optimize(rho, init, cfg);
  EXPECT_LT(rep.final_energy, cfg.energy.lambda * network_length(init));
  EXPECT_TRUE(is_connected(net));
}

TEST(Optimize, CollinearAtomsGiveASubsegment) {
  const SourceMeasure rho = atoms_measure({{Point(0.2, 0.5), 0.3}, {Point(0.5, 0.5), 0.4}, {Point(0.8, 0.5), 0.3}});
  const OptimizerConfig cfg = config(0.01, 2, 0.05);
  const auto [net, rep] = optimize(rho, segment(Point(0.4, 0.5), Point(0.6, 0.5)), cfg);
  EXPECT_EQ(cycle_rank(net), 0);
  EXPECT_TRUE(is_connected(net));
  for (const auto& v : net.vertices) {
    EXPECT_NEAR(v[1], 0.5, 1e-9);
    EXPECT_GE(v[0], 0.2 - 1e-9);
    EXPECT_LE(v[0], 0.8 + 1e-9);
  }
  // No branching: every vertex has degree at most two.
  for (int d : degrees(net)) EXPECT_LE(d, 2);
}

TEST(Optimize, EnergyTraceStrictlyDecreasing) {
  std::mt19937_64 rng(79);
  const SourceMeasure rho = atoms_measure(random_atoms(rng, 5));
  OptimizerConfig cfg = config(0.05, 2, 0.05);
  const auto [net, rep] = optimize(rho, initial_network(rho, cfg, 3), cfg);
  for (std::size_t k = 1; k < rep.energy_trace.size(); ++k)
    EXPECT_LT(rep.energy_trace[k], rep.energy_trace[k - 1] - cfg.accept_tol);
  for (const auto& m : rep.moves) {
    if (m.accepted) {
      EXPECT_LT(m.energy_after, m.energy_before - cfg.accept_tol);
    }
  }
  EXPECT_EQ(rep.final_energy, rep.energy_trace.back());
  EXPECT_TRUE(is_connected(net));
}

TEST(Optimize, DisconnectedInitRejected) {
  Network two;
  for (double x : {0.0, 0.1, 0.3, 0.4}) two.add_vertex(Point(x, 0));
  two.add_edge(0, 1);
  two.add_edge(2, 3);
  EXPECT_THROW(optimize(atoms_measure({{Point(0, 0), 1.0}}), two, config(0.1, 2, 0.05)), Error);
}

TEST(Optimize, Deterministic) {
  std::mt19937_64 rng(83);
  const SourceMeasure rho = atoms_measure(random_atoms(rng, 5));
  OptimizerConfig cfg = config(0.05, 1, 0.05);
  cfg.energy.seed = 9;
  const auto a = optimize(rho, initial_network(rho, cfg, 9), cfg);
  const auto b = optimize(rho, initial_network(rho, cfg, 9), cfg);
  expect_same_report(a.second, b.second);
}

TEST(Optimize, MultistartIndependentOfScheduling) {
  std::mt19937_64 rng(89);
  const SourceMeasure rho = atoms_measure(random_atoms(rng, 4));
  OptimizerConfig cfg = config(0.05, 2, 0.05);
  cfg.energy.seed = 100;
  const auto par = optimize_multistart(rho, cfg, 3, true);
  const auto seq = optimize_multistart(rho, cfg, 3, false);
  expect_same_report(par.second, seq.second);
  ASSERT_EQ(par.second.multistart.size(), 3u);
  for (const auto& [seed, e] : par.second.multistart) EXPECT_GE(e, par.second.final_energy);
  EXPECT_GE(par.second.seed, 100u);
  EXPECT_LE(par.second.seed, 102u);
}

TEST(InitialNetwork, IsASpanningTree) {
  std::mt19937_64 rng(97);
  const SourceMeasure rho = atoms_measure(random_atoms(rng, 6));
  const OptimizerConfig cfg = config(0.05, 2, 0.05);
  const Network net = initial_network(rho, cfg, 1);
  EXPECT_EQ(net.vertices.size(), 6u);
  EXPECT_EQ(net.edges.size(), 5u);
  EXPECT_TRUE(is_connected(net));
}
