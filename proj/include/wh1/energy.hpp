#pragma once

// The network energy W_p^p(ρ0, H^1⌞Σ / H^1(Σ)) + Λ H^1(Σ) and its relaxed
// counterpart W_p^p(ρ0, ν) + Λ L(ν), including the exact inner solve over ν
// supported on a fixed network.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "wh1/geometry.hpp"
#include "wh1/measures.hpp"
#include "wh1/transport.hpp"

namespace wh1 {

struct EnergyConfig {
  double lambda = 0.05;
  double p = 2.0;
  double h = 0.05;         // quadrature spacing along the network
  int quad = 1;            // density cell subdivision
  int alpha_grid = 24;     // α samples of the inner solve
  double alpha_span = 20;  // α grid spans [ℓ, alpha_span·ℓ]
  std::uint64_t seed = 0;
  double excess_tol = 1e-9;
};

inline void validate(const EnergyConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw Error("lambda must be positive");
  if (!(cfg.p >= 1.0)) throw Error("exponent p must be >= 1");
  if (!(cfg.h > 0.0)) throw Error("h must be positive");
  if (cfg.quad < 1) throw Error("quad must be >= 1");
  if (cfg.alpha_grid < 2) throw Error("alpha_grid must be >= 2");
  if (!(cfg.alpha_span > 1.0)) throw Error("alpha_span must exceed 1");
}

/// Everything computed while evaluating the uniform-measure energy; the
/// optimizer reuses the plan and nodes.
struct UniformEvaluation {
  double energy = 0.0;
  double cost = 0.0;
  double length = 0.0;
  QuadratureNodes nodes;
  TransportPlan plan;
};

inline void require_connected(const Network& net) {
  if (net.vertices.empty()) throw Error("empty domain");
  if (!is_connected(net)) throw Error("infeasible: disconnected");
  if (net.edges.empty() && net.vertices.size() != 1) throw Error("infeasible: disconnected");
}

/// Target atoms of the uniform measure: quadrature nodes weighted by h_j / ℓ,
/// or a unit atom on the lone vertex of an edgeless network.
inline Atoms uniform_targets(const Network& net, const QuadratureNodes& nodes, double length) {
  Atoms t;
  if (nodes.empty()) {
    t.push_back({net.vertices.front(), 1.0});
    return t;
  }
  t.reserve(nodes.size());
  for (const auto& q : nodes) t.push_back({q.x, q.share / length});
  return t;
}

inline UniformEvaluation evaluate_uniform(const Network& net, const Atoms& source, const EnergyConfig& cfg) {
  require_connected(net);
  UniformEvaluation ev;
  ev.length = network_length(net);
  ev.nodes = net.edges.empty() ? QuadratureNodes{} : discretize_network(net, cfg.h);
  ev.plan = solve_ot(source, uniform_targets(net, ev.nodes, ev.length), cfg.p);
  ev.cost = ev.plan.cost;
  ev.energy = ev.cost + cfg.lambda * ev.length;
  return ev;
}

inline double energy_uniform(const Network& net, const SourceMeasure& rho0, const EnergyConfig& cfg) {
  return evaluate_uniform(net, source_to_atoms(rho0, cfg.quad), cfg).energy;
}

// ---------------------------------------------------------------------------
// Relaxed problem

struct SolutionNode {
  Point x;
  double share = 0.0;  // arc length carried (0 for injected projection nodes)
  double mass = 0.0;   // realised ν mass
  int edge = -1;       // edge of the input network
  double t = 0.0;
  bool projection = false;
};

struct ExcessNode {
  int node = 0;
  double excess = 0.0;
};

struct RelaxedSolution {
  Network base;       // input network
  NetworkMeasure nu;  // on `base` refined at quadrature pieces and atom sites
  double alpha_star = 0.0;
  double wasserstein_p_cost = 0.0;
  double energy = 0.0;
  std::vector<ExcessNode> excess_nodes;
  std::vector<SolutionNode> nodes;
  TransportPlan plan;  // source atoms -> nodes
  std::vector<std::pair<double, double>> alpha_trace;  // (α, g(α) + Λα) in evaluation order
};

namespace detail {

struct RelaxedProblem {
  Atoms source;
  std::vector<SolutionNode> nodes;
  Atoms targets;
  double p;
  double lambda;

  TransportPlan plan_at(double alpha) const {
    std::vector<double> lower(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) lower[j] = nodes[j].share / alpha;
    return solve_ot_lower_bounded(source, targets, lower, p);
  }
};

/// Nodes of the inner problem: arc-length quadrature plus the projections of
/// the source atoms (zero arc length), deduplicated.
inline std::vector<SolutionNode> relaxed_nodes(const Network& net, const Atoms& source, double h) {
  std::vector<SolutionNode> nodes;
  for (const auto& q : discretize_network(net, h)) nodes.push_back({q.x, q.share, 0.0, q.edge, q.t, false});
  for (const auto& a : source) {
    const Projection pr = project_to_network(a.x, net);
    bool dup = false;
    for (const auto& n : nodes) {
      if (distance(n.x, pr.foot) <= 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) nodes.push_back({pr.foot, 0.0, 0.0, pr.edge, pr.t, true});
  }
  return nodes;
}

/// Builds the network measure on `net` refined at quadrature piece
/// boundaries and at every node carrying mass above its uniform share.
inline NetworkMeasure refine_measure(const Network& net, const std::vector<SolutionNode>& nodes, double alpha,
                                     double h, double tol) {
  NetworkMeasure nu;
  nu.net.dim = net.dim;
  nu.net.vertices = net.vertices;
  std::vector<double> atoms(net.vertices.size(), 0.0);

  struct Mark {
    double t;
    double atom;
  };
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const double len = net.edge_length(e);
    const int k = std::max(1, static_cast<int>(std::ceil(len / h - 1e-12)));
    std::vector<Mark> marks;
    for (int q = 0; q <= k; ++q) marks.push_back({static_cast<double>(q) / k, 0.0});
    for (const auto& n : nodes) {
      if (n.edge != static_cast<int>(e)) continue;
      const double extra = n.mass - n.share / alpha;
      if (extra > tol) marks.push_back({n.t, extra});
    }
    std::stable_sort(marks.begin(), marks.end(), [](const Mark& a, const Mark& b) { return a.t < b.t; });
    // Merge marks closer than 1e-10 in arc length.
    std::vector<Mark> merged;
    for (const auto& mk : marks) {
      if (!merged.empty() && (mk.t - merged.back().t) * len <= 1e-10) merged.back().atom += mk.atom;
      else merged.push_back(mk);
    }
    merged.front().t = 0.0;
    merged.back().t = 1.0;
    std::vector<int> vid(merged.size());
    vid.front() = net.edges[e].a;
    vid.back() = net.edges[e].b;
    for (std::size_t s = 1; s + 1 < merged.size(); ++s) {
      vid[s] = nu.net.add_vertex(net.point_on_edge(e, merged[s].t));
      atoms.push_back(0.0);
    }
    for (std::size_t s = 0; s < merged.size(); ++s) atoms[vid[s]] += merged[s].atom;
    for (std::size_t s = 0; s + 1 < merged.size(); ++s) {
      const double piece = (merged[s + 1].t - merged[s].t) * len;
      // Uniform part of the quadrature piece containing this sub-piece.
      nu.net.add_edge(vid[s], vid[s + 1]);
      nu.edge_masses.push_back(piece / alpha);
    }
  }
  nu.vertex_atoms = std::move(atoms);
  return nu;
}

}  // namespace detail

/// Minimises W_p^p(ρ0, ν) + Λ L(ν) over ν supported on `net`: for each α on a
/// geometric grid over [ℓ, alpha_span·ℓ] the best ν with density ≥ 1/α is an
/// exact lower-bounded transport problem; the grid argmin is refined by
/// golden-section search between its neighbours.
inline RelaxedSolution inner_relaxed_solve(const Network& net, const SourceMeasure& rho0, const EnergyConfig& cfg) {
  validate(cfg);
  require_connected(net);
  const Atoms source = source_to_atoms(rho0, cfg.quad);
  RelaxedSolution sol;
  sol.base = net;
  const double ell = network_length(net);

  if (net.edges.empty()) {
    const Point v = net.vertices.front();
    sol.nodes.push_back({v, 0.0, 1.0, -1, 0.0, true});
    sol.plan = solve_ot(source, Atoms{{v, 1.0}}, cfg.p);
    sol.wasserstein_p_cost = sol.plan.cost;
    sol.energy = sol.plan.cost;
    sol.alpha_star = 0.0;
    sol.nu = uniform_measure(net);
    sol.excess_nodes.push_back({0, 1.0});
    return sol;
  }

  detail::RelaxedProblem prob{source, detail::relaxed_nodes(net, source, cfg.h), {}, cfg.p, cfg.lambda};
  for (const auto& n : prob.nodes) prob.targets.push_back({n.x, 0.0});

  double best_alpha = ell;
  double best_value = std::numeric_limits<double>::infinity();
  TransportPlan best_plan;
  auto evaluate = [&](double alpha) {
    TransportPlan plan = prob.plan_at(alpha);
    const double value = plan.cost + cfg.lambda * alpha;
    sol.alpha_trace.emplace_back(alpha, value);
    if (value < best_value || (value == best_value && alpha < best_alpha)) {
      best_value = value;
      best_alpha = alpha;
      best_plan = std::move(plan);
    }
    return value;
  };

  const int G = cfg.alpha_grid;
  std::vector<double> grid(G), values(G);
  for (int k = 0; k < G; ++k) {
    grid[k] = k == 0 ? ell : ell * std::pow(cfg.alpha_span, static_cast<double>(k) / (G - 1));
    values[k] = evaluate(grid[k]);
  }
  int kbest = 0;
  for (int k = 1; k < G; ++k)
    if (values[k] < values[kbest]) kbest = k;

  double lo = grid[std::max(0, kbest - 1)];
  double hi = grid[std::min(G - 1, kbest + 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = evaluate(x1), f2 = evaluate(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-10 * hi; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = evaluate(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = evaluate(x2);
    }
  }

  sol.alpha_star = best_alpha;
  sol.plan = std::move(best_plan);
  sol.wasserstein_p_cost = sol.plan.cost;
  sol.nodes = prob.nodes;
  const auto cols = column_sums(sol.plan);
  for (std::size_t j = 0; j < sol.nodes.size(); ++j) sol.nodes[j].mass = cols[j];
  for (std::size_t j = 0; j < sol.nodes.size(); ++j) {
    const double extra = sol.nodes[j].mass - sol.nodes[j].share / best_alpha;
    if (extra > cfg.excess_tol) sol.excess_nodes.push_back({static_cast<int>(j), extra});
  }
  sol.nu = detail::refine_measure(net, sol.nodes, best_alpha, cfg.h, cfg.excess_tol);
  sol.energy = sol.wasserstein_p_cost + cfg.lambda * sol.alpha_star;
  return sol;
}

/// Atomisation of a network measure: each edge's mass spread over its
/// quadrature nodes, plus the vertex atoms.
inline Atoms atomize(const NetworkMeasure& nu, double h) {
  Atoms out;
  for (std::size_t e = 0; e < nu.net.edges.size(); ++e) {
    if (nu.edge_masses[e] <= 0.0) continue;
    const double len = nu.net.edge_length(e);
    const int k = std::max(1, static_cast<int>(std::ceil(len / h - 1e-12)));
    for (int q = 0; q < k; ++q) out.push_back({nu.net.point_on_edge(e, (q + 0.5) / k), nu.edge_masses[e] / k});
  }
  for (std::size_t v = 0; v < nu.vertex_atoms.size(); ++v)
    if (nu.vertex_atoms[v] > 0.0) out.push_back({nu.net.vertices[v], nu.vertex_atoms[v]});
  return out;
}

/// W_p^p(ρ0, ν) + Λ L(ν); +∞ when the support of ν is disconnected.
inline double relaxed_energy(const NetworkMeasure& nu, const SourceMeasure& rho0, const EnergyConfig& cfg) {
  if (std::abs(nu.mass() - 1.0) > kMassTol) throw Error("measure mass must be 1");
  const double alpha = length_functional(nu);
  if (!std::isfinite(alpha)) return std::numeric_limits<double>::infinity();
  const auto plan = solve_ot(source_to_atoms(rho0, cfg.quad), atomize(nu, cfg.h), cfg.p);
  return plan.cost + cfg.lambda * alpha;
}

}  // namespace wh1
