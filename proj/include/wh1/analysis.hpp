#pragma once

// Verification checks on computed objects: projection property of optimal
// plans, structure of relaxed solutions, tangent decay under blow-up,
// localized optimality, lower semicontinuity of length and tube-mass bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wh1/energy.hpp"
#include "wh1/geometry.hpp"
#include "wh1/measures.hpp"
#include "wh1/transport.hpp"

namespace wh1 {

/// Volume of the unit ball in R^k (ω1 = 2, ω2 = π, ω3 = 4π/3).
inline double omega(int k) { return unit_ball_volume(k); }

namespace detail {
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Seed of the k-th independent substream (splitmix64 finaliser).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Projection property

enum class GapRestriction { all, cycle_nodes };

struct GapStats {
  double max = 0.0;
  double mean = 0.0;
  double p95 = 0.0;
  double mass = 0.0;  // plan mass entering the statistics
  int entries = 0;
};

struct GapOptions {
  GapRestriction restrict_to = GapRestriction::all;
  // Target nodes within `exclusion_radius` of any of these points are left
  // out (used to drop nodes next to excess atoms under the cycle restriction).
  std::vector<Point> excluded_points;
  double exclusion_radius = 0.0;
};

/// Mass-weighted statistics of |x_i − y_j|^p − dist(x_i, net)^p over the
/// plan entries. Tiny negative values from rounding are clamped to 0.
inline GapStats projection_gap(const Network& net, const TransportPlan& plan, const GapOptions& opt = {}) {
  std::vector<char> on_cycle(net.edges.size(), 0);
  if (opt.restrict_to == GapRestriction::cycle_nodes)
    for (const auto& c : find_cycles(net))
      for (int e : c) on_cycle[e] = 1;

  std::vector<char> use(plan.target.size(), 1);
  for (std::size_t j = 0; j < plan.target.size(); ++j) {
    const Point& y = plan.target[j].x;
    if (opt.restrict_to == GapRestriction::cycle_nodes) {
      const Projection pr = project_to_network(y, net);
      use[j] = pr.edge >= 0 && on_cycle[pr.edge];
    }
    for (const auto& z : opt.excluded_points)
      if (distance(y, z) <= opt.exclusion_radius) use[j] = 0;
  }
  std::vector<double> dist_p(plan.source.size());
  for (std::size_t i = 0; i < plan.source.size(); ++i)
    dist_p[i] = pow_p(distance_to_network(plan.source[i].x, net), plan.p);

  std::vector<std::pair<double, double>> gaps;  // (gap, mass)
  GapStats st;
  double acc = 0.0;
  for (const auto& e : plan.entries) {
    if (!use[e.j] || e.mass <= 0.0) continue;
    const double g = std::max(0.0, cost_pow(plan.source[e.i].x, plan.target[e.j].x, plan.p) - dist_p[e.i]);
    gaps.emplace_back(g, e.mass);
    st.max = std::max(st.max, g);
    acc += g * e.mass;
    st.mass += e.mass;
  }
  st.entries = static_cast<int>(gaps.size());
  if (gaps.empty()) return st;
  st.mean = acc / st.mass;
  std::stable_sort(gaps.begin(), gaps.end());
  double cum = 0.0;
  st.p95 = gaps.back().first;
  for (const auto& [g, m] : gaps) {
    cum += m;
    if (cum >= 0.95 * st.mass) {
      st.p95 = g;
      break;
    }
  }
  return st;
}

/// Threshold used by the projection check: 2·h^p + 1e-9.
inline double gap_tolerance(double h, double p) { return 2.0 * std::pow(h, p) + 1e-9; }

// ---------------------------------------------------------------------------
// Structure of relaxed solutions

struct DensityRow {
  int node = 0;
  Point x;
  double uniform = 0.0;  // h_j / α⋆
  double mass = 0.0;     // m_j
  double excess = 0.0;   // m_j − h_j / α⋆
  bool flagged = false;
  double allowance = 0.0;  // Σ a_i over atoms projecting within h of the node
  bool ok = true;
};

struct DensityCharacterization {
  std::vector<DensityRow> rows;  // flagged nodes only
  double max_uniform_deviation = 0.0;  // over unflagged nodes
  bool pass = true;
};

/// Flags nodes whose mass departs from the uniform share by more than
/// `char_tol`; passes iff each flagged node lies within h of the projection
/// of a source atom and carries excess at most the atoms' mass + char_tol.
inline DensityCharacterization density_characterization(const RelaxedSolution& sol, const SourceMeasure& rho0,
                                                        double h, double char_tol = 1e-6) {
  DensityCharacterization out;
  // Pure atomic sources use ρ0's atoms; with a density part the discretised
  // source atoms of the solution's plan play the role of the a_i.
  const Atoms& atoms = rho0.density ? sol.plan.source : rho0.atoms;
  std::vector<Point> feet;
  for (const auto& a : atoms) feet.push_back(project_to_network(a.x, sol.base).foot);
  const double inv_alpha = sol.alpha_star > 0.0 ? 1.0 / sol.alpha_star : 0.0;
  for (std::size_t j = 0; j < sol.nodes.size(); ++j) {
    const auto& n = sol.nodes[j];
    DensityRow row;
    row.node = static_cast<int>(j);
    row.x = n.x;
    row.uniform = n.share * inv_alpha;
    row.mass = n.mass;
    row.excess = n.mass - row.uniform;
    row.flagged = std::abs(row.excess) > char_tol;
    if (!row.flagged) {
      out.max_uniform_deviation = std::max(out.max_uniform_deviation, std::abs(row.excess));
      continue;
    }
    bool near = false;
    for (std::size_t i = 0; i < feet.size(); ++i) {
      if (distance(feet[i], n.x) <= h + 1e-12) {
        near = true;
        row.allowance += atoms[i].w;
      }
    }
    row.ok = near && row.excess > 0.0 && row.excess <= row.allowance + char_tol;
    out.pass = out.pass && row.ok;
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Blow-up decay

struct BlowupRow {
  double r = 0.0;
  double distance = 0.0;  // d_H((net − y0)/r ∩ B̄1, [−τ, τ])
};

struct BlowupTable {
  Point y0;
  Point tangent;
  double spacing = 0.0;  // sampling spacing in the unit ball
  double band = 0.0;     // honesty band ±2·spacing
  std::vector<BlowupRow> rows;
};

/// For each radius, Hausdorff distance between the unit-ball blow-up of the
/// network at y0 and the tangent segment [−τ, τ], τ estimated at the
/// smallest radius.
inline BlowupTable blowup_decay(const Network& net, const Point& y0, const std::vector<double>& radii,
                                double spacing = 1e-4) {
  if (radii.empty()) throw Error("empty radius list");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw Error("radius must be positive");
    if (k > 0 && !(radii[k] < radii[k - 1])) throw Error("radii must be decreasing");
  }
  if (distance_to_network(y0, net) > 1e-6) throw Error("point not on network");
  BlowupTable tab;
  tab.y0 = y0;
  tab.spacing = spacing;
  tab.band = 2.0 * spacing;
  tab.tangent = tangent_estimate(net, y0, radii.back());
  Network line{net.dim, {tab.tangent * -1.0, tab.tangent}, {{0, 1}}};
  for (double r : radii) {
    Network local = clip_network(net, y0, r);
    for (auto& v : local.vertices) v = (v - y0) / r;
    tab.rows.push_back({r, hausdorff_distance(local, line, spacing)});
  }
  return tab;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw Error("log-log slope needs positive values");
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double loglog_slope(const BlowupTable& tab) {
  std::vector<double> x, y;
  for (const auto& row : tab.rows) {
    x.push_back(row.r);
    y.push_back(row.distance);
  }
  return loglog_slope(x, y);
}

// ---------------------------------------------------------------------------
// Localized optimality

/// The localized problem in the blown-up frame: transport σ̄ onto a
/// competitor Σ' ⊂ B̄1 carrying a measure ≥ λ·H¹⌞Σ' of total mass M.
struct LocalizedProblem {
  Point y0;
  double r = 0.0;
  double p = 2.0;
  double h = 0.05;            // quadrature spacing in the blown-up frame
  Atoms sigma;                // blown-up interpolated source σ̄
  double mass = 0.0;          // M = ν⋆(ball)/r
  double lower_density = 0.0; // λ = min(1/α⋆, M / H¹(incumbent))
  Network incumbent;          // blown-up net ∩ B̄1
  std::vector<Point> crossings;
  bool outside_connected = false;
  double incumbent_cost = 0.0;
};

struct LocalizedCost {
  bool feasible = false;
  double cost = std::numeric_limits<double>::infinity();
};

/// Cost of a competitor: lower-bounded transport from σ̄ to quadrature nodes
/// of Σ' (plus zero-bound nodes at the projections of σ̄'s atoms).
inline LocalizedCost localized_cost(const LocalizedProblem& prob, const Network& competitor) {
  LocalizedCost out;
  const double len = network_length(competitor);
  if (prob.lower_density * len > prob.mass * (1.0 + 1e-12) + 1e-15) return out;
  Atoms targets;
  std::vector<double> lower;
  if (competitor.edges.empty()) {
    targets.push_back({competitor.vertices.front(), 0.0});
    lower.push_back(0.0);
  } else {
    for (const auto& q : discretize_network(competitor, prob.h)) {
      targets.push_back({q.x, 0.0});
      lower.push_back(q.share * prob.lower_density);
    }
    for (const auto& a : prob.sigma) {
      const Point foot = project_to_network(a.x, competitor).foot;
      bool dup = false;
      for (const auto& t : targets) dup = dup || distance(t.x, foot) <= 1e-12;
      if (!dup) {
        targets.push_back({foot, 0.0});
        lower.push_back(0.0);
      }
    }
  }
  // Absorb rounding so the lower bounds never exceed the available mass.
  double lsum = 0.0;
  for (double l : lower) lsum += l;
  const double smass = total_mass(prob.sigma);
  if (lsum > smass)
    for (double& l : lower) l *= smass / lsum;
  out.cost = solve_ot_lower_bounded(prob.sigma, targets, lower, prob.p).cost;
  out.feasible = true;
  return out;
}

/// Admissibility of a competitor: inside B̄1, at most two components, and
/// joined with the outside part into a connected set (the outside part meets
/// the ball only at the crossing points).
inline bool is_admissible(const LocalizedProblem& prob, const Network& competitor) {
  for (const auto& v : competitor.vertices)
    if (norm(v) > 1.0 + 1e-9) return false;
  if (competitor.vertices.empty()) return false;
  const int comps = component_count(competitor);
  if (comps > 2) return false;
  // Component of each vertex.
  UnionFind uf(competitor.vertices.size());
  for (const auto& e : competitor.edges) uf.unite(e.a, e.b);
  auto touches = [&](std::size_t root, const Point& c) {
    for (std::size_t v = 0; v < competitor.vertices.size(); ++v)
      if (uf.find(v) == root && distance(competitor.vertices[v], c) <= 1e-9) return true;
    return false;
  };
  std::vector<std::size_t> roots;
  for (std::size_t v = 0; v < competitor.vertices.size(); ++v) {
    const std::size_t rt = uf.find(v);
    if (std::find(roots.begin(), roots.end(), rt) == roots.end()) roots.push_back(rt);
  }
  for (std::size_t rt : roots) {
    bool any = false;
    for (const auto& c : prob.crossings) any = any || touches(rt, c);
    if (!any) return false;
  }
  if (prob.outside_connected) return true;
  // Outside part split by the cut: some component must join both crossings.
  for (std::size_t rt : roots) {
    bool all = true;
    for (const auto& c : prob.crossings) all = all && touches(rt, c);
    if (all) return true;
  }
  return false;
}

/// Builds the blown-up localized problem at a clean cut (y0, r).
inline LocalizedProblem localized_problem(const RelaxedSolution& sol, const Point& y0, double r,
                                          const EnergyConfig& cfg) {
  const Network& net = sol.base;
  const CutAnalysis cut = analyze_cut(net, y0, r);
  if (!is_clean_cut(cut, false)) throw Error("no clean cut radius");
  LocalizedProblem prob;
  prob.y0 = y0;
  prob.r = r;
  prob.p = cfg.p;
  prob.h = cfg.h / r;
  prob.outside_connected = cut.outside_connected;
  for (const auto& c : cut.crossing_points) prob.crossings.push_back((c - y0) / r);

  // Sub-plan of the mass landing in the closed ball, interpolated at s = r.
  TransportPlan sub;
  sub.p = sol.plan.p;
  sub.source = sol.plan.source;
  sub.target = sol.plan.target;
  double nu_ball = 0.0;
  for (std::size_t j = 0; j < sol.nodes.size(); ++j)
    if (distance(sol.nodes[j].x, y0) <= r) nu_ball += sol.nodes[j].mass;
  for (const auto& e : sol.plan.entries)
    if (distance(sol.plan.target[e.j].x, y0) <= r) sub.entries.push_back(e);
  if (sub.entries.empty()) throw Error("no mass in the localization ball");
  prob.sigma = blowup_pushforward(interpolate(sub, r), y0, r);
  prob.mass = nu_ball / r;

  prob.incumbent = clip_network(net, y0, r);
  for (auto& v : prob.incumbent.vertices) v = (v - y0) / r;
  const double inc_len = network_length(prob.incumbent);
  prob.lower_density = sol.alpha_star > 0.0 ? 1.0 / sol.alpha_star : 0.0;
  if (inc_len > 0.0) prob.lower_density = std::min(prob.lower_density, prob.mass / inc_len);
  prob.incumbent_cost = localized_cost(prob, prob.incumbent).cost;
  return prob;
}

struct LocalizationCounterexample {
  int trial = 0;
  Network competitor;
  double cost = 0.0;
  double incumbent_cost = 0.0;
};

struct LocalizationResult {
  int trials = 0;
  int feasible = 0;
  int violations = 0;
  double incumbent_cost = 0.0;
  double best_competitor_cost = std::numeric_limits<double>::infinity();
  Point y0;
  double r = 0.0;
  std::vector<LocalizationCounterexample> counterexamples;
};

namespace detail {

inline Point clamp_to_unit_ball(Point x) {
  const double n = norm(x);
  return n > 1.0 ? x / n : x;
}

/// Random admissible replacement in the blown-up frame: a perturbed polyline
/// between the crossing points, optionally with a branch, or (when the
/// outside stays connected) two arcs each hanging from one crossing point.
inline Network random_competitor(const LocalizedProblem& prob, std::mt19937_64& rng) {
  const int dim = prob.incumbent.dim;
  auto jitter = [&](double amp) {
    Point d;
    for (int k = 0; k < dim; ++k) d[k] = amp * (2.0 * uniform01(rng) - 1.0);
    return d;
  };
  static constexpr double amps[] = {0.02, 0.1, 0.3};
  const double amp = amps[rng() % 3];
  const Point c0 = prob.crossings[0], c1 = prob.crossings[1];
  Network net{dim, {}, {}};
  const int kind = prob.outside_connected ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 2);
  if (kind < 2) {
    const int k = 1 + static_cast<int>(rng() % 5);
    std::vector<double> ts(k);
    for (auto& t : ts) t = uniform01(rng);
    std::sort(ts.begin(), ts.end());
    int prev = net.add_vertex(c0);
    for (double t : ts) {
      const int v = net.add_vertex(clamp_to_unit_ball(c0 + (c1 - c0) * t + jitter(amp)));
      net.add_edge(prev, v);
      prev = v;
    }
    net.add_edge(prev, net.add_vertex(c1));
    if (kind == 1) {
      const int base = static_cast<int>(rng() % net.vertices.size());
      const int tip = net.add_vertex(clamp_to_unit_ball(net.vertices[base] + jitter(amp)));
      net.add_edge(base, tip);
    }
  } else {
    for (const Point& c : {c0, c1}) {
      const double reach = uniform01(rng);
      const Point tip = clamp_to_unit_ball(c + (-1.0 * c) * reach + jitter(amp));
      const int a = net.add_vertex(c);
      const int m = net.add_vertex(clamp_to_unit_ball(0.5 * (c + tip) + jitter(amp)));
      net.add_edge(a, m);
      net.add_edge(m, net.add_vertex(tip));
    }
  }
  // Drop degenerate edges produced by clamping.
  Network clean{dim, net.vertices, {}};
  for (const auto& e : net.edges)
    if (distance(net.vertices[e.a], net.vertices[e.b]) > 1e-9) clean.add_edge(e.a, e.b);
  return compact(clean);
}

}  // namespace detail

/// Samples `trials` random admissible replacements and counts those beating
/// the incumbent's localized cost by more than `loc_tol`.
inline LocalizationResult localization_check(const RelaxedSolution& sol, const Point& y0, double r, int trials,
                                             std::uint64_t seed, const EnergyConfig& cfg, double loc_tol = 1e-6) {
  const LocalizedProblem prob = localized_problem(sol, y0, r, cfg);
  LocalizationResult res;
  res.y0 = y0;
  res.r = r;
  res.incumbent_cost = prob.incumbent_cost;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(detail::substream_seed(seed, static_cast<std::uint64_t>(t)));
    Network cand = detail::random_competitor(prob, rng);
    ++res.trials;
    if (!is_admissible(prob, cand)) continue;
    const LocalizedCost c = localized_cost(prob, cand);
    if (!c.feasible) continue;
    ++res.feasible;
    res.best_competitor_cost = std::min(res.best_competitor_cost, c.cost);
    if (c.cost < prob.incumbent_cost - loc_tol) {
      ++res.violations;
      res.counterexamples.push_back({t, cand, c.cost, prob.incumbent_cost});
    }
  }
  return res;
}

/// Picks a localization ball whose centre is a quadrature piece boundary on
/// an edge and whose radius is a whole number of pieces, so that the sphere
/// cuts the network exactly at piece boundaries: the ν⋆-mass of the ball, the
/// mass of σ and the length of the incumbent then agree exactly. The ball
/// holds no vertices and no source atoms; unless `allow_excess`, it also
/// holds no node carrying excess mass. Edges are tried longest first,
/// centres nearest the edge midpoint first, radii largest first. The atoms
/// kept out of the ball default to the source atoms of the solution's plan;
/// pass ρ0's own atoms to ignore the quadrature atoms of a density.
inline std::optional<std::pair<Point, double>> select_localization_ball(const RelaxedSolution& sol, double h,
                                                                       double r_max, bool allow_excess = false,
                                                                       const Atoms* source_atoms = nullptr) {
  const Network& net = sol.base;
  std::vector<int> order(net.edges.size());
  for (std::size_t e = 0; e < order.size(); ++e) order[e] = static_cast<int>(e);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return net.edge_length(a) > net.edge_length(b); });
  std::vector<Point> avoid = net.vertices;
  for (const auto& a : source_atoms ? *source_atoms : sol.plan.source) avoid.push_back(a.x);
  if (!allow_excess)
    for (const auto& ex : sol.excess_nodes) avoid.push_back(sol.nodes[ex.node].x);
  for (int e : order) {
    const double len = net.edge_length(e);
    const int k = std::max(1, static_cast<int>(std::ceil(len / h - 1e-12)));
    const double s = len / k;
    std::vector<int> qs;
    for (int q = 2; q <= k - 2; ++q) qs.push_back(q);
    std::stable_sort(qs.begin(), qs.end(), [&](int a, int b) { return std::abs(2 * a - k) < std::abs(2 * b - k); });
    for (int q : qs) {
      const Point y0 = net.point_on_edge(e, static_cast<double>(q) / k);
      for (int m = std::min(q, k - q) - 1; m >= 1; --m) {
        const double r = m * s;
        if (r > r_max) continue;
        bool clear = true;
        for (const auto& z : avoid) clear = clear && distance(z, y0) > r + 1e-9;
        if (!clear) continue;
        if (!is_clean_cut(analyze_cut(net, y0, r), false)) continue;
        return std::make_pair(y0, r);
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lower semicontinuity of length

struct GolabResult {
  std::vector<double> window_lengths;
  std::vector<double> hausdorff;  // to the limit, whole sets
  double limit_length = 0.0;      // H¹(limit ∩ window)
  double liminf = 0.0;            // minimum over the second half of the sequence
  bool pass = false;
};

inline GolabResult golab_check(const std::vector<Network>& sequence, const Network& limit, const Point& center,
                               double radius, double golab_tol = 1e-9, double spacing = 1e-3) {
  if (sequence.empty()) throw Error("empty sequence");
  GolabResult res;
  res.limit_length = length_in_ball(limit, center, radius);
  for (const auto& net : sequence) {
    res.window_lengths.push_back(length_in_ball(net, center, radius));
    res.hausdorff.push_back(hausdorff_distance(net, limit, spacing));
  }
  const std::size_t start = sequence.size() / 2;
  res.liminf = *std::min_element(res.window_lengths.begin() + static_cast<long>(start), res.window_lengths.end());
  res.pass = res.liminf >= res.limit_length - golab_tol;
  return res;
}

// ---------------------------------------------------------------------------
// Tube mass bound

struct MassBound {
  double delta = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  double standard_error = 0.0;
  long samples = 0;
  bool pass = false;
};

/// Monte Carlo ρ0-mass of the closed δ-tube around the network against
/// ‖ρ0‖∞·[ω_{d−1} H¹ δ^{d−1} + E (ω_d/2) δ^d], E = number of degree-1 vertices.
inline MassBound neighborhood_mass_bound(const Network& net, const SourceMeasure& rho0, double delta,
                                         long samples = 1000000, std::uint64_t seed = 0) {
  if (!rho0.atoms.empty() || !rho0.density) throw Error("density-only check");
  if (!(delta > 0.0)) throw Error("delta must be positive");
  if (samples < 1) throw Error("sample count must be positive");
  const auto& g = *rho0.density;
  const int d = rho0.dim;
  std::vector<double> cum;
  std::vector<std::size_t> cells;
  double total = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (g.values[c] <= 0.0) continue;
    total += g.values[c];
    cum.push_back(total);
    cells.push_back(c);
  }
  const double mass = rho0.density_mass();
  int endpoints = 0;
  for (int k : degrees(net)) endpoints += k == 1;

  MassBound mb;
  mb.delta = delta;
  mb.samples = samples;
  mb.bound = g.max_value() * (omega(d - 1) * network_length(net) * std::pow(delta, d - 1) +
                              endpoints * 0.5 * omega(d) * std::pow(delta, d));
  constexpr long chunk = 65536;
  long hits = 0;
  for (long start = 0, k = 0; start < samples; start += chunk, ++k) {
    std::mt19937_64 rng(detail::substream_seed(seed, static_cast<std::uint64_t>(k)));
    const long n = std::min(chunk, samples - start);
    for (long s = 0; s < n; ++s) {
      const double u = detail::uniform01(rng) * total;
      const std::size_t idx = std::min<std::size_t>(
          static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()), cells.size() - 1);
      Point x = g.cell_corner(cells[idx]);
      for (int q = 0; q < d; ++q) x[q] += g.cell * detail::uniform01(rng);
      if (distance_to_network(x, net) <= delta) ++hits;
    }
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  mb.measured = mass * frac;
  mb.standard_error = mass * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  const double rel = mb.measured > 0.0 ? mb.standard_error / mb.measured : 0.0;
  mb.pass = mb.measured <= mb.bound * (1.0 + 3.0 * rel);
  return mb;
}

// ---------------------------------------------------------------------------
// Aggregate report

struct VerificationReport {
  std::vector<std::string> checks;  // enabled checks, in run order
  std::optional<bool> tree;
  std::optional<GapStats> projection_gap;
  std::optional<double> projection_tolerance;
  std::optional<DensityCharacterization> density;
  std::optional<BlowupTable> blowup;
  std::optional<double> blowup_slope;
  std::optional<LocalizationResult> localization;
  std::vector<MassBound> mass_bound;
  std::vector<std::string> failures;

  bool pass() const { return failures.empty(); }
};

}  // namespace wh1
