#pragma once

// Runs a selected set of analysis checks on a network, its source measure and
// its relaxed solution, collecting everything into a VerificationReport.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "wh1/analysis.hpp"
#include "wh1/config.hpp"
#include "wh1/energy.hpp"

namespace wh1 {

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"tree", "projection", "density", "blowup", "localization", "mass"};
  return names;
}

/// Expands and orders a check list: "all" selects every check applicable to
/// the measure (the tube mass bound only for pure densities); duplicates are
/// dropped and the canonical order is kept.
inline std::vector<std::string> normalize_checks(const std::vector<std::string>& requested,
                                                 const std::optional<SourceMeasure>& rho) {
  std::vector<bool> on(check_names().size(), false);
  for (const auto& c : requested) {
    if (c == "all") {
      for (std::size_t k = 0; k < on.size(); ++k) on[k] = true;
      if (rho && (!rho->atoms.empty() || !rho->density)) on[5] = false;
      continue;
    }
    const auto it = std::find(check_names().begin(), check_names().end(), c);
    if (it == check_names().end()) throw Error("unknown check '" + c + "'");
    on[static_cast<std::size_t>(it - check_names().begin())] = true;
  }
  std::vector<std::string> out;
  for (std::size_t k = 0; k < on.size(); ++k)
    if (on[k]) out.push_back(check_names()[k]);
  return out;
}

/// Radius lists: "dyadic:a:b" is 2^-a, ..., 2^-b; otherwise a comma list.
inline std::vector<double> parse_radii(const std::string& text) {
  if (text.rfind("dyadic:", 0) == 0) {
    const auto rest = text.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw Error("radii: expected dyadic:<a>:<b>");
    long a = 0, b = 0;
    try {
      a = io_detail::to_long(rest.substr(0, colon), "radii");
      b = io_detail::to_long(rest.substr(colon + 1), "radii");
    } catch (const InputError& e) {
      throw Error(e.what());
    }
    if (b < a || b - a > 60) throw Error("radii: dyadic range must satisfy a <= b <= a + 60");
    std::vector<double> r;
    for (long k = a; k <= b; ++k) r.push_back(std::ldexp(1.0, static_cast<int>(-k)));
    return r;
  }
  std::vector<double> r = config_detail::list("radii", text);
  if (r.empty()) throw Error("radii: empty list");
  return r;
}

/// Parses "x,y" or "x,y,z".
inline Point parse_point(const std::string& text, int dim) {
  const auto v = config_detail::list("point", text);
  if (static_cast<int>(v.size()) != dim)
    throw InputError("point needs " + std::to_string(dim) + " coordinates, got " + std::to_string(v.size()));
  Point p;
  for (int c = 0; c < dim; ++c) p[c] = v[c];
  return p;
}

/// Default blow-up point: midpoint of the longest edge (lowest index on ties).
inline Point default_blowup_point(const Network& net) {
  if (net.edges.empty()) throw Error("blowup: network has no edges");
  int best = 0;
  for (int e = 1; e < static_cast<int>(net.edges.size()); ++e)
    if (net.edge_length(e) > net.edge_length(best)) best = e;
  return net.point_on_edge(best, 0.5);
}

/// Blow-up pass rule: the smallest radius is already flat up to the sampling
/// band, or the positive distances decay with log-log slope >= 0.9.
inline bool blowup_passes(const BlowupTable& tab, std::optional<double>& slope) {
  std::vector<double> r, d;
  for (const auto& row : tab.rows)
    if (row.distance > tab.band) r.push_back(row.r), d.push_back(row.distance);
  if (r.size() >= 2) slope = loglog_slope(r, d);
  if (tab.rows.back().distance <= tab.band) return true;
  return slope && *slope >= 0.9;
}

struct VerifyInputs {
  Network net;
  std::optional<SourceMeasure> rho;
  std::optional<Point> blowup_point;
};

inline VerificationReport run_checks(const std::vector<std::string>& checks, const VerifyInputs& in,
                                     const RunConfig& cfg) {
  VerificationReport rep;
  rep.checks = checks;
  const EnergyConfig& ec = cfg.energy();
  auto need_measure = [&](const std::string& c) -> const SourceMeasure& {
    if (!in.rho) throw Error(c + " check needs a measure");
    return *in.rho;
  };
  std::optional<RelaxedSolution> sol;
  auto solution = [&](const std::string& c) -> const RelaxedSolution& {
    if (!sol) sol = inner_relaxed_solve(in.net, need_measure(c), ec);
    return *sol;
  };
  for (const auto& c : checks) {
    if (c == "tree") {
      rep.tree = is_connected(in.net) && cycle_rank(in.net) == 0;
      if (!*rep.tree) rep.failures.push_back("tree: network has " + std::to_string(cycle_rank(in.net)) + " independent cycle(s)");
    } else if (c == "projection") {
      const auto ev = evaluate_uniform(in.net, source_to_atoms(need_measure(c), ec.quad), ec);
      rep.projection_gap = projection_gap(in.net, ev.plan);
      rep.projection_tolerance = gap_tolerance(ec.h, ec.p);
      if (rep.projection_gap->mean > *rep.projection_tolerance)
        rep.failures.push_back("projection: mean gap " + io_detail::fmt(rep.projection_gap->mean) + " exceeds " +
                               io_detail::fmt(*rep.projection_tolerance));
    } else if (c == "density") {
      rep.density = density_characterization(solution(c), need_measure(c), ec.h, cfg.char_tol);
      if (!rep.density->pass)
        rep.failures.push_back("density: " + std::to_string(rep.density->rows.size()) + " flagged node(s), some not explained by source atoms");
    } else if (c == "blowup") {
      const Point y0 = in.blowup_point ? *in.blowup_point : default_blowup_point(in.net);
      rep.blowup = blowup_decay(in.net, y0, parse_radii(cfg.radii), cfg.blowup_spacing);
      if (!blowup_passes(*rep.blowup, rep.blowup_slope)) rep.failures.push_back("blowup: no tangent decay at y0");
    } else if (c == "localization") {
      const auto& s = solution(c);
      const auto ball = select_localization_ball(s, ec.h, cfg.loc_radius, false, &in.rho->atoms);
      if (!ball) throw Error("localization: no admissible localization ball (needs an edge longer than 3h)");
      rep.localization = localization_check(s, ball->first, ball->second, cfg.loc_trials, ec.seed, ec, cfg.loc_tol);
      if (rep.localization->violations > 0)
        rep.failures.push_back("localization: " + std::to_string(rep.localization->violations) + " violation(s)");
    } else if (c == "mass") {
      const auto& rho = need_measure(c);
      for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
        rep.mass_bound.push_back(neighborhood_mass_bound(in.net, rho, cfg.deltas[k], cfg.mc_samples,
                                                         detail::substream_seed(ec.seed, 1000 + k)));
        if (!rep.mass_bound.back().pass)
          rep.failures.push_back("mass: bound exceeded at delta " + io_detail::fmt(cfg.deltas[k]));
      }
    } else {
      throw Error("unknown check '" + c + "'");
    }
  }
  return rep;
}

}  // namespace wh1
