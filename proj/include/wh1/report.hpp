#pragma once

// Structured (JSON) reports. Every report embeds the full configuration and
// seed; key order is fixed so equal inputs give byte-identical files.

#include <nlohmann/json.hpp>
#include <string>

#include "wh1/analysis.hpp"
#include "wh1/config.hpp"
#include "wh1/energy.hpp"
#include "wh1/optimizer.hpp"

namespace wh1 {

using Json = nlohmann::ordered_json;

inline Json point_json(const Point& p, int dim) {
  Json j = Json::array();
  for (int c = 0; c < dim; ++c) j.push_back(p[c]);
  return j;
}

inline Json network_json(const Network& net) {
  Json j;
  j["dim"] = net.dim;
  j["vertices"] = Json::array();
  for (const auto& v : net.vertices) j["vertices"].push_back(point_json(v, net.dim));
  j["edges"] = Json::array();
  for (const auto& e : net.edges) j["edges"].push_back(Json::array({e.a, e.b}));
  j["length"] = network_length(net);
  return j;
}

inline Network network_from_json(const nlohmann::json& j) {
  Network net;
  net.dim = j.at("dim").get<int>();
  for (const auto& v : j.at("vertices")) {
    Point p;
    for (int c = 0; c < net.dim; ++c) p[c] = v.at(c).get<double>();
    net.add_vertex(p);
  }
  for (const auto& e : j.at("edges")) net.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
  return net;
}

inline Json gap_json(const GapStats& g) {
  return Json{{"max", g.max}, {"mean", g.mean}, {"p95", g.p95}, {"mass", g.mass}, {"entries", g.entries}};
}

inline Json report_header(const std::string& kind, const RunConfig& cfg) {
  Json j;
  j["kind"] = kind;
  j["format"] = "wh1report v1";
  j["seed"] = cfg.energy().seed;
  j["config"] = config_json(cfg);
  return j;
}

/// `final_eval` is the uniform-measure evaluation of the final network; it
/// supplies the final measure and the verification statistics.
inline Json solve_report_json(const SolveReport& rep, const RunConfig& cfg, const UniformEvaluation& final_eval) {
  Json j = report_header("solve_report", cfg);
  j["chosen_seed"] = rep.seed;
  j["final_energy"] = rep.final_energy;
  j["rounds"] = rep.rounds;
  j["converged"] = rep.converged;
  j["cycles_initial"] = rep.cycles_initial;
  j["cycles_final"] = rep.cycles_final;
  j["tree"] = rep.cycles_final == 0;
  j["degenerate_energy"] = rep.degenerate_energy;
  j["lambda_too_large_hint"] = rep.degenerate_better;
  Json ms = Json::array();
  for (const auto& [seed, e] : rep.multistart) ms.push_back(Json{{"seed", seed}, {"final_energy", e}});
  j["multistart"] = ms;
  Json ev = Json::object(), acc = Json::object();
  for (int k = 0; k < 5; ++k) {
    ev[to_string(static_cast<MoveKind>(k))] = rep.evaluated_per_kind[k];
    acc[to_string(static_cast<MoveKind>(k))] = rep.accepted_per_kind[k];
  }
  j["evaluated_per_kind"] = ev;
  j["accepted_per_kind"] = acc;
  j["open_loop"] = {{"attempts", rep.open_loop_attempts},
                    {"skipped", rep.open_loop_skipped},
                    {"accepted", rep.open_loop_accepted}};
  j["energy_trace"] = rep.energy_trace;
  Json moves = Json::array();
  for (const auto& m : rep.moves) {
    moves.push_back(Json{{"round", m.round},
                         {"kind", to_string(m.kind)},
                         {"index", m.index},
                         {"accepted", m.accepted},
                         {"energy_before", m.energy_before},
                         {"energy_after", std::isfinite(m.energy_after) ? Json(m.energy_after) : Json(nullptr)},
                         {"details", m.details}});
  }
  j["moves"] = moves;
  const GapStats gap = projection_gap(rep.final_net, final_eval.plan);
  j["verification"] = {{"tree", is_connected(rep.final_net) && rep.cycles_final == 0},
                       {"cycles", rep.cycles_final},
                       {"projection_gap", gap_json(gap)},
                       {"projection_tolerance", gap_tolerance(cfg.energy().h, cfg.energy().p)}};
  j["network"] = network_json(rep.final_net);
  j["measure"] = {{"kind", "uniform"},
                  {"length", final_eval.length},
                  {"density", final_eval.length > 0.0 ? Json(1.0 / final_eval.length) : Json(nullptr)},
                  {"transport_cost", final_eval.cost},
                  {"nodes", final_eval.plan.target.size()}};
  return j;
}

inline Json relaxed_solution_json(const RelaxedSolution& sol, const RunConfig& cfg) {
  Json j = report_header("relaxed_solution", cfg);
  j["alpha_star"] = sol.alpha_star;
  j["network_length"] = network_length(sol.base);
  j["wasserstein_p_cost"] = sol.wasserstein_p_cost;
  j["energy"] = sol.energy;
  j["length_functional"] = sol.alpha_star;
  Json nodes = Json::array();
  const double inv = sol.alpha_star > 0.0 ? 1.0 / sol.alpha_star : 0.0;
  for (const auto& n : sol.nodes) {
    nodes.push_back(Json{{"x", point_json(n.x, sol.base.dim)},
                         {"edge", n.edge},
                         {"t", n.t},
                         {"share", n.share},
                         {"mass", n.mass},
                         {"excess", n.mass - n.share * inv},
                         {"projection", n.projection}});
  }
  j["nodes"] = nodes;
  Json ex = Json::array();
  for (const auto& e : sol.excess_nodes)
    ex.push_back(Json{{"node", e.node}, {"x", point_json(sol.nodes[e.node].x, sol.base.dim)}, {"excess", e.excess}});
  j["excess"] = ex;
  Json trace = Json::array();
  for (const auto& [a, v] : sol.alpha_trace) trace.push_back(Json::array({a, v}));
  j["alpha_trace"] = trace;
  j["network"] = network_json(sol.base);
  return j;
}

inline Json blowup_json(const BlowupTable& tab, int dim) {
  Json rows = Json::array();
  for (const auto& r : tab.rows) rows.push_back(Json{{"r", r.r}, {"distance", r.distance}});
  return Json{{"y0", point_json(tab.y0, dim)},
              {"tangent", point_json(tab.tangent, dim)},
              {"spacing", tab.spacing},
              {"band", tab.band},
              {"rows", rows}};
}

/// Two-column text table (r, d_H) for plotting.
inline std::string blowup_table_text(const BlowupTable& tab) {
  std::string s = "# r d_H\n";
  for (const auto& r : tab.rows) s += io_detail::fmt(r.r) + " " + io_detail::fmt(r.distance) + "\n";
  return s;
}

inline Json verification_json(const VerificationReport& rep, const RunConfig& cfg, int dim) {
  Json j = report_header("verification_report", cfg);
  j["checks"] = rep.checks;
  j["pass"] = rep.pass();
  j["failures"] = rep.failures;
  if (rep.tree) j["tree"] = *rep.tree;
  if (rep.projection_gap) {
    j["projection_gap"] = gap_json(*rep.projection_gap);
    j["projection_gap"]["tolerance"] = *rep.projection_tolerance;
  }
  if (rep.density) {
    Json rows = Json::array();
    for (const auto& r : rep.density->rows) {
      rows.push_back(Json{{"node", r.node},
                          {"x", point_json(r.x, dim)},
                          {"uniform", r.uniform},
                          {"mass", r.mass},
                          {"share_over_mass", r.mass > 0.0 ? Json(r.uniform / r.mass) : Json(nullptr)},
                          {"excess", r.excess},
                          {"allowance", r.allowance},
                          {"ok", r.ok}});
    }
    j["density_table"] = Json{{"pass", rep.density->pass},
                              {"max_uniform_deviation", rep.density->max_uniform_deviation},
                              {"flagged", rows}};
  }
  if (rep.blowup) {
    j["blowup_table"] = blowup_json(*rep.blowup, dim);
    j["blowup_table"]["loglog_slope"] = rep.blowup_slope ? Json(*rep.blowup_slope) : Json(nullptr);
  }
  if (rep.localization) {
    const auto& l = *rep.localization;
    Json cex = Json::array();
    for (const auto& c : l.counterexamples)
      cex.push_back(Json{{"trial", c.trial}, {"cost", c.cost}, {"incumbent_cost", c.incumbent_cost},
                         {"competitor", network_json(c.competitor)}});
    j["localization_trials"] = Json{{"y0", point_json(l.y0, dim)},
                                    {"r", l.r},
                                    {"trials", l.trials},
                                    {"feasible", l.feasible},
                                    {"violations", l.violations},
                                    {"incumbent_cost", l.incumbent_cost},
                                    {"best_competitor_cost",
                                     std::isfinite(l.best_competitor_cost) ? Json(l.best_competitor_cost) : Json(nullptr)},
                                    {"counterexamples", cex}};
  }
  if (!rep.mass_bound.empty()) {
    Json rows = Json::array();
    for (const auto& m : rep.mass_bound)
      rows.push_back(Json{{"delta", m.delta}, {"measured", m.measured}, {"bound", m.bound},
                          {"standard_error", m.standard_error}, {"samples", m.samples}, {"pass", m.pass}});
    j["mass_bound"] = rows;
  }
  return j;
}

/// Configuration as `#`-comment lines for text artifacts (the seed is one of
/// the keys).
inline std::string config_comment(const RunConfig& cfg) {
  std::string out = "# wh1 config\n";
  const std::string body = format_config(cfg);
  std::size_t start = 0;
  while (start < body.size()) {
    const auto end = body.find('\n', start);
    out += "# " + body.substr(start, end - start) + "\n";
    start = end + 1;
  }
  return out;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace wh1
