// wh1: command-line driver for solving and verifying Wasserstein–length
// network problems.
//
// Exit codes: 0 success, 1 check failure, 2 input error, 3 configuration or
// feasibility error.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wh1/config.hpp"
#include "wh1/energy.hpp"
#include "wh1/io.hpp"
#include "wh1/optimizer.hpp"
#include "wh1/report.hpp"
#include "wh1/svg.hpp"
#include "wh1/verify.hpp"

namespace {

using namespace wh1;
namespace fs = std::filesystem;

constexpr int kOk = 0, kCheckFailure = 1, kInputError = 2, kConfigError = 3;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<double> p, lambda, h;
};

struct Options {
  std::string measure, network, init, solution, point, radii;
  std::optional<int> multistart;
  std::vector<std::string> checks;
  bool chords = false;
};

RunConfig resolve_config(const Globals& g, const Options& o) {
  RunConfig cfg;
  if (!g.config.empty()) apply_config(cfg, load_config_file(g.config));
  if (g.seed) cfg.energy().seed = *g.seed;
  if (g.p) cfg.energy().p = *g.p;
  if (g.lambda) cfg.energy().lambda = *g.lambda;
  if (g.h) cfg.energy().h = *g.h;
  if (o.multistart) cfg.multistart = *o.multistart;
  if (!o.init.empty()) cfg.init = o.init;
  if (!o.radii.empty()) cfg.radii = o.radii;
  validate(cfg);
  return cfg;
}

std::string out_path(const Globals& g, const std::string& name) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw InputError("cannot create output directory '" + g.out + "'");
  return (fs::path(g.out) / name).string();
}

void require_same_dim(const Network& net, const SourceMeasure& rho) {
  if (net.dim != rho.dim)
    throw Error("inconsistent inputs: network is " + std::to_string(net.dim) + "D, measure is " +
                std::to_string(rho.dim) + "D");
}

int cmd_solve(const Globals& g, const Options& o) {
  const SourceMeasure rho = read_measure(o.measure);
  const RunConfig cfg = resolve_config(g, o);
  std::pair<Network, SolveReport> result;
  if (cfg.init == "auto") {
    result = optimize_multistart(rho, cfg.opt, cfg.multistart);
  } else {
    const Network init = read_network(cfg.init);
    require_same_dim(init, rho);
    result = optimize(rho, init, cfg.opt);
    result.second.multistart = {{result.second.seed, result.second.final_energy}};
  }
  const auto& [net, rep] = result;
  const auto ev = evaluate_uniform(net, source_to_atoms(rho, cfg.energy().quad), cfg.energy());
  io_detail::write_file(out_path(g, "network.wh1net"), format_network(net) + config_comment(cfg));
  io_detail::write_file(out_path(g, "solve_report.json"), dump(solve_report_json(rep, cfg, ev)));
  if (cfg.figure) {
    if (net.dim == 2)
      io_detail::write_file(out_path(g, "figure.svg"), network_figure(net, &rho, &ev.plan, format_config(cfg)));
    else
      std::cerr << "note: figure skipped (2D figures only)\n";
  }
  std::cout << "energy " << io_detail::fmt(rep.final_energy) << " seed " << rep.seed << " cycles " << rep.cycles_final
            << (rep.degenerate_better ? " (a single point beats this network: lambda may be too large)" : "") << "\n";
  return kOk;
}

int cmd_inner(const Globals& g, const Options& o) {
  const SourceMeasure rho = read_measure(o.measure);
  const Network net = read_network(o.network);
  require_same_dim(net, rho);
  const RunConfig cfg = resolve_config(g, o);
  const RelaxedSolution sol = inner_relaxed_solve(net, rho, cfg.energy());
  io_detail::write_file(out_path(g, "relaxed_solution.json"), dump(relaxed_solution_json(sol, cfg)));
  io_detail::write_file(out_path(g, "plan.txt"), format_plan(sol.plan) + config_comment(cfg));
  std::cout << "alpha* " << io_detail::fmt(sol.alpha_star) << " energy " << io_detail::fmt(sol.energy) << " excess nodes "
            << sol.excess_nodes.size() << "\n";
  return kOk;
}

/// The solution report must describe the same network and the same energy
/// parameters as the current run.
void check_solution_report(const std::string& path, const Network& net, const RunConfig& cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io_detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  Network other;
  try {
    other = network_from_json(j.at("network"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": missing or malformed network: " + e.what());
  }
  bool same = other.dim == net.dim && other.vertices.size() == net.vertices.size() && other.edges.size() == net.edges.size();
  for (std::size_t v = 0; same && v < net.vertices.size(); ++v) same = distance(other.vertices[v], net.vertices[v]) <= 1e-12;
  for (std::size_t e = 0; same && e < net.edges.size(); ++e)
    same = other.edges[e].a == net.edges[e].a && other.edges[e].b == net.edges[e].b;
  if (!same) throw Error("inconsistent inputs: solution report describes a different network");
  if (j.contains("config")) {
    const auto mine = config_json(cfg);
    for (const char* key : {"lambda", "p", "h", "quad", "alpha_grid", "alpha_span", "excess_tol"}) {
      if (j["config"].contains(key) && j["config"][key].dump() != mine[key].dump())
        throw Error(std::string("inconsistent inputs: solution report has a different '") + key + "'");
    }
  }
}

int cmd_verify(const Globals& g, const Options& o) {
  VerifyInputs in;
  in.net = read_network(o.network);
  if (!o.measure.empty()) {
    in.rho = read_measure(o.measure);
    require_same_dim(in.net, *in.rho);
  }
  const RunConfig cfg = resolve_config(g, o);
  if (!o.solution.empty()) check_solution_report(o.solution, in.net, cfg);
  if (!o.point.empty()) in.blowup_point = parse_point(o.point, in.net.dim);
  const auto checks = normalize_checks(o.checks, in.rho);
  const VerificationReport rep = run_checks(checks, in, cfg);
  io_detail::write_file(out_path(g, "verification_report.json"), dump(verification_json(rep, cfg, in.net.dim)));
  if (rep.blowup) io_detail::write_file(out_path(g, "blowup_table.txt"), blowup_table_text(*rep.blowup) + config_comment(cfg));
  for (const auto& f : rep.failures) std::cerr << "FAIL " << f << "\n";
  std::cout << (rep.pass() ? "pass" : "fail") << " (" << checks.size() << " check(s))\n";
  return rep.pass() ? kOk : kCheckFailure;
}

int cmd_blowup(const Globals& g, const Options& o) {
  const Network net = read_network(o.network);
  const RunConfig cfg = resolve_config(g, o);
  if (o.point.empty()) throw InputError("blowup needs --point");
  const Point y0 = parse_point(o.point, net.dim);
  const BlowupTable tab = blowup_decay(net, y0, parse_radii(cfg.radii), cfg.blowup_spacing);
  std::optional<double> slope;
  const bool flat = blowup_passes(tab, slope);
  Json j = report_header("blowup_report", cfg);
  j["blowup_table"] = blowup_json(tab, net.dim);
  j["blowup_table"]["loglog_slope"] = slope ? Json(*slope) : Json(nullptr);
  j["flat"] = flat;
  io_detail::write_file(out_path(g, "blowup_report.json"), dump(j));
  io_detail::write_file(out_path(g, "blowup_table.txt"), blowup_table_text(tab) + config_comment(cfg));
  io_detail::write_file(out_path(g, "blowup.svg"), blowup_figure(tab, format_config(cfg)));
  std::cout << "slope " << (slope ? io_detail::fmt(*slope) : std::string("n/a")) << (flat ? " flat" : " not flat") << "\n";
  return kOk;
}

int cmd_plot(const Globals& g, const Options& o) {
  const Network net = read_network(o.network);
  std::optional<SourceMeasure> rho;
  if (!o.measure.empty()) {
    rho = read_measure(o.measure);
    require_same_dim(net, *rho);
  }
  const RunConfig cfg = resolve_config(g, o);
  if (net.dim != 2) throw Error("2D figures only");
  std::optional<TransportPlan> plan;
  if (o.chords) {
    if (!rho) throw InputError("--chords needs --measure");
    plan = evaluate_uniform(net, source_to_atoms(*rho, cfg.energy().quad), cfg.energy()).plan;
  }
  io_detail::write_file(out_path(g, "figure.svg"),
                        network_figure(net, rho ? &*rho : nullptr, plan ? &*plan : nullptr, format_config(cfg)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wh1: network approximation of measures under Wasserstein cost plus length"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // `-h` would clash with --h
  Globals g;
  Options o;
  app.add_option("--config", g.config, "flat key=value configuration file (or a JSON report with a config)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--p", g.p, "transport exponent p >= 1");
  app.add_option("--lambda", g.lambda, "length penalty");
  app.add_option("--h", g.h, "quadrature spacing");

  auto* solve = app.add_subcommand("solve", "optimise a network for a source measure");
  solve->add_option("--measure", o.measure, "source measure file")->required();
  solve->add_option("--init", o.init, "'auto' or an initial network file");
  solve->add_option("--multistart", o.multistart, "number of seeded automatic starts");

  auto* inner = app.add_subcommand("inner", "relaxed inner solve on a fixed network");
  inner->add_option("--measure", o.measure, "source measure file")->required();
  inner->add_option("--network", o.network, "network file")->required();

  auto* verify = app.add_subcommand("verify", "run structural checks");
  verify->add_option("--network", o.network, "network file")->required();
  verify->add_option("--measure", o.measure, "source measure file");
  verify->add_option("--solution", o.solution, "solution report (must describe the same network)");
  verify->add_option("--check", o.checks, "checks: tree, projection, density, blowup, localization, mass, all")
      ->delimiter(',');
  verify->add_option("--point", o.point, "blow-up point x,y[,z] (default: midpoint of the longest edge)");
  verify->add_option("--radii", o.radii, "radii: comma list or dyadic:a:b");

  auto* blowup = app.add_subcommand("blowup", "tangent decay table at a point");
  blowup->add_option("--network", o.network, "network file")->required();
  blowup->add_option("--point", o.point, "point x,y[,z] on the network")->required();
  blowup->add_option("--radii", o.radii, "radii: comma list or dyadic:a:b");

  auto* plot = app.add_subcommand("plot", "SVG figure of a network and measure");
  plot->add_option("--network", o.network, "network file")->required();
  plot->add_option("--measure", o.measure, "source measure file");
  plot->add_flag("--chords", o.chords, "draw the optimal plan to the uniform measure");

  for (auto* sub : {solve, inner, verify, blowup, plot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve) return cmd_solve(g, o);
    if (*inner) return cmd_inner(g, o);
    if (*verify) return cmd_verify(g, o);
    if (*blowup) return cmd_blowup(g, o);
    if (*plot) return cmd_plot(g, o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kInputError;
}
