#pragma once

// Run configuration: every tunable of the energy, the move schedule and the
// checks, loadable from a flat key=value file and serialisable for embedding
// in every artifact.

#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "wh1/io.hpp"
#include "wh1/optimizer.hpp"

namespace wh1 {

struct RunConfig {
  OptimizerConfig opt;  // opt.energy.seed is the run seed
  int multistart = 1;
  std::string init = "auto";
  bool figure = true;
  // Checks.
  double char_tol = 1e-6;
  double loc_tol = 1e-6;
  int loc_trials = 200;
  double loc_radius = 0.25;
  long mc_samples = 1000000;
  std::vector<double> deltas{0.05, 0.1};
  double blowup_spacing = 1e-4;
  std::string radii = "dyadic:2:7";

  EnergyConfig& energy() { return opt.energy; }
  const EnergyConfig& energy() const { return opt.energy; }
};

namespace config_detail {

inline double num(const std::string& key, const std::string& v) {
  try {
    return io_detail::to_double(v, key);
  } catch (const InputError& e) {
    throw Error(std::string("config: ") + e.what());
  }
}
inline long integer(const std::string& key, const std::string& v) {
  try {
    return io_detail::to_long(v, key);
  } catch (const InputError& e) {
    throw Error(std::string("config: ") + e.what());
  }
}
inline bool boolean(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config: " + key + ": invalid boolean '" + v + "'");
}
inline std::vector<double> list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw Error("config: " + key + ": empty list item");
    out.push_back(num(key, item.substr(b, e - b + 1)));
  }
  return out;
}
inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + io_detail::fmt(v[k]);
  return s;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define WH1_NUM(name, expr)                                                               \
  Field {                                                                                 \
    name, [](RunConfig& c, const std::string& v) { c.expr = num(name, v); },              \
        [](const RunConfig& c) { return io_detail::fmt(static_cast<double>(c.expr)); }    \
  }
#define WH1_INT(name, expr, type)                                                              \
  Field {                                                                                      \
    name, [](RunConfig& c, const std::string& v) { c.expr = static_cast<type>(integer(name, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.expr); }                              \
  }
#define WH1_BOOL(name, expr)                                                        \
  Field {                                                                           \
    name, [](RunConfig& c, const std::string& v) { c.expr = boolean(name, v); },    \
        [](const RunConfig& c) { return std::string(c.expr ? "true" : "false"); }   \
  }

/// All configuration keys, in serialisation order.
inline const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      WH1_NUM("lambda", opt.energy.lambda),
      WH1_NUM("p", opt.energy.p),
      WH1_NUM("h", opt.energy.h),
      WH1_INT("quad", opt.energy.quad, int),
      WH1_INT("alpha_grid", opt.energy.alpha_grid, int),
      WH1_NUM("alpha_span", opt.energy.alpha_span),
      WH1_INT("seed", opt.energy.seed, std::uint64_t),
      WH1_NUM("excess_tol", opt.energy.excess_tol),
      WH1_INT("max_rounds", opt.max_rounds, int),
      WH1_NUM("accept_tol", opt.accept_tol),
      WH1_NUM("eta", opt.eta),
      WH1_NUM("collapse_len", opt.collapse_len),
      WH1_NUM("min_edge_len", opt.min_edge_len),
      WH1_NUM("mass_floor_factor", opt.mass_floor_factor),
      WH1_INT("cut_retries", opt.cut_retries, int),
      WH1_BOOL("vertex_steps", opt.vertex_steps),
      WH1_BOOL("splits", opt.splits),
      WH1_BOOL("collapses", opt.collapses),
      WH1_BOOL("open_loops", opt.open_loops),
      WH1_BOOL("pendants", opt.pendants),
      WH1_INT("max_pendant_atoms", opt.max_pendant_atoms, int),
      WH1_INT("init_points", opt.init_points, int),
      WH1_NUM("init_shrink", opt.init_shrink),
      WH1_NUM("init_jitter", opt.init_jitter),
      WH1_INT("multistart", multistart, int),
      Field{"init", [](RunConfig& c, const std::string& v) { c.init = v; }, [](const RunConfig& c) { return c.init; }},
      WH1_BOOL("figure", figure),
      WH1_NUM("char_tol", char_tol),
      WH1_NUM("loc_tol", loc_tol),
      WH1_INT("loc_trials", loc_trials, int),
      WH1_NUM("loc_radius", loc_radius),
      WH1_INT("mc_samples", mc_samples, long),
      Field{"deltas", [](RunConfig& c, const std::string& v) { c.deltas = list("deltas", v); },
            [](const RunConfig& c) { return join(c.deltas); }},
      WH1_NUM("blowup_spacing", blowup_spacing),
      Field{"radii", [](RunConfig& c, const std::string& v) { c.radii = v; }, [](const RunConfig& c) { return c.radii; }},
  };
  return f;
}

#undef WH1_NUM
#undef WH1_INT
#undef WH1_BOOL

}  // namespace config_detail

/// Applies key=value pairs; unknown keys are configuration errors.
inline void apply_config(RunConfig& cfg, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    bool known = false;
    for (const auto& f : config_detail::fields()) {
      if (f.key == key) {
        f.set(cfg, value);
        known = true;
        break;
      }
    }
    if (!known) throw Error("config: unknown key '" + key + "'");
  }
}

inline void validate(const RunConfig& cfg) {
  validate(cfg.opt);
  if (cfg.multistart < 1) throw Error("multistart must be >= 1");
  if (cfg.loc_trials < 0) throw Error("loc_trials must be >= 0");
  if (!(cfg.loc_radius > 0.0)) throw Error("loc_radius must be positive");
  if (cfg.mc_samples < 1) throw Error("mc_samples must be >= 1");
  for (double d : cfg.deltas)
    if (!(d > 0.0)) throw Error("deltas must be positive");
  if (!(cfg.blowup_spacing > 0.0)) throw Error("blowup_spacing must be positive");
}

/// Flat key=value text; loading it reproduces the configuration exactly.
inline std::string format_config(const RunConfig& cfg) {
  std::string s;
  for (const auto& f : config_detail::fields()) s += f.key + " = " + f.get(cfg) + "\n";
  return s;
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& f : config_detail::fields()) j[f.key] = f.get(cfg);
  return j;
}

/// Loads a configuration file: either flat key=value text or a JSON report
/// carrying a "config" object (as embedded in every artifact).
inline KeyValues load_config_file(const std::string& path) {
  std::string text;
  try {
    text = io_detail::read_file(path);
  } catch (const InputError& e) {
    throw Error(std::string("config: ") + e.what());
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    KeyValues kv;
    try {
      const auto j = nlohmann::json::parse(text);
      for (const auto& [k, v] : j.at("config").items()) kv[k] = v.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("config: ") + path + ": " + e.what());
    }
    return kv;
  }
  return parse_key_values(text, path);
}

}  // namespace wh1
