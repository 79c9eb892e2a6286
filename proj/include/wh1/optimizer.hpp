#pragma once

// Deterministic local search over networks for the uniform-measure energy.
// Each round proposes every move of the schedule, evaluates the candidates
// exactly and applies the single best one that lowers the energy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wh1/energy.hpp"
#include "wh1/geometry.hpp"
#include "wh1/measures.hpp"
#include "wh1/transport.hpp"

namespace wh1 {

enum class MoveKind { vertex_step = 0, split_edge = 1, collapse_edge = 2, open_loop = 3, add_pendant = 4 };

inline const char* to_string(MoveKind k) {
  switch (k) {
    case MoveKind::vertex_step: return "vertex_step";
    case MoveKind::split_edge: return "split_edge";
    case MoveKind::collapse_edge: return "collapse_edge";
    case MoveKind::open_loop: return "open_loop";
    case MoveKind::add_pendant: return "add_pendant";
  }
  return "unknown";
}

struct MoveLogEntry {
  MoveKind kind = MoveKind::vertex_step;
  int round = 0;
  int index = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  bool accepted = false;
  std::string details;
};

struct Sector {
  Point direction;
  double mass = 0.0;
  bool positive = false;  // carries mass above the floor: gets a pendant
};

struct SectorDecomposition {
  Point center;
  Point tangent;
  std::vector<Sector> sectors;
};

struct OptimizerConfig {
  EnergyConfig energy;
  int max_rounds = 400;
  double accept_tol = 1e-9;
  double eta = 0.5;
  double collapse_len = 0.0;  // 0 means h / 2
  double min_edge_len = 1e-9;
  double mass_floor_factor = 10.0;
  int cut_retries = 6;
  bool vertex_steps = true;
  bool splits = true;
  bool collapses = true;
  bool open_loops = true;
  bool pendants = true;
  int max_pendant_atoms = 8;  // pendant candidates for the atoms with largest w·dist^p
  // Automatic initialisation.
  int init_points = 8;
  double init_shrink = 0.8;
  double init_jitter = 0.02;

  double effective_collapse_len() const { return collapse_len > 0.0 ? collapse_len : 0.5 * energy.h; }
};

struct SolveReport {
  std::uint64_t seed = 0;
  std::vector<double> energy_trace;  // energy after round 0 (initial) and each accepted move
  std::vector<MoveLogEntry> moves;   // accepted moves and every open_loop attempt
  Network final_net;
  double final_energy = 0.0;
  int rounds = 0;
  bool converged = false;
  int open_loop_attempts = 0;
  int open_loop_skipped = 0;
  int open_loop_accepted = 0;
  int cycles_initial = 0;
  int cycles_final = 0;
  double degenerate_energy = 0.0;  // best single-point network
  bool degenerate_better = false;  // signals Λ too large
  std::vector<int> evaluated_per_kind = std::vector<int>(5, 0);
  std::vector<int> accepted_per_kind = std::vector<int>(5, 0);
  std::vector<std::pair<std::uint64_t, double>> multistart;  // (seed, final energy) of every start
};

// ---------------------------------------------------------------------------
// Elementary network edits

/// Inserts the midpoint of edge e; e becomes (a, mid) and (mid, b) is appended.
inline Network split_edge(const Network& net, int e) {
  if (e < 0 || e >= static_cast<int>(net.edges.size())) throw Error("edge index out of range");
  Network out = net;
  const auto [a, b] = net.edges[e];
  const int mid = out.add_vertex(0.5 * (net.vertices[a] + net.vertices[b]));
  out.edges[e] = {a, mid};
  out.add_edge(mid, b);
  return out;
}

/// Splits edge e at parameter t and returns the new vertex index through
/// `vertex`. Parameters within `snap` arc length of an end reuse the end.
inline Network split_edge_at(const Network& net, int e, double t, int& vertex, double snap) {
  const auto [a, b] = net.edges[e];
  const double len = net.edge_length(e);
  if (t * len <= snap) {
    vertex = a;
    return net;
  }
  if ((1.0 - t) * len <= snap) {
    vertex = b;
    return net;
  }
  Network out = net;
  vertex = out.add_vertex(net.point_on_edge(e, t));
  out.edges[e] = {a, vertex};
  out.add_edge(vertex, b);
  return out;
}

namespace detail {
inline bool straight_interior_vertex(const Network& net, int v, const std::vector<int>& deg) {
  if (deg[v] != 2) return false;
  std::vector<int> nb;
  for (const auto& e : net.edges) {
    if (e.a == v) nb.push_back(e.b);
    if (e.b == v) nb.push_back(e.a);
  }
  const Point u = net.vertices[nb[0]] - net.vertices[v];
  const Point w = net.vertices[nb[1]] - net.vertices[v];
  const Point cr(u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]);
  return dot(u, w) < 0.0 && norm(cr) <= 1e-12 * norm(u) * norm(w);
}
}  // namespace detail

/// Contracts edge e. A straight degree-2 endpoint is absorbed into the other
/// endpoint (leaving the point set unchanged); otherwise both endpoints merge
/// at the edge midpoint. Parallel edges created by the contraction collapse.
inline Network collapse_edge(const Network& net, int e) {
  if (e < 0 || e >= static_cast<int>(net.edges.size())) throw Error("edge index out of range");
  const auto deg = degrees(net);
  int keep = net.edges[e].a, drop = net.edges[e].b;
  Point pos = 0.5 * (net.vertices[keep] + net.vertices[drop]);
  if (detail::straight_interior_vertex(net, drop, deg)) {
    pos = net.vertices[keep];
  } else if (detail::straight_interior_vertex(net, keep, deg)) {
    std::swap(keep, drop);
    pos = net.vertices[keep];
  }
  Network out = net;
  out.vertices[keep] = pos;
  out.edges.clear();
  std::vector<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    if (static_cast<int>(k) == e) continue;
    int a = net.edges[k].a == drop ? keep : net.edges[k].a;
    int b = net.edges[k].b == drop ? keep : net.edges[k].b;
    if (a == b) continue;
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    out.add_edge(a, b);
  }
  if (out.edges.empty()) {
    Network single{net.dim, {pos}, {}};
    return single;
  }
  out = compact(out);
  if (!is_connected(out)) throw Error("collapse disconnects the network");
  return out;
}

/// Appends a straight pendant edge from vertex v along `direction`.
inline Network add_pendant(const Network& net, int v, const Point& direction, double length) {
  Network out = net;
  const int w = out.add_vertex(net.vertices[v] + direction * (length / norm(direction)));
  out.add_edge(v, w);
  return out;
}

// ---------------------------------------------------------------------------
// Moves

/// Damped barycentric step of one vertex: the plan mass landing on
/// quadrature nodes of incident edges, weighted by the node's hat function
/// for the vertex, pulls the vertex towards the weighted source barycentre.
inline Network vertex_step(const Network& net, const UniformEvaluation& ev, int v, double eta) {
  if (v < 0 || v >= static_cast<int>(net.vertices.size())) throw Error("vertex index out of range");
  std::vector<double> hat(ev.plan.target.size(), 0.0);
  if (ev.nodes.empty()) {
    hat.assign(hat.size(), 1.0);
  } else {
    for (std::size_t j = 0; j < ev.nodes.size(); ++j) {
      const auto& q = ev.nodes[j];
      if (net.edges[q.edge].a == v) hat[j] = 1.0 - q.t;
      else if (net.edges[q.edge].b == v) hat[j] = q.t;
    }
  }
  Point acc;
  double wsum = 0.0;
  for (const auto& e : ev.plan.entries) {
    const double w = e.mass * hat[e.j];
    if (w <= 0.0) continue;
    acc += ev.plan.source[e.i].x * w;
    wsum += w;
  }
  Network out = net;
  if (wsum <= 0.0) return out;
  const Point bary = acc / wsum;
  out.vertices[v] = (1.0 - eta) * net.vertices[v] + eta * bary;
  return out;
}

inline Network vertex_step(const Network& net, const SourceMeasure& rho0, const OptimizerConfig& cfg, int v) {
  const auto ev = evaluate_uniform(net, source_to_atoms(rho0, cfg.energy.quad), cfg.energy);
  return vertex_step(net, ev, v, cfg.eta);
}

/// Unit sector directions: 8 in the plane (starting along `tangent`), the 26
/// normalised neighbours of the cube lattice in space.
inline std::vector<Point> sector_directions(int dim, const Point& tangent) {
  std::vector<Point> dirs;
  if (dim == 2) {
    const double base = std::atan2(tangent[1], tangent[0]);
    for (int k = 0; k < 8; ++k) {
      const double a = base + k * 3.14159265358979323846 / 4.0;
      dirs.emplace_back(std::cos(a), std::sin(a), 0.0);
    }
    return dirs;
  }
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y)
      for (int z = -1; z <= 1; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        Point d(x, y, z);
        dirs.push_back(d / norm(d));
      }
  return dirs;
}

struct OpenLoopCandidate {
  Network net;
  CutAnalysis cut;
  SectorDecomposition sectors;
};

/// Removes the network inside a clean ball on the cycle and regrows the mass
/// that was transported there as straight pendants, one per sector carrying
/// mass above the floor, with length α·(sector mass) (α = ℓ for the uniform
/// measure). Returns nullopt when no clean cut is found.
inline std::optional<OpenLoopCandidate> open_loop(const Network& net, const UniformEvaluation& ev,
                                                  const OptimizerConfig& cfg, const Cycle& cycle) {
  if (cycle.empty()) return std::nullopt;
  const Atoms& source = ev.plan.source;
  // Prefer edges receiving little plan mass per unit length.
  std::vector<double> landed(net.edges.size(), 0.0);
  for (const auto& e : ev.plan.entries)
    if (!ev.nodes.empty()) landed[ev.nodes[e.j].edge] += e.mass;
  CutOptions opt;
  opt.edge_order = cycle;
  std::stable_sort(opt.edge_order.begin(), opt.edge_order.end(), [&](int a, int b) {
    return landed[a] / net.edge_length(a) < landed[b] / net.edge_length(b);
  });
  for (const auto& a : source) opt.excluded.push_back(a.x);

  double diameter = 0.0;
  for (int e1 : cycle)
    for (int e2 : cycle)
      diameter = std::max(diameter, distance(net.vertices[net.edges[e1].a], net.vertices[net.edges[e2].a]));
  double r = 0.25 * diameter;

  std::optional<CutAnalysis> cut;
  for (int attempt = 0; attempt < cfg.cut_retries && !cut; ++attempt, r *= 0.5) {
    try {
      cut = select_noncut_ball(net, cycle, r, opt);
    } catch (const Error&) {
    }
  }
  if (!cut) return std::nullopt;
  const Point y0 = cut->point;
  const double rb = cut->radius;

  // Cut the ball out; crossing points become endpoints.
  Network cutnet{net.dim, net.vertices, {}};
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto [a, b] = net.edges[e];
    auto iv = clip_to_ball(net.vertices[a], net.vertices[b], y0, rb);
    if (!iv) {
      cutnet.add_edge(a, b);
      continue;
    }
    if (iv->first > 0.0) cutnet.add_edge(a, cutnet.add_vertex(net.point_on_edge(e, iv->first)));
    if (iv->second < 1.0) cutnet.add_edge(cutnet.add_vertex(net.point_on_edge(e, iv->second)), b);
  }

  // Mass that the current plan sends into the ball, bucketed by direction.
  OpenLoopCandidate out;
  out.cut = *cut;
  out.sectors.center = y0;
  try {
    out.sectors.tangent = tangent_estimate(net, y0, rb);
  } catch (const Error&) {
    return std::nullopt;
  }
  const auto dirs = sector_directions(net.dim, out.sectors.tangent);
  std::vector<double> sector_mass(dirs.size(), 0.0);
  std::vector<Point> sector_centroid(dirs.size());
  for (const auto& e : ev.plan.entries) {
    if (ev.nodes.empty() || distance(ev.nodes[e.j].x, y0) >= rb) continue;
    const Point x = source[e.i].x;
    const Point d = x - project_to_network(x, net).foot;
    if (norm(d) <= 1e-12) continue;  // lands as a Dirac at the cut
    std::size_t best = 0;
    for (std::size_t k = 1; k < dirs.size(); ++k)
      if (dot(d, dirs[k]) > dot(d, dirs[best])) best = k;
    sector_mass[best] += e.mass;
    sector_centroid[best] += x * e.mass;
  }
  const double ell = ev.length;
  const double floor = cfg.mass_floor_factor * cfg.energy.h / ell;
  const int c0 = static_cast<int>(net.vertices.size());  // first crossing vertex id in cutnet
  std::vector<int> crossing_ids;
  for (int v = c0; v < static_cast<int>(cutnet.vertices.size()); ++v) crossing_ids.push_back(v);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const bool positive = sector_mass[k] >= floor && sector_mass[k] > 0.0;
    out.sectors.sectors.push_back({dirs[k], sector_mass[k], positive});
    if (!positive || crossing_ids.empty()) continue;
    const Point centroid = sector_centroid[k] / sector_mass[k];
    int anchor = crossing_ids.front();
    for (int v : crossing_ids)
      if (distance(cutnet.vertices[v], centroid) < distance(cutnet.vertices[anchor], centroid)) anchor = v;
    const double length = ell * sector_mass[k];
    if (length > cfg.min_edge_len) cutnet = add_pendant(cutnet, anchor, dirs[k], length);
  }
  out.net = compact(cutnet);
  return out;
}

// ---------------------------------------------------------------------------
// Initialisation

namespace detail {
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

/// Minimum spanning tree over up to `init_points` representative points of
/// ρ0 (atoms and density cells, chosen by farthest-point sampling from the
/// heaviest), shrunk towards the barycentre and jittered from the seed.
inline Network initial_network(const SourceMeasure& rho0, const OptimizerConfig& cfg, std::uint64_t seed) {
  Atoms cand = source_to_atoms(rho0, 1);
  if (cand.empty()) throw Error("empty source measure");
  Point bary;
  for (const auto& a : cand) bary += a.x * a.w;
  bary = bary / total_mass(cand);

  std::vector<Point> pts;
  std::size_t first = 0;
  for (std::size_t k = 1; k < cand.size(); ++k)
    if (cand[k].w > cand[first].w) first = k;
  pts.push_back(cand[first].x);
  std::vector<double> dmin(cand.size());
  for (std::size_t k = 0; k < cand.size(); ++k) dmin[k] = distance(cand[k].x, pts[0]);
  while (static_cast<int>(pts.size()) < cfg.init_points) {
    std::size_t far = 0;
    for (std::size_t k = 1; k < cand.size(); ++k)
      if (dmin[k] > dmin[far]) far = k;
    if (dmin[far] <= 1e-12) break;
    pts.push_back(cand[far].x);
    for (std::size_t k = 0; k < cand.size(); ++k) dmin[k] = std::min(dmin[k], distance(cand[k].x, cand[far].x));
  }
  double diam = 0.0;
  for (const auto& a : pts)
    for (const auto& b : pts) diam = std::max(diam, distance(a, b));

  std::mt19937_64 rng(seed);
  Network net{rho0.dim, {}, {}};
  for (const auto& p : pts) {
    Point q = bary + (p - bary) * cfg.init_shrink;
    for (int k = 0; k < rho0.dim; ++k) q[k] += cfg.init_jitter * diam * (2.0 * detail::unit_uniform(rng) - 1.0);
    net.add_vertex(q);
  }
  // Prim's algorithm, lowest index on ties.
  const std::size_t n = net.vertices.size();
  std::vector<char> in(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> link(n, -1);
  best[0] = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    int u = -1;
    for (std::size_t k = 0; k < n; ++k)
      if (!in[k] && (u < 0 || best[k] < best[u])) u = static_cast<int>(k);
    in[u] = 1;
    if (link[u] >= 0) net.add_edge(link[u], u);
    for (std::size_t k = 0; k < n; ++k) {
      const double d = distance(net.vertices[u], net.vertices[k]);
      if (!in[k] && d < best[k]) {
        best[k] = d;
        link[k] = u;
      }
    }
  }
  return net;
}

// ---------------------------------------------------------------------------
// Driver

namespace detail {

struct Candidate {
  MoveKind kind;
  int index;
  Network net;
  std::string details;
};

inline bool admissible(const Network& net, double min_edge_len) {
  try {
    validate(net, min_edge_len);
  } catch (const Error&) {
    return false;
  }
  if (net.vertices.empty()) return false;
  if (net.edges.empty()) return net.vertices.size() == 1;
  return is_connected(net);
}

inline std::string fmt_point(const Point& p, int dim) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << p[0] << "," << p[1];
  if (dim == 3) os << "," << p[2];
  os << ")";
  return os.str();
}

}  // namespace detail

inline void validate(const OptimizerConfig& cfg) {
  validate(cfg.energy);
  if (cfg.max_rounds < 0) throw Error("max_rounds must be >= 0");
  if (!(cfg.accept_tol >= 0.0)) throw Error("accept_tol must be >= 0");
  if (!(cfg.eta > 0.0 && cfg.eta <= 1.0)) throw Error("eta must lie in (0,1]");
  if (cfg.init_points < 1) throw Error("init_points must be >= 1");
  if (cfg.max_pendant_atoms < 0) throw Error("max_pendant_atoms must be >= 0");
}

inline std::pair<Network, SolveReport> optimize(const SourceMeasure& rho0, const Network& init,
                                                const OptimizerConfig& cfg) {
  validate(cfg);
  if (!is_connected(init) || (init.edges.empty() && init.vertices.size() != 1))
    throw Error("infeasible: disconnected");
  const Atoms source = source_to_atoms(rho0, cfg.energy.quad);
  SolveReport rep;
  rep.seed = cfg.energy.seed;
  Network cur = init;
  UniformEvaluation ev = evaluate_uniform(cur, source, cfg.energy);
  rep.energy_trace.push_back(ev.energy);
  rep.cycles_initial = cycle_rank(cur);

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    rep.rounds = round;
    std::vector<detail::Candidate> cands;
    if (cfg.vertex_steps) {
      // Damping ladder η, η/2, η/4: one candidate per step length.
      for (int v = 0; v < static_cast<int>(cur.vertices.size()); ++v) {
        for (double damp : {1.0, 0.5, 0.25}) {
          Network c = vertex_step(cur, ev, v, cfg.eta * damp);
          if (c.vertices[v] == cur.vertices[v]) break;
          cands.push_back({MoveKind::vertex_step, v, std::move(c), damp == 1.0 ? "" : "damped"});
        }
      }
    }
    if (cfg.splits) {
      for (int e = 0; e < static_cast<int>(cur.edges.size()); ++e) {
        if (cur.edge_length(e) < 2.0 * cfg.energy.h) continue;
        Network c = split_edge(cur, e);
        const int mid = static_cast<int>(c.vertices.size()) - 1;
        try {
          c = vertex_step(c, evaluate_uniform(c, source, cfg.energy), mid, cfg.eta);
        } catch (const Error&) {
          continue;
        }
        cands.push_back({MoveKind::split_edge, e, std::move(c), ""});
      }
    }
    if (cfg.collapses) {
      for (int e = 0; e < static_cast<int>(cur.edges.size()); ++e) {
        if (cur.edge_length(e) >= cfg.effective_collapse_len()) continue;
        try {
          cands.push_back({MoveKind::collapse_edge, e, collapse_edge(cur, e), ""});
        } catch (const Error&) {
        }
      }
    }
    std::vector<MoveLogEntry> loop_log;
    if (cfg.open_loops) {
      const auto cycles = find_cycles(cur);
      for (int c = 0; c < static_cast<int>(cycles.size()); ++c) {
        ++rep.open_loop_attempts;
        auto cand = open_loop(cur, ev, cfg, cycles[c]);
        if (!cand) {
          ++rep.open_loop_skipped;
          rep.moves.push_back({MoveKind::open_loop, round, c, ev.energy, ev.energy, false, "skipped: no clean cut radius"});
          continue;
        }
        std::ostringstream os;
        os << "y0=" << detail::fmt_point(cand->cut.point, cur.dim) << " r=" << cand->cut.radius << " sectors=";
        int npos = 0;
        for (const auto& s : cand->sectors.sectors) npos += s.positive;
        os << npos;
        cands.push_back({MoveKind::open_loop, c, std::move(cand->net), os.str()});
      }
    }
    if (cfg.pendants && !cur.edges.empty()) {
      std::vector<std::pair<double, int>> far;  // (−w·dist^p, atom)
      std::vector<Projection> proj(source.size());
      for (int i = 0; i < static_cast<int>(source.size()); ++i) {
        proj[i] = project_to_network(source[i].x, cur);
        if (proj[i].distance > cfg.energy.h)
          far.emplace_back(-source[i].w * pow_p(proj[i].distance, cfg.energy.p), i);
      }
      std::stable_sort(far.begin(), far.end());
      if (static_cast<int>(far.size()) > cfg.max_pendant_atoms) far.resize(cfg.max_pendant_atoms);
      std::sort(far.begin(), far.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
      for (const auto& [key, i] : far) {
        const Projection& pr = proj[i];
        int v = -1;
        Network base = split_edge_at(cur, pr.edge, pr.t, v, cfg.min_edge_len);
        for (double frac : {0.5, 1.0}) {
          cands.push_back({MoveKind::add_pendant, i, add_pendant(base, v, source[i].x - pr.foot, frac * pr.distance),
                           frac == 1.0 ? "full" : "half"});
        }
      }
    }

    int best = -1;
    double best_energy = ev.energy - cfg.accept_tol;
    std::vector<double> energies(cands.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < cands.size(); ++k) {
      ++rep.evaluated_per_kind[static_cast<int>(cands[k].kind)];
      if (!detail::admissible(cands[k].net, cfg.min_edge_len)) continue;
      try {
        energies[k] = evaluate_uniform(cands[k].net, source, cfg.energy).energy;
      } catch (const Error&) {
        continue;
      }
      if (energies[k] < best_energy) {
        best_energy = energies[k];
        best = static_cast<int>(k);
      }
    }
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (cands[k].kind != MoveKind::open_loop || static_cast<int>(k) == best) continue;
      rep.moves.push_back({MoveKind::open_loop, round, cands[k].index, ev.energy, energies[k], false, cands[k].details});
    }
    if (best < 0) {
      rep.converged = true;
      break;
    }
    auto& win = cands[best];
    rep.moves.push_back({win.kind, round, win.index, ev.energy, best_energy, true, win.details});
    ++rep.accepted_per_kind[static_cast<int>(win.kind)];
    if (win.kind == MoveKind::open_loop) ++rep.open_loop_accepted;
    cur = std::move(win.net);
    ev = evaluate_uniform(cur, source, cfg.energy);
    rep.energy_trace.push_back(ev.energy);
  }

  rep.final_net = cur;
  rep.final_energy = ev.energy;
  rep.cycles_final = cycle_rank(cur);
  double degenerate = std::numeric_limits<double>::infinity();
  Point bary;
  for (const auto& a : source) bary += a.x * a.w;
  std::vector<Point> sites{bary};
  for (const auto& a : source) sites.push_back(a.x);
  if (sites.size() > 64) sites.resize(64);
  for (const auto& s : sites) {
    double c = 0.0;
    for (const auto& a : source) c += a.w * cost_pow(a.x, s, cfg.energy.p);
    degenerate = std::min(degenerate, c);
  }
  rep.degenerate_energy = degenerate;
  rep.degenerate_better = degenerate < rep.final_energy;
  return {cur, rep};
}

/// Runs `k` seeded solves from automatic initialisations (seeds seed..seed+k-1)
/// concurrently and keeps the lowest final energy, lowest seed on ties. The
/// result does not depend on thread scheduling.
inline std::pair<Network, SolveReport> optimize_multistart(const SourceMeasure& rho0, OptimizerConfig cfg, int k,
                                                           bool parallel = true) {
  if (k < 1) throw Error("multistart count must be >= 1");
  const std::uint64_t base = cfg.energy.seed;
  auto run_seed = [&rho0, cfg](std::uint64_t seed) {
    OptimizerConfig c = cfg;
    c.energy.seed = seed;
    return optimize(rho0, initial_network(rho0, c, seed), c);
  };
  std::vector<std::pair<Network, SolveReport>> runs;
  if (parallel && k > 1) {
    std::vector<std::future<std::pair<Network, SolveReport>>> jobs;
    for (int s = 0; s < k; ++s) jobs.push_back(std::async(std::launch::async, run_seed, base + static_cast<std::uint64_t>(s)));
    for (auto& j : jobs) runs.push_back(j.get());
  } else {
    for (int s = 0; s < k; ++s) runs.push_back(run_seed(base + static_cast<std::uint64_t>(s)));
  }
  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s)
    if (runs[s].second.final_energy < runs[best].second.final_energy) best = s;
  std::vector<std::pair<std::uint64_t, double>> energies;
  for (std::size_t s = 0; s < runs.size(); ++s) energies.emplace_back(runs[s].second.seed, runs[s].second.final_energy);
  auto out = std::move(runs[best]);
  out.second.multistart = std::move(energies);
  return out;
}

}  // namespace wh1
