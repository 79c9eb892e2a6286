#pragma once

// Embedded straight-segment networks in R^2 / R^3: lengths, projections,
// connectivity, cycle bases, Hausdorff distances, tangents and clean ball
// cuts around points of a loop.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wh1/point.hpp"

namespace wh1 {

struct Edge {
  int a = 0;
  int b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Network {
  int dim = 2;
  std::vector<Point> vertices;
  std::vector<Edge> edges;

  double edge_length(std::size_t e) const {
    return distance(vertices[edges[e].a], vertices[edges[e].b]);
  }
  Point point_on_edge(std::size_t e, double t) const {
    const Point& a = vertices[edges[e].a];
    return a + (vertices[edges[e].b] - a) * t;
  }
  int add_vertex(const Point& p) {
    vertices.push_back(p);
    return static_cast<int>(vertices.size()) - 1;
  }
  void add_edge(int a, int b) { edges.push_back({a, b}); }
};

/// Throws wh1::Error when the network violates a data-model invariant.
inline void validate(const Network& net, double min_edge_len = 1e-12) {
  if (net.dim != 2 && net.dim != 3) throw Error("dimension must be 2 or 3");
  const int nv = static_cast<int>(net.vertices.size());
  for (const auto& v : net.vertices) {
    if (!is_finite(v)) throw Error("non-finite vertex coordinate");
    if (net.dim == 2 && v[2] != 0.0) throw Error("2D network with nonzero z");
  }
  std::vector<std::pair<int, int>> seen;
  seen.reserve(net.edges.size());
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    auto [a, b] = net.edges[e];
    if (a < 0 || b < 0 || a >= nv || b >= nv) throw Error("edge index out of range");
    if (a == b) throw Error("self-loop edge");
    if (net.edge_length(e) < min_edge_len) throw Error("edge shorter than min_edge_len");
    seen.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) throw Error("duplicate edge");
}

inline double network_length(const Network& net) {
  double s = 0.0;
  for (std::size_t e = 0; e < net.edges.size(); ++e) s += net.edge_length(e);
  return s;
}

// ---------------------------------------------------------------------------
// Segment kernels

/// Parameter in [0,1] of the point of segment [a,b] closest to p.
inline double closest_parameter(const Point& p, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = squared_norm(d);
  if (len2 == 0.0) return 0.0;
  return std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
}

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const double t = closest_parameter(p, a, b);
  return distance(p, a + (b - a) * t);
}

/// Parameter interval of segment a + t(b-a), t in [0,1], lying in the closed
/// ball B(center, radius). Empty when the segment misses the ball.
inline std::optional<std::pair<double, double>> clip_to_ball(const Point& a, const Point& b,
                                                             const Point& center, double radius) {
  const Point d = b - a;
  const Point f = a - center;
  const double A = squared_norm(d);
  const double B = 2.0 * dot(f, d);
  const double C = squared_norm(f) - radius * radius;
  if (A == 0.0) {
    if (C <= 0.0) return std::make_pair(0.0, 1.0);
    return std::nullopt;
  }
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  // Numerically stable roots.
  const double q = -0.5 * (B + std::copysign(sq, B));
  double t0, t1;
  if (q != 0.0) {
    t0 = q / A;
    t1 = C / q;
  } else {
    t0 = t1 = -B / (2.0 * A);
  }
  if (t0 > t1) std::swap(t0, t1);
  const double lo = std::max(t0, 0.0);
  const double hi = std::min(t1, 1.0);
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

// ---------------------------------------------------------------------------
// Projection

struct Projection {
  Point foot;
  double distance = 0.0;
  int edge = -1;    // -1 for a network without edges (foot is vertex 0)
  double t = 0.0;   // parameter along the edge
};

/// Global nearest point of the union of segments. Ties go to the lowest edge
/// index, then the lowest parameter.
inline Projection project_to_network(const Point& p, const Network& net) {
  if (net.vertices.empty()) throw Error("empty domain");
  Projection best;
  if (net.edges.empty()) {
    best.foot = net.vertices.front();
    best.distance = distance(p, best.foot);
    return best;
  }
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const Point& a = net.vertices[net.edges[e].a];
    const Point& b = net.vertices[net.edges[e].b];
    const double t = closest_parameter(p, a, b);
    const Point q = a + (b - a) * t;
    const double d2 = squared_norm(p - q);
    if (d2 < best_d2) {
      best_d2 = d2;
      best.foot = q;
      best.edge = static_cast<int>(e);
      best.t = t;
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

inline double distance_to_network(const Point& p, const Network& net) {
  return project_to_network(p, net).distance;
}

// ---------------------------------------------------------------------------
// Connectivity

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

private:
  std::vector<std::size_t> parent_;
};

/// Connectivity over the vertices touched by edges; a lone vertex counts as
/// connected.
inline bool is_connected(const Network& net) {
  if (net.edges.empty()) return true;
  UnionFind uf(net.vertices.size());
  for (const auto& e : net.edges) uf.unite(e.a, e.b);
  const std::size_t root = uf.find(net.edges.front().a);
  for (const auto& e : net.edges)
    if (uf.find(e.a) != root) return false;
  return true;
}

/// Number of connected components among vertices touched by edges.
inline int component_count(const Network& net) {
  if (net.edges.empty()) return net.vertices.empty() ? 0 : 1;
  UnionFind uf(net.vertices.size());
  std::vector<char> touched(net.vertices.size(), 0);
  for (const auto& e : net.edges) {
    uf.unite(e.a, e.b);
    touched[e.a] = touched[e.b] = 1;
  }
  int count = 0;
  for (std::size_t v = 0; v < net.vertices.size(); ++v)
    if (touched[v] && uf.find(v) == v) ++count;
  return count;
}

/// Dimension of the cycle space: |E| - |V_touched| + components.
inline int cycle_rank(const Network& net) {
  if (net.edges.empty()) return 0;
  std::vector<char> touched(net.vertices.size(), 0);
  for (const auto& e : net.edges) touched[e.a] = touched[e.b] = 1;
  const int nv = static_cast<int>(std::count(touched.begin(), touched.end(), 1));
  return static_cast<int>(net.edges.size()) - nv + component_count(net);
}

using Cycle = std::vector<int>;  // edge indices, consecutive along the loop

/// Fundamental cycle basis from a BFS spanning forest: one cycle per
/// non-tree edge, in increasing non-tree edge index.
inline std::vector<Cycle> find_cycles(const Network& net) {
  const std::size_t nv = net.vertices.size();
  std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (neighbor, edge)
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    adj[net.edges[e].a].emplace_back(net.edges[e].b, static_cast<int>(e));
    adj[net.edges[e].b].emplace_back(net.edges[e].a, static_cast<int>(e));
  }
  std::vector<int> parent_edge(nv, -1), depth(nv, -1);
  std::vector<char> tree_edge(net.edges.size(), 0);
  for (std::size_t s = 0; s < nv; ++s) {
    if (depth[s] >= 0) continue;
    depth[s] = 0;
    std::vector<int> queue{static_cast<int>(s)};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      for (auto [w, e] : adj[u]) {
        if (depth[w] >= 0) continue;
        depth[w] = depth[u] + 1;
        parent_edge[w] = e;
        tree_edge[e] = 1;
        queue.push_back(w);
      }
    }
  }
  auto other = [&](int e, int v) { return net.edges[e].a == v ? net.edges[e].b : net.edges[e].a; };

  std::vector<Cycle> cycles;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (tree_edge[e]) continue;
    int u = net.edges[e].a, w = net.edges[e].b;
    std::vector<int> from_u, from_w;
    while (u != w) {
      if (depth[u] >= depth[w]) {
        from_u.push_back(parent_edge[u]);
        u = other(parent_edge[u], u);
      } else {
        from_w.push_back(parent_edge[w]);
        w = other(parent_edge[w], w);
      }
    }
    // a -> lca along from_u, lca -> b along reversed from_w, then e closes it.
    Cycle c(from_u.begin(), from_u.end());
    c.insert(c.end(), from_w.rbegin(), from_w.rend());
    c.push_back(static_cast<int>(e));
    cycles.push_back(std::move(c));
  }
  return cycles;
}

/// Vertex degrees.
inline std::vector<int> degrees(const Network& net) {
  std::vector<int> deg(net.vertices.size(), 0);
  for (const auto& e : net.edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

/// Drops vertices not touched by any edge (keeps a lone vertex of an
/// edgeless network) and renumbers.
inline Network compact(const Network& net) {
  if (net.edges.empty()) {
    Network out{net.dim, {}, {}};
    if (!net.vertices.empty()) out.vertices.push_back(net.vertices.front());
    return out;
  }
  std::vector<int> remap(net.vertices.size(), -1);
  Network out{net.dim, {}, {}};
  for (const auto& e : net.edges)
    for (int v : {e.a, e.b})
      if (remap[v] < 0) remap[v] = 0;
  for (std::size_t v = 0; v < net.vertices.size(); ++v)
    if (remap[v] == 0) remap[v] = out.add_vertex(net.vertices[v]);
  for (const auto& e : net.edges) out.add_edge(remap[e.a], remap[e.b]);
  return out;
}

// ---------------------------------------------------------------------------
// Hausdorff distance

inline double directed_hausdorff(std::span<const Point> a, std::span<const Point> b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) {
      best = std::min(best, squared_norm(p - q));
      if (best <= worst) break;  // cannot raise the sup any more
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

/// Hausdorff distance between two finite samples.
inline double hausdorff_distance(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw Error("empty sample");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

/// Points along every edge with spacing at most `spacing`, endpoints included.
inline std::vector<Point> sample_network(const Network& net, double spacing) {
  std::vector<Point> out;
  if (net.edges.empty()) {
    out = net.vertices;
    return out;
  }
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const int k = std::max(1, static_cast<int>(std::ceil(net.edge_length(e) / spacing)));
    for (int i = 0; i <= k; ++i) out.push_back(net.point_on_edge(e, static_cast<double>(i) / k));
  }
  return out;
}

/// sup over samples of A of the exact distance to the segments of B.
inline double directed_distance_to_network(std::span<const Point> a, const Network& b) {
  double worst = 0.0;
  for (const auto& p : a) worst = std::max(worst, distance_to_network(p, b));
  return worst;
}

/// Hausdorff distance between two networks: each side is sampled with the
/// given spacing and measured exactly against the other side's segments.
inline double hausdorff_distance(const Network& a, const Network& b, double spacing) {
  const auto sa = sample_network(a, spacing);
  const auto sb = sample_network(b, spacing);
  if (sa.empty() || sb.empty()) throw Error("empty sample");
  return std::max(directed_distance_to_network(sa, b), directed_distance_to_network(sb, a));
}

// ---------------------------------------------------------------------------
// Balls

/// net ∩ closed ball as a standalone network (clipped pieces, crossing
/// points become endpoints).
inline Network clip_network(const Network& net, const Point& center, double radius) {
  Network out{net.dim, {}, {}};
  std::vector<int> vmap(net.vertices.size(), -1);
  auto vertex_id = [&](int v) {
    if (vmap[v] < 0) vmap[v] = out.add_vertex(net.vertices[v]);
    return vmap[v];
  };
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto [a, b] = net.edges[e];
    auto iv = clip_to_ball(net.vertices[a], net.vertices[b], center, radius);
    if (!iv || iv->second - iv->first <= 0.0) continue;
    const int ia = iv->first == 0.0 ? vertex_id(a) : out.add_vertex(net.point_on_edge(e, iv->first));
    const int ib = iv->second == 1.0 ? vertex_id(b) : out.add_vertex(net.point_on_edge(e, iv->second));
    if (distance(out.vertices[ia], out.vertices[ib]) > 0.0) out.add_edge(ia, ib);
  }
  return out;
}

/// H^1(net ∩ closed ball).
inline double length_in_ball(const Network& net, const Point& center, double radius) {
  double s = 0.0;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    auto iv = clip_to_ball(net.vertices[net.edges[e].a], net.vertices[net.edges[e].b], center, radius);
    if (iv) s += (iv->second - iv->first) * net.edge_length(e);
  }
  return s;
}

/// Unit principal axis of net ∩ B_r(y0): leading eigenvector of the
/// mean-centred second-moment matrix, integrated exactly per clipped segment.
/// Sign convention: first nonzero coordinate positive.
inline Point tangent_estimate(const Network& net, const Point& y0, double r) {
  if (!(r > 0.0)) throw Error("radius must be positive");
  double mass = 0.0;
  Eigen::Vector3d first = Eigen::Vector3d::Zero();
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    auto iv = clip_to_ball(net.vertices[net.edges[e].a], net.vertices[net.edges[e].b], y0, r);
    if (!iv) continue;
    const Point pa = net.point_on_edge(e, iv->first) - y0;
    const Point pb = net.point_on_edge(e, iv->second) - y0;
    const double len = distance(pa, pb);
    if (len <= 0.0) continue;
    const Eigen::Vector3d a(pa[0], pa[1], pa[2]);
    const Eigen::Vector3d d = Eigen::Vector3d(pb[0], pb[1], pb[2]) - a;
    mass += len;
    first += len * (a + 0.5 * d);
    second += len * (a * a.transpose() + 0.5 * (a * d.transpose() + d * a.transpose()) +
                     d * d.transpose() / 3.0);
  }
  if (mass <= 0.0) throw Error("no tangent");
  const Eigen::Vector3d mean = first / mass;
  const Eigen::Matrix3d cov = second / mass - mean * mean.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const double lead = eig.eigenvalues()(2);
  if (!(lead > 1e-14 * r * r)) throw Error("no tangent");
  Eigen::Vector3d v = eig.eigenvectors().col(2).normalized();
  if (net.dim == 2) v(2) = 0.0;
  v.normalize();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(v(k)) > 1e-12) {
      if (v(k) < 0) v = -v;
      break;
    }
  }
  return {v(0), v(1), v(2)};
}

// ---------------------------------------------------------------------------
// Ball cuts

struct CutAnalysis {
  Point point;
  double radius = 0.0;
  int crossings = 0;
  bool inside_connected = false;
  bool outside_connected = false;
  std::vector<Point> crossing_points;
  int edge = -1;  // edge carrying the centre point, when known
};

inline constexpr double kCrossingTol = 1e-9;

/// Counts sphere crossings of ∂B_radius(y0) with the network and tests
/// connectivity of the inside and outside parts. A radius for which a vertex
/// sits on the sphere, or an edge is tangent to it, is reported with
/// crossings = -1 (not a clean cut).
inline CutAnalysis analyze_cut(const Network& net, const Point& y0, double radius) {
  CutAnalysis out;
  out.point = y0;
  out.radius = radius;
  for (const auto& v : net.vertices) {
    if (std::abs(distance(v, y0) - radius) <= kCrossingTol) {
      out.crossings = -1;
      return out;
    }
  }
  const std::size_t nv = net.vertices.size();
  const std::size_t ne = net.edges.size();
  // Union-find nodes: vertices, inside piece per edge, two outside pieces per edge.
  UnionFind uf(nv + 3 * ne);
  std::vector<char> has_in(ne, 0), has_out_a(ne, 0), has_out_b(ne, 0);
  std::vector<char> v_inside(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) v_inside[v] = distance(net.vertices[v], y0) < radius;
  for (std::size_t e = 0; e < ne; ++e) {
    const auto [a, b] = net.edges[e];
    const Point& pa = net.vertices[a];
    const Point& pb = net.vertices[b];
    auto iv = clip_to_ball(pa, pb, y0, radius);
    const std::size_t in_id = nv + 3 * e, outa_id = in_id + 1, outb_id = in_id + 2;
    if (!iv || iv->second - iv->first <= kCrossingTol / std::max(net.edge_length(e), 1e-300)) {
      if (iv) {  // tangential touch
        out.crossings = -1;
        return out;
      }
      has_out_a[e] = 1;
      uf.unite(outa_id, a);
      uf.unite(outa_id, b);
      continue;
    }
    has_in[e] = 1;
    if (v_inside[a]) uf.unite(in_id, a);
    else {
      has_out_a[e] = 1;
      uf.unite(outa_id, a);
      out.crossing_points.push_back(net.point_on_edge(e, iv->first));
    }
    if (v_inside[b]) uf.unite(in_id, b);
    else {
      has_out_b[e] = 1;
      uf.unite(outb_id, b);
      out.crossing_points.push_back(net.point_on_edge(e, iv->second));
    }
  }
  // Deduplicate crossing points (a sphere through a shared point).
  std::vector<Point> uniq;
  for (const auto& c : out.crossing_points) {
    bool dup = false;
    for (const auto& u : uniq) dup = dup || distance(c, u) <= kCrossingTol;
    if (!dup) uniq.push_back(c);
  }
  out.crossing_points = std::move(uniq);
  out.crossings = static_cast<int>(out.crossing_points.size());

  auto count_roots = [&](auto&& members) {
    std::vector<std::size_t> roots;
    for (std::size_t id : members) roots.push_back(uf.find(id));
    std::sort(roots.begin(), roots.end());
    return std::unique(roots.begin(), roots.end()) - roots.begin();
  };
  std::vector<std::size_t> in_members, out_members;
  for (std::size_t e = 0; e < ne; ++e) {
    if (has_in[e]) in_members.push_back(nv + 3 * e);
    if (has_out_a[e]) out_members.push_back(nv + 3 * e + 1);
    if (has_out_b[e]) out_members.push_back(nv + 3 * e + 2);
  }
  out.inside_connected = count_roots(in_members) <= 1;
  out.outside_connected = count_roots(out_members) <= 1;
  return out;
}

struct CutOptions {
  std::vector<Point> excluded;            // e.g. source atom locations
  bool require_outside_connected = true;  // false for cuts on trees
  int radius_grid = 64;
  // Parameters along each cycle edge tried as centres, in order.
  std::vector<double> centre_params{0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875};
  // Edge order to try; defaults to the cycle order.
  std::vector<int> edge_order;
};

/// The `k`-th of `n` dyadic radii strictly inside (r/2, r).
inline double dyadic_radius(double r, int k, int n) {
  return 0.5 * r + r * (2.0 * k + 1.0) / (4.0 * n);
}

inline bool is_clean_cut(const CutAnalysis& c, bool need_outside) {
  return c.crossings == 2 && c.inside_connected && (!need_outside || c.outside_connected);
}

/// Picks a centre on the given edges (excluding vertices and excluded
/// points) and a radius in (r/2, r) such that the sphere meets the network in
/// exactly two points and both sides of the cut are connected.
inline CutAnalysis select_noncut_ball(const Network& net, const Cycle& cycle, double r,
                                      const CutOptions& opt = {}) {
  if (!(r > 0.0)) throw Error("radius must be positive");
  const std::vector<int>& order = opt.edge_order.empty() ? cycle : opt.edge_order;
  for (int e : order) {
    for (double t : opt.centre_params) {
      const Point y0 = net.point_on_edge(e, t);
      bool excluded = false;
      for (const auto& x : opt.excluded) excluded = excluded || distance(x, y0) <= kCrossingTol;
      for (const auto& v : net.vertices) excluded = excluded || distance(v, y0) <= kCrossingTol;
      if (excluded) continue;
      for (int k = opt.radius_grid - 1; k >= 0; --k) {
        const double rb = dyadic_radius(r, k, opt.radius_grid);
        CutAnalysis c = analyze_cut(net, y0, rb);
        if (is_clean_cut(c, opt.require_outside_connected)) {
          c.edge = e;
          return c;
        }
      }
    }
  }
  throw Error("no clean cut radius");
}

// ---------------------------------------------------------------------------
// Rigid motions and dilations (used by invariance checks)

inline Network transformed(const Network& net, const Eigen::Matrix3d& rot, const Point& shift, double scale) {
  Network out = net;
  for (auto& v : out.vertices) {
    Eigen::Vector3d x(v[0], v[1], v[2]);
    x = scale * (rot * x);
    v = Point(x(0), x(1), x(2)) + shift;
  }
  return out;
}

}  // namespace wh1
