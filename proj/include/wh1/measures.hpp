#pragma once

// Source measures (weighted atoms and/or a piecewise-constant density on a
// grid), measures carried by a network, the length functional and 1-density
// ratios.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "wh1/geometry.hpp"
#include "wh1/point.hpp"

namespace wh1 {

inline constexpr double kMassTol = 1e-9;

/// Piecewise-constant density on a regular grid. `values` are densities
/// (mass per unit d-volume), row-major with x fastest.
struct DensityGrid {
  Point origin;
  double cell = 1.0;
  std::array<int, 3> dims{1, 1, 1};
  std::vector<double> values;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  double cell_volume(int dim) const { return std::pow(cell, dim); }
  Point cell_corner(std::size_t idx) const {
    const std::size_t nx = dims[0], ny = dims[1];
    const double ix = static_cast<double>(idx % nx);
    const double iy = static_cast<double>((idx / nx) % ny);
    const double iz = static_cast<double>(idx / (nx * ny));
    return origin + Point(ix * cell, iy * cell, iz * cell);
  }
  double max_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }
};

struct SourceMeasure {
  int dim = 2;
  Atoms atoms;
  std::optional<DensityGrid> density;

  double density_mass() const {
    if (!density) return 0.0;
    double s = 0.0;
    for (double v : density->values) s += v;
    return s * density->cell_volume(dim);
  }
  double mass() const { return total_mass(atoms) + density_mass(); }
};

inline void validate(const SourceMeasure& rho) {
  if (rho.dim != 2 && rho.dim != 3) throw Error("dimension must be 2 or 3");
  for (const auto& a : rho.atoms) {
    if (!is_finite(a.x) || !(a.w > 0.0) || !std::isfinite(a.w)) throw Error("atom weights must be positive and finite");
    if (rho.dim == 2 && a.x[2] != 0.0) throw Error("2D atom with nonzero z");
  }
  if (rho.density) {
    const auto& g = *rho.density;
    if (!(g.cell > 0.0)) throw Error("density cell size must be positive");
    if (rho.dim == 2 && g.dims[2] != 1) throw Error("2D density with z extent");
    for (int k = 0; k < 3; ++k)
      if (g.dims[k] < 1) throw Error("density dims must be positive");
    if (g.values.size() != g.cell_count()) throw Error("density value count mismatch");
    for (double v : g.values)
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error("density values must be nonnegative and finite");
  }
  if (std::abs(rho.mass() - 1.0) > kMassTol) throw Error("source measure mass must be 1");
}

/// Atoms passed through; each density cell becomes quad^d equal atoms at
/// its subcell centres. Zero cells are skipped.
inline Atoms source_to_atoms(const SourceMeasure& rho, int quad) {
  if (quad < 1) throw Error("quad must be >= 1");
  Atoms out = rho.atoms;
  if (!rho.density) return out;
  const auto& g = *rho.density;
  const double vol = g.cell_volume(rho.dim);
  const int qz = rho.dim == 3 ? quad : 1;
  const double sub = g.cell / quad;
  const double share = 1.0 / (static_cast<double>(quad) * quad * qz);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const double m = g.values[c] * vol;
    if (m <= 0.0) continue;
    const Point corner = g.cell_corner(c);
    for (int kz = 0; kz < qz; ++kz)
      for (int ky = 0; ky < quad; ++ky)
        for (int kx = 0; kx < quad; ++kx) {
          Point x = corner + Point((kx + 0.5) * sub, (ky + 0.5) * sub, rho.dim == 3 ? (kz + 0.5) * sub : 0.0);
          out.push_back({x, m * share});
        }
  }
  return out;
}

/// A measure carried by a network: constant linear density along each edge
/// (edge_masses[e] spread uniformly) plus atoms at vertices.
struct NetworkMeasure {
  Network net;
  std::vector<double> edge_masses;
  std::vector<double> vertex_atoms;

  double mass() const {
    double s = 0.0;
    for (double m : edge_masses) s += m;
    for (double m : vertex_atoms) s += m;
    return s;
  }
};

/// Uniform probability measure H^1⌞net / H^1(net). A network without edges
/// gets a unit atom on its single vertex.
inline NetworkMeasure uniform_measure(const Network& net) {
  NetworkMeasure nu{net, std::vector<double>(net.edges.size(), 0.0), std::vector<double>(net.vertices.size(), 0.0)};
  const double len = network_length(net);
  if (net.edges.empty()) {
    if (!nu.vertex_atoms.empty()) nu.vertex_atoms[0] = 1.0;
    return nu;
  }
  for (std::size_t e = 0; e < net.edges.size(); ++e) nu.edge_masses[e] = net.edge_length(e) / len;
  return nu;
}

/// min{α ≥ 0 : α ν ≥ H^1⌞supp ν}, +∞ when the support is disconnected.
/// Every edge of the carrying network is part of the declared support, so a
/// massless edge makes the constraint unmeetable.
inline double length_functional(const NetworkMeasure& nu) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Network& net = nu.net;
  std::vector<int> atom_vertices;
  for (std::size_t v = 0; v < nu.vertex_atoms.size(); ++v)
    if (nu.vertex_atoms[v] > 0.0) atom_vertices.push_back(static_cast<int>(v));

  if (net.edges.empty()) {
    // Support is a finite set of points: connected only if it is one point.
    for (std::size_t k = 1; k < atom_vertices.size(); ++k)
      if (!(net.vertices[atom_vertices[k]] == net.vertices[atom_vertices[0]])) return inf;
    return 0.0;
  }
  if (!is_connected(net)) return inf;
  std::vector<char> touched(net.vertices.size(), 0);
  for (const auto& e : net.edges) touched[e.a] = touched[e.b] = 1;
  for (int v : atom_vertices)
    if (!touched[v]) return inf;

  double alpha = 0.0;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (!(nu.edge_masses[e] > 0.0)) return inf;
    alpha = std::max(alpha, net.edge_length(e) / nu.edge_masses[e]);
  }
  return alpha;
}

/// ν(B_r(y0)) / (2r) for each radius, with exact segment–ball intersections.
inline std::vector<double> theta1_density(const NetworkMeasure& nu, const Point& y0, const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (!(r > 0.0)) throw Error("radius must be positive");
    double m = 0.0;
    for (std::size_t e = 0; e < nu.net.edges.size(); ++e) {
      if (nu.edge_masses[e] <= 0.0) continue;
      auto iv = clip_to_ball(nu.net.vertices[nu.net.edges[e].a], nu.net.vertices[nu.net.edges[e].b], y0, r);
      if (iv) m += (iv->second - iv->first) * nu.edge_masses[e];
    }
    for (std::size_t v = 0; v < nu.vertex_atoms.size(); ++v)
      if (nu.vertex_atoms[v] > 0.0 && distance(nu.net.vertices[v], y0) < r) m += nu.vertex_atoms[v];
    out.push_back(m / (2.0 * r));
  }
  return out;
}

/// Volume of the unit ball in R^k.
inline double unit_ball_volume(int k) {
  constexpr double pi = 3.14159265358979323846;
  switch (k) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return pi;
    case 3: return 4.0 * pi / 3.0;
    default: break;
  }
  return std::pow(pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

}  // namespace wh1
