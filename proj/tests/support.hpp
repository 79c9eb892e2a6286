#pragma once

// Shared builders and oracles for the unit tests and the acceptance suite.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wh1/energy.hpp"
#include "wh1/geometry.hpp"
#include "wh1/measures.hpp"
#include "wh1/transport.hpp"

namespace wh1::testing {

inline constexpr double kPi = 3.14159265358979323846;

inline double uniform(std::mt19937_64& rng, double a = 0.0, double b = 1.0) {
  return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline Network polyline(const std::vector<Point>& pts, int dim = 2) {
  Network n;
  n.dim = dim;
  for (const auto& p : pts) n.add_vertex(p);
  for (int k = 0; k + 1 < static_cast<int>(pts.size()); ++k) n.add_edge(k, k + 1);
  return n;
}

inline Network segment(const Point& a, const Point& b, int dim = 2) { return polyline({a, b}, dim); }

inline Network closed_polygon(const std::vector<Point>& pts) {
  Network n = polyline(pts);
  n.add_edge(static_cast<int>(pts.size()) - 1, 0);
  return n;
}

inline Network triangle(double side = 1.0) {
  return closed_polygon({Point(0, 0), Point(side, 0), Point(0.5 * side, 0.5 * std::sqrt(3.0) * side)});
}

inline Network unit_square_loop(double lo = 0.25, double hi = 0.75) {
  return closed_polygon({Point(lo, lo), Point(hi, lo), Point(hi, hi), Point(lo, hi)});
}

inline Network circle_polygon(int n, double radius, const Point& centre = Point(0, 0)) {
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * k / n;
    pts.push_back(centre + Point(radius * std::cos(a), radius * std::sin(a)));
  }
  return closed_polygon(pts);
}

inline SourceMeasure atoms_measure(const Atoms& atoms, int dim = 2) {
  SourceMeasure rho;
  rho.dim = dim;
  rho.atoms = atoms;
  return rho;
}

/// Uniform probability density on the axis-aligned box [x0,x1]×[y0,y1]
/// (box edges on grid lines of the given cell size).
inline SourceMeasure box_density(double x0, double y0, double x1, double y1, double cell) {
  SourceMeasure rho;
  rho.dim = 2;
  DensityGrid g;
  g.cell = cell;
  g.origin = Point(x0, y0);
  g.dims = {static_cast<int>(std::lround((x1 - x0) / cell)), static_cast<int>(std::lround((y1 - y0) / cell)), 1};
  const double v = 1.0 / (g.dims[0] * g.dims[1] * cell * cell);
  g.values.assign(g.cell_count(), v);
  rho.density = g;
  return rho;
}

/// Density on [0.1,0.9]×[0.5−w,0.5+w] with profile 1 + amp·exp(−((x−0.5)/0.1)²).
inline SourceMeasure bump_strip(double w, double cell, double amp) {
  SourceMeasure rho;
  rho.dim = 2;
  DensityGrid g;
  g.cell = cell;
  const double x0 = 0.1, x1 = 0.9;
  const int nx = static_cast<int>(std::lround((x1 - x0) / cell));
  const int ny = static_cast<int>(std::lround(2 * w / cell));
  g.origin = Point(x0, 0.5 - w);
  g.dims = {nx, ny, 1};
  double total = 0.0;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double x = x0 + (ix + 0.5) * cell;
      const double v = 1.0 + amp * std::exp(-std::pow((x - 0.5) / 0.1, 2));
      g.values.push_back(v);
      total += v;
    }
  for (auto& v : g.values) v /= total * cell * cell;
  rho.density = g;
  return rho;
}

inline Atoms random_atoms(std::mt19937_64& rng, int n, int dim = 2, double lo = 0.0, double hi = 1.0) {
  Atoms a;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    Point x(uniform(rng, lo, hi), uniform(rng, lo, hi), dim == 3 ? uniform(rng, lo, hi) : 0.0);
    const double w = uniform(rng, 0.1, 1.0);
    a.push_back({x, w});
    total += w;
  }
  for (auto& at : a) at.w /= total;
  return a;
}

/// Random connected network: a random tree on `n` points plus `extra` chords.
inline Network random_connected_network(std::mt19937_64& rng, int n, int extra, int dim = 2) {
  Network net;
  net.dim = dim;
  for (int k = 0; k < n; ++k)
    net.add_vertex(Point(uniform(rng), uniform(rng), dim == 3 ? uniform(rng) : 0.0));
  for (int k = 1; k < n; ++k) net.add_edge(static_cast<int>(rng() % static_cast<std::uint64_t>(k)), k);
  for (int t = 0, tries = 0; t < extra && tries < 100; ++tries) {
    const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    const int b = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    if (a == b) continue;
    bool dup = false;
    for (const auto& e : net.edges) dup = dup || (e.a == a && e.b == b) || (e.a == b && e.b == a);
    if (dup) continue;
    net.add_edge(a, b);
    ++t;
  }
  return net;
}

// ---------------------------------------------------------------------------
// Brute-force optimal transport oracle.
//
// Every vertex of the transportation polytope has a forest support, so it can
// be built by repeatedly choosing a leaf line (row or column) that ships its
// whole residual to one still-active line of the other side. Exploring every
// such elimination sequence visits every vertex; the minimum over them is the
// optimal cost. States (active lines + residuals) are memoised.

class TransportOracle {
public:
  TransportOracle(std::vector<double> supply, std::vector<double> demand, std::vector<std::vector<double>> cost)
      : s_(std::move(supply)), d_(std::move(demand)), c_(std::move(cost)) {}

  double solve() {
    std::vector<double> res = s_;
    res.insert(res.end(), d_.begin(), d_.end());
    const unsigned full = (1u << (s_.size() + d_.size())) - 1u;
    return best(full, res);
  }

private:
  std::vector<double> s_, d_;
  std::vector<std::vector<double>> c_;
  std::map<std::pair<unsigned, std::vector<long long>>, double> memo_;

  static constexpr double kTol = 1e-12;

  double best(unsigned active, std::vector<double>& res) {
    const std::size_t n = s_.size(), m = d_.size();
    bool any_row = false, any_col = false;
    for (std::size_t i = 0; i < n; ++i) any_row = any_row || (active >> i & 1u);
    for (std::size_t j = 0; j < m; ++j) any_col = any_col || (active >> (n + j) & 1u);
    if (!any_row || !any_col) {
      for (std::size_t k = 0; k < n + m; ++k)
        if ((active >> k & 1u) && res[k] > 1e-9) return std::numeric_limits<double>::infinity();
      return 0.0;
    }
    std::vector<long long> key;
    for (std::size_t k = 0; k < n + m; ++k)
      if (active >> k & 1u) key.push_back(std::llround(res[k] * 1e12));
    const auto mk = std::make_pair(active, key);
    if (auto it = memo_.find(mk); it != memo_.end()) return it->second;
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t leaf = 0; leaf < n + m; ++leaf) {
      if (!(active >> leaf & 1u)) continue;
      const bool is_row = leaf < n;
      const std::size_t lo = is_row ? n : 0, hi = is_row ? n + m : n;
      for (std::size_t other = lo; other < hi; ++other) {
        if (!(active >> other & 1u)) continue;
        const double flow = res[leaf];
        if (flow > res[other] + kTol) continue;
        const double cell = is_row ? c_[leaf][other - n] : c_[other][leaf - n];
        const double saved = res[other];
        res[other] = std::max(0.0, saved - flow);
        const double rest = best(active & ~(1u << leaf), res);
        res[other] = saved;
        out = std::min(out, flow * cell + rest);
      }
    }
    memo_[mk] = out;
    return out;
  }
};

inline double oracle_ot_cost(const Atoms& mu, const Atoms& nu, double p) {
  std::vector<double> s, d;
  for (const auto& a : mu) s.push_back(a.w);
  for (const auto& b : nu) d.push_back(b.w);
  std::vector<std::vector<double>> c(mu.size(), std::vector<double>(nu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) c[i][j] = cost_pow(mu[i].x, nu[j].x, p);
  return TransportOracle(s, d, c).solve();
}

}  // namespace wh1::testing
