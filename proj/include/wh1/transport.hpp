#pragma once

// Exact discrete optimal transport between finite atom lists: a
// transportation simplex on the spanning-tree basis with Bland's pivot rule,
// the lower-bounded variant used by the relaxed inner problem, displacement
// interpolation, blow-up pushforwards and arc-length quadrature of networks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "wh1/geometry.hpp"
#include "wh1/measures.hpp"
#include "wh1/point.hpp"

namespace wh1 {

/// Dense row-major cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

inline CostMatrix pairwise_cost(const Atoms& mu, const Atoms& nu, double p) {
  CostMatrix c(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) c(i, j) = cost_pow(mu[i].x, nu[j].x, p);
  return c;
}

struct PlanEntry {
  int i = 0;
  int j = 0;
  double mass = 0.0;
};

struct FlowSolution {
  std::vector<PlanEntry> entries;  // sorted by (i, j), positive mass only
  double cost = 0.0;
  long pivots = 0;
};

namespace detail {

/// Transportation simplex. The basis is a spanning tree of the bipartite
/// row/column graph with exactly rows + cols - 1 cells (degenerate cells
/// carry zero flow). Entering cell: block-search pricing (cells scanned in
/// blocks of ~sqrt(rows·cols) from where the previous scan stopped; the most
/// negative reduced cost of the first block containing one, lowest index on
/// ties). After rows + cols consecutive degenerate pivots the rule switches
/// to Bland's (lowest index with negative reduced cost) until a pivot moves
/// flow, which rules out cycling. Leaving cell: lowest linear index among the
/// minimum-flow cells of the negative half of the cycle.
class TransportationSimplex {
public:
  TransportationSimplex(std::span<const double> supply, std::span<const double> demand, const CostMatrix& cost)
      : n_(supply.size()), m_(demand.size()), cost_(cost), supply_(supply.begin(), supply.end()),
        demand_(demand.begin(), demand.end()) {
    double cmax = 0.0;
    for (double c : cost_.data) cmax = std::max(cmax, std::abs(c));
    tol_ = 1e-12 * std::max(1.0, cmax);
  }

  FlowSolution solve() {
    initial_basis();
    const long max_pivots = 50'000'000;
    long pivots = 0;
    std::vector<double> u(n_), v(m_);
    for (;;) {
      potentials(u, v);
      const long enter = entering(u, v);
      if (enter < 0) break;
      pivot(static_cast<std::size_t>(enter));
      if (++pivots > max_pivots) throw Error("transport simplex did not terminate");
    }
    FlowSolution out;
    out.pivots = pivots;
    std::vector<std::size_t> order(cells_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells_[a].idx < cells_[b].idx; });
    for (std::size_t k : order) {
      const Cell& c = cells_[k];
      if (c.flow <= 0.0) continue;
      const int i = static_cast<int>(c.idx / m_), j = static_cast<int>(c.idx % m_);
      out.entries.push_back({i, j, c.flow});
      out.cost += c.flow * cost_(i, j);
    }
    return out;
  }

private:
  struct Cell {
    std::size_t idx;  // i * m + j
    double flow;
  };

  std::size_t node_of_row(std::size_t i) const { return i; }
  std::size_t node_of_col(std::size_t j) const { return n_ + j; }

  void add_cell(std::size_t idx, double flow) {
    const std::size_t id = cells_.size();
    cells_.push_back({idx, flow});
    basic_[idx] = 1;
    adj_[node_of_row(idx / m_)].push_back(id);
    adj_[node_of_col(idx % m_)].push_back(id);
  }

  // Least-cost greedy fill, completed to a spanning tree with zero cells.
  void initial_basis() {
    const std::size_t nm = n_ * m_;
    basic_.assign(nm, 0);
    adj_.assign(n_ + m_, {});
    cells_.clear();
    std::vector<std::size_t> order(nm);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cost_.data[a] < cost_.data[b]; });
    double scale = 0.0;
    for (double s : supply_) scale += s;
    const double eps = 1e-14 * std::max(1.0, scale);
    std::vector<double> rs = supply_, cs = demand_;
    std::vector<char> row_done(n_, 0), col_done(m_, 0);
    UnionFind uf(n_ + m_);
    for (std::size_t idx : order) {
      const std::size_t i = idx / m_, j = idx % m_;
      if (row_done[i] || col_done[j]) continue;
      const double x = std::min(rs[i], cs[j]);
      add_cell(idx, x);
      uf.unite(node_of_row(i), node_of_col(j));
      if (rs[i] <= cs[j]) {
        cs[j] -= rs[i];
        rs[i] = 0.0;
        row_done[i] = 1;
        if (cs[j] <= eps) col_done[j] = 1;
      } else {
        rs[i] -= cs[j];
        cs[j] = 0.0;
        col_done[j] = 1;
        if (rs[i] <= eps) row_done[i] = 1;
      }
    }
    for (std::size_t idx : order) {
      if (cells_.size() + 1 >= n_ + m_) break;
      const std::size_t i = idx / m_, j = idx % m_;
      if (basic_[idx]) continue;
      if (uf.unite(node_of_row(i), node_of_col(j))) add_cell(idx, 0.0);
    }
  }

  void potentials(std::vector<double>& u, std::vector<double>& v) {
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t id : adj_[node]) {
        const std::size_t i = cells_[id].idx / m_, j = cells_[id].idx % m_;
        const double c = cost_.data[cells_[id].idx];
        if (node < n_) {
          const std::size_t other = node_of_col(j);
          if (seen[other]) continue;
          seen[other] = 1;
          v[j] = c - u[i];
          stack.push_back(other);
        } else {
          const std::size_t other = node_of_row(i);
          if (seen[other]) continue;
          seen[other] = 1;
          u[i] = c - v[j];
          stack.push_back(other);
        }
      }
    }
  }

  long entering(const std::vector<double>& u, const std::vector<double>& v) {
    if (bland_) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double ui = u[i];
        const std::size_t base = i * m_;
        for (std::size_t j = 0; j < m_; ++j) {
          if (basic_[base + j]) continue;
          if (cost_.data[base + j] - ui - v[j] < -tol_) return static_cast<long>(base + j);
        }
      }
      return -1;
    }
    const std::size_t total = n_ * m_;
    const std::size_t block = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(static_cast<double>(total))));
    long best = -1;
    double best_rc = -tol_;
    std::size_t idx = next_, i = idx / m_, j = idx % m_, in_block = 0;
    for (std::size_t scanned = 0; scanned < total; ++scanned) {
      if (!basic_[idx]) {
        const double rc = cost_.data[idx] - u[i] - v[j];
        if (rc < best_rc || (rc == best_rc && best >= 0 && static_cast<long>(idx) < best)) {
          best_rc = rc;
          best = static_cast<long>(idx);
        }
      }
      if (++idx == total) idx = 0;
      if (++j == m_) {
        j = 0;
        if (++i == n_) i = 0;
      }
      if (++in_block == block) {
        if (best >= 0) break;
        in_block = 0;
      }
    }
    next_ = idx;
    return best;
  }

  void pivot(std::size_t enter) {
    const std::size_t ei = enter / m_, ej = enter % m_;
    // Tree path from row ei to column ej.
    std::vector<long> via(n_ + m_, -1);
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> stack{node_of_row(ei)};
    seen[node_of_row(ei)] = 1;
    const std::size_t target = node_of_col(ej);
    while (!stack.empty() && !seen[target]) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t id : adj_[node]) {
        const std::size_t other = node < n_ ? node_of_col(cells_[id].idx % m_) : node_of_row(cells_[id].idx / m_);
        if (seen[other]) continue;
        seen[other] = 1;
        via[other] = static_cast<long>(id);
        stack.push_back(other);
      }
    }
    // Walk back from the column: cells alternate -, +, -, ... ending with -
    // at the row end.
    std::vector<std::size_t> minus, plus;
    std::size_t node = target;
    bool sign_minus = true;
    while (node != node_of_row(ei)) {
      const std::size_t id = static_cast<std::size_t>(via[node]);
      (sign_minus ? minus : plus).push_back(id);
      sign_minus = !sign_minus;
      node = node < n_ ? node_of_col(cells_[id].idx % m_) : node_of_row(cells_[id].idx / m_);
    }
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t id : minus) theta = std::min(theta, cells_[id].flow);
    std::size_t leave = minus.front();
    for (std::size_t id : minus)
      if (cells_[id].flow <= theta && (cells_[leave].flow > theta || cells_[id].idx < cells_[leave].idx)) leave = id;
    if (theta > 0.0) {
      degenerate_run_ = 0;
      bland_ = false;
    } else if (++degenerate_run_ > n_ + m_) {
      bland_ = true;
    }
    for (std::size_t id : minus) cells_[id].flow = std::max(0.0, cells_[id].flow - theta);
    for (std::size_t id : plus) cells_[id].flow += theta;

    // Replace the leaving cell by the entering one in place.
    const std::size_t old_idx = cells_[leave].idx;
    auto detach = [&](std::size_t nd) {
      auto& lst = adj_[nd];
      lst.erase(std::find(lst.begin(), lst.end(), leave));
    };
    detach(node_of_row(old_idx / m_));
    detach(node_of_col(old_idx % m_));
    basic_[old_idx] = 0;
    cells_[leave] = {enter, theta};
    basic_[enter] = 1;
    adj_[node_of_row(ei)].push_back(leave);
    adj_[node_of_col(ej)].push_back(leave);
  }

  std::size_t n_, m_;
  const CostMatrix& cost_;
  std::vector<double> supply_, demand_;
  double tol_ = 1e-12;
  std::vector<Cell> cells_;
  std::vector<char> basic_;
  std::vector<std::vector<std::size_t>> adj_;
  std::size_t next_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
};

}  // namespace detail

/// Solves min Σ c_ij x_ij over x ≥ 0 with row sums `supply` and column sums
/// `demand` (totals assumed equal up to round-off).
inline FlowSolution solve_transportation(std::span<const double> supply, std::span<const double> demand,
                                         const CostMatrix& cost) {
  if (supply.empty() || demand.empty()) throw Error("empty marginal");
  if (cost.rows != supply.size() || cost.cols != demand.size()) throw Error("cost matrix shape mismatch");
  return detail::TransportationSimplex(supply, demand, cost).solve();
}

// ---------------------------------------------------------------------------

struct TransportPlan {
  Atoms source;
  Atoms target;
  std::vector<PlanEntry> entries;
  double p = 2.0;
  double cost = 0.0;
};

inline std::vector<double> row_sums(const TransportPlan& plan) {
  std::vector<double> s(plan.source.size(), 0.0);
  for (const auto& e : plan.entries) s[e.i] += e.mass;
  return s;
}

inline std::vector<double> column_sums(const TransportPlan& plan) {
  std::vector<double> s(plan.target.size(), 0.0);
  for (const auto& e : plan.entries) s[e.j] += e.mass;
  return s;
}

namespace detail {
inline std::vector<double> weights(const Atoms& a) {
  std::vector<double> w(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) w[k] = a[k].w;
  return w;
}
}  // namespace detail

/// Optimal plan for cost |x - y|^p between two balanced atom lists.
inline TransportPlan solve_ot(const Atoms& mu, const Atoms& nu, double p) {
  if (mu.empty() || nu.empty()) throw Error("empty marginal");
  if (!(p >= 1.0)) throw Error("exponent p must be >= 1");
  if (std::abs(total_mass(mu) - total_mass(nu)) > kMassTol) throw Error("unbalanced marginals");
  const auto sol = solve_transportation(detail::weights(mu), detail::weights(nu), pairwise_cost(mu, nu, p));
  return {mu, nu, sol.entries, p, sol.cost};
}

/// Optimal plan with exact source marginal and target column sums at least
/// `lower`; the surplus Σμ - Σlower lands wherever it is cheapest. The
/// returned plan's target weights are the realised column sums.
inline TransportPlan solve_ot_lower_bounded(const Atoms& mu, const Atoms& targets, const std::vector<double>& lower,
                                            double p) {
  if (mu.empty() || targets.empty()) throw Error("empty marginal");
  if (lower.size() != targets.size()) throw Error("lower bound size mismatch");
  if (!(p >= 1.0)) throw Error("exponent p must be >= 1");
  double lsum = 0.0;
  for (double l : lower) {
    if (!(l >= 0.0)) throw Error("lower bounds must be nonnegative");
    lsum += l;
  }
  const double msum = total_mass(mu);
  if (lsum > msum + kMassTol) throw Error("insufficient mass");

  const std::size_t n = mu.size(), m = targets.size();
  const double surplus = msum - lsum;
  const bool with_surplus = surplus > 1e-15 * std::max(1.0, msum);
  CostMatrix cost(n, m + (with_surplus ? 1 : 0));
  std::vector<int> cheapest(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double c = cost_pow(mu[i].x, targets[j].x, p);
      cost(i, j) = c;
      if (c < best) {
        best = c;
        cheapest[i] = static_cast<int>(j);
      }
    }
    if (with_surplus) cost(i, m) = best;
  }
  std::vector<double> demand = lower;
  if (with_surplus) demand.push_back(surplus);
  const auto sol = solve_transportation(detail::weights(mu), demand, cost);

  // Fold the surplus column back onto the cheapest real target of each row.
  std::vector<PlanEntry> merged;
  for (const auto& e : sol.entries) {
    PlanEntry f = e;
    if (static_cast<std::size_t>(e.j) == m) f.j = cheapest[e.i];
    merged.push_back(f);
  }
  std::sort(merged.begin(), merged.end(), [](const PlanEntry& a, const PlanEntry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  std::vector<PlanEntry> entries;
  for (const auto& e : merged) {
    if (!entries.empty() && entries.back().i == e.i && entries.back().j == e.j) entries.back().mass += e.mass;
    else entries.push_back(e);
  }
  TransportPlan plan{mu, targets, std::move(entries), p, sol.cost};
  const auto cols = column_sums(plan);
  for (std::size_t j = 0; j < m; ++j) plan.target[j].w = cols[j];
  return plan;
}

/// Pushforward of the plan under (x, y) -> s x + (1 - s) y; s = 1 gives the
/// source marginal and s = 0 the target marginal. Atoms landing on the same
/// point are merged, in order of first appearance.
inline Atoms interpolate(const TransportPlan& plan, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error("interpolation parameter outside [0,1]");
  Atoms out;
  for (const auto& e : plan.entries) {
    const Point x = s * plan.source[e.i].x + (1.0 - s) * plan.target[e.j].x;
    auto it = std::find_if(out.begin(), out.end(), [&](const Atom& a) { return a.x == x; });
    if (it != out.end()) it->w += e.mass;
    else out.push_back({x, e.mass});
  }
  return out;
}

/// (1/r) (Φ^{y0,r})_♯ with Φ^{y0,r}(x) = (x - y0) / r.
inline Atoms blowup_pushforward(const Atoms& atoms, const Point& y0, double r) {
  if (!(r > 0.0)) throw Error("blow-up radius must be positive");
  Atoms out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back({(a.x - y0) / r, a.w / r});
  return out;
}

// ---------------------------------------------------------------------------
// Arc-length quadrature

struct QuadratureNode {
  Point x;
  double share = 0.0;  // arc length h_j carried by the node
  int edge = -1;
  double t = 0.0;
};

using QuadratureNodes = std::vector<QuadratureNode>;

/// Each edge split into ceil(len / h) equal pieces, one node per piece
/// midpoint carrying the piece length.
inline QuadratureNodes discretize_network(const Network& net, double h) {
  if (!(h > 0.0)) throw Error("quadrature spacing must be positive");
  QuadratureNodes out;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const double len = net.edge_length(e);
    const int k = std::max(1, static_cast<int>(std::ceil(len / h - 1e-12)));
    for (int q = 0; q < k; ++q) {
      const double t = (q + 0.5) / k;
      out.push_back({net.point_on_edge(e, t), len / k, static_cast<int>(e), t});
    }
  }
  return out;
}

}  // namespace wh1
