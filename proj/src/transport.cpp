#include "canneal/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace canneal {

double AnnealWeights::ess() const {
  double s = 0.0;
  for (double wi : w) s += wi * wi;
  return s > 0.0 ? 1.0 / s : 0.0;
}

AnnealWeights anneal_weights(std::span<const double> energies, double delta_beta) {
  if (energies.empty()) {
    throw std::invalid_argument("anneal_weights: empty energy vector");
  }
  if (delta_beta < 0.0) {
    throw std::invalid_argument(
        "anneal_weights: delta_beta < 0 (decreasing schedule?)");
  }
  double max_log = -std::numeric_limits<double>::infinity();
  for (double e : energies) max_log = std::max(max_log, -e * delta_beta);
  AnnealWeights out;
  out.w.resize(energies.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    out.w[i] = std::exp(-energies[i] * delta_beta - max_log);
    sum += out.w[i];
  }
  for (double& wi : out.w) wi /= sum;
  return out;
}

Matrix cost_matrix(const Matrix& positions) {
  const std::size_t n = positions.rows();
  const std::size_t d = positions.cols();
  Matrix c(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = positions(i, k) - positions(j, k);
        s += diff * diff;
      }
      c(i, j) = s;
      c(j, i) = s;
    }
  }
  return c;
}

TransportPlan::TransportPlan(int n, std::vector<Entry> entries, double cost)
    : n_(n), entries_(std::move(entries)), cost_(cost) {}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> s(n_, 0.0);
  for (const auto& e : entries_) s[e.row] += e.value;
  return s;
}

std::vector<double> TransportPlan::col_sums() const {
  std::vector<double> s(n_, 0.0);
  for (const auto& e : entries_) s[e.col] += e.value;
  return s;
}

Matrix TransportPlan::dense() const {
  Matrix g(n_, n_, 0.0);
  for (const auto& e : entries_) g(e.row, e.col) += e.value;
  return g;
}

Matrix TransportPlan::barycentric_targets(const Matrix& positions) const {
  if (positions.rows() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("barycentric_targets: plan/position size mismatch");
  }
  const std::size_t d = positions.cols();
  Matrix t(positions.rows(), d, 0.0);
  for (const auto& e : entries_) {
    for (std::size_t k = 0; k < d; ++k) t(e.row, k) += e.value * positions(e.col, k);
  }
  return t;
}

namespace {

struct Cell {
  int i;
  int j;
  double value;
};

// Transportation simplex on an m x m tableau with unit row supplies and
// column demands n * w_j. The basis is maintained as a spanning tree of the
// bipartite row/column graph with exactly 2m - 1 cells.
class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost, std::vector<double> demand)
      : n_(static_cast<int>(cost.rows())), cost_(cost), demand_(std::move(demand)) {}

  std::vector<Cell> solve() {
    northwest_corner();
    const double eps = 1e-12 * std::max(1.0, max_cost());
    // Bland's rule terminates without cycling; the iteration bound is a
    // safety net against numerical pathologies only.
    const long max_iters = 2000L * (static_cast<long>(n_) + 1) * (n_ + 1);
    for (long iter = 0; iter < max_iters; ++iter) {
      compute_duals();
      int ei, ej;
      if (!find_entering(eps, ei, ej)) return basis_;
      pivot(ei, ej);
    }
    throw TransportError("solve_transport_lp: iteration budget exhausted");
  }

 private:
  double max_cost() const {
    double m = 0.0;
    for (double v : cost_.data()) m = std::max(m, std::abs(v));
    return m;
  }

  void northwest_corner() {
    std::vector<double> supply(n_, 1.0);
    std::vector<double> demand = demand_;
    basis_.clear();
    basis_.reserve(2 * n_ - 1);
    int i = 0, j = 0;
    while (true) {
      const double a = std::min(supply[i], demand[j]);
      basis_.push_back({i, j, a});
      supply[i] -= a;
      demand[j] -= a;
      if (i == n_ - 1 && j == n_ - 1) break;
      if (j == n_ - 1) {
        ++i;
      } else if (i == n_ - 1) {
        ++j;
      } else if (supply[i] <= demand[j]) {
        supply[i] = 0.0;
        ++i;
      } else {
        demand[j] = 0.0;
        ++j;
      }
    }
    rebuild_adjacency();
  }

  void rebuild_adjacency() {
    row_cells_.assign(n_, {});
    col_cells_.assign(n_, {});
    for (int b = 0; b < static_cast<int>(basis_.size()); ++b) {
      row_cells_[basis_[b].i].push_back(b);
      col_cells_[basis_[b].j].push_back(b);
    }
  }

  void compute_duals() {
    u_.assign(n_, 0.0);
    v_.assign(n_, 0.0);
    std::vector<char> row_done(n_, 0), col_done(n_, 0);
    std::vector<int> stack;
    stack.reserve(2 * n_);
    row_done[0] = 1;
    stack.push_back(0);  // encoded: rows as r, cols as n_ + c
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node < n_) {
        for (int b : row_cells_[node]) {
          const Cell& c = basis_[b];
          if (!col_done[c.j]) {
            v_[c.j] = cost_(c.i, c.j) - u_[c.i];
            col_done[c.j] = 1;
            stack.push_back(n_ + c.j);
          }
        }
      } else {
        const int col = node - n_;
        for (int b : col_cells_[col]) {
          const Cell& c = basis_[b];
          if (!row_done[c.i]) {
            u_[c.i] = cost_(c.i, c.j) - v_[c.j];
            row_done[c.i] = 1;
            stack.push_back(c.i);
          }
        }
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (!row_done[i] || !col_done[i]) {
        throw TransportError("solve_transport_lp: basis tree is disconnected");
      }
    }
  }

  // Bland: first cell in row-major order with negative reduced cost.
  bool find_entering(double eps, int& ei, int& ej) const {
    for (int i = 0; i < n_; ++i) {
      const double ui = u_[i];
      for (int j = 0; j < n_; ++j) {
        if (cost_(i, j) - ui - v_[j] < -eps) {
          ei = i;
          ej = j;
          return true;
        }
      }
    }
    return false;
  }

  // Unique basis-tree path from row `ei` to column `ej`; adding the entering
  // cell closes the cycle. Returns basic-cell indices along the path.
  std::vector<int> tree_path(int ei, int ej) const {
    const int nodes = 2 * n_;
    std::vector<int> parent_edge(nodes, -1);
    std::vector<char> seen(nodes, 0);
    std::vector<int> queue;
    queue.push_back(ei);
    seen[ei] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int node = queue[q];
      if (node == n_ + ej) break;
      const auto& cells = node < n_ ? row_cells_[node] : col_cells_[node - n_];
      for (int b : cells) {
        const Cell& c = basis_[b];
        const int next = node < n_ ? n_ + c.j : c.i;
        if (!seen[next]) {
          seen[next] = 1;
          parent_edge[next] = b;
          queue.push_back(next);
        }
      }
    }
    if (!seen[n_ + ej]) {
      throw TransportError("solve_transport_lp: no cycle path found");
    }
    std::vector<int> path;
    int node = n_ + ej;
    while (node != ei) {
      const int b = parent_edge[node];
      path.push_back(b);
      const Cell& c = basis_[b];
      node = (node == n_ + c.j) ? c.i : n_ + c.j;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  void pivot(int ei, int ej) {
    const std::vector<int> path = tree_path(ei, ej);
    // Walking the path from the entering row, edges alternate donor (-theta)
    // and receiver (+theta), starting with a donor.
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = basis_[path[k]];
      const bool better =
          c.value < theta - 1e-15 ||
          (std::abs(c.value - theta) <= 1e-15 && leaving >= 0 &&
           (c.i < basis_[leaving].i ||
            (c.i == basis_[leaving].i && c.j < basis_[leaving].j)));
      if (leaving < 0 || better) {
        theta = c.value;
        leaving = path[k];
      }
    }
    theta = std::max(theta, 0.0);
    for (std::size_t k = 0; k < path.size(); ++k) {
      basis_[path[k]].value += (k % 2 == 0) ? -theta : theta;
    }
    basis_[leaving] = {ei, ej, theta};
    rebuild_adjacency();
  }

  int n_;
  const Matrix& cost_;
  std::vector<double> demand_;
  std::vector<Cell> basis_;
  std::vector<std::vector<int>> row_cells_;
  std::vector<std::vector<int>> col_cells_;
  std::vector<double> u_, v_;
};

}  // namespace

TransportPlan solve_transport_lp(const Matrix& cost, const AnnealWeights& weights,
                                 std::span<const int> order_hint) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != static_cast<std::size_t>(n) || n < 1) {
    throw std::invalid_argument("solve_transport_lp: cost matrix must be square");
  }
  if (weights.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("solve_transport_lp: weight/cost size mismatch");
  }
  for (double v : cost.data()) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("solve_transport_lp: non-finite cost entry");
    }
  }
  if (!order_hint.empty() && order_hint.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("solve_transport_lp: bad order hint length");
  }

  std::vector<int> perm(n);
  if (order_hint.empty()) {
    std::iota(perm.begin(), perm.end(), 0);
  } else {
    perm.assign(order_hint.begin(), order_hint.end());
  }

  // Demands n * w_j in permuted order, with the rounding residual folded
  // into the largest demand so supplies and demands balance exactly.
  std::vector<double> demand(n);
  double total = 0.0;
  int jmax = 0;
  for (int j = 0; j < n; ++j) {
    demand[j] = static_cast<double>(n) * weights[perm[j]];
    if (demand[j] < 0.0) {
      throw std::invalid_argument("solve_transport_lp: negative weight");
    }
    total += demand[j];
    if (demand[j] > demand[jmax]) jmax = j;
  }
  demand[jmax] += static_cast<double>(n) - total;

  Matrix pcost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) pcost(i, j) = cost(perm[i], perm[j]);
  }

  TransportSimplex simplex(pcost, std::move(demand));
  const std::vector<Cell> basis = simplex.solve();

  std::vector<TransportPlan::Entry> entries;
  entries.reserve(basis.size());
  double plan_cost = 0.0;
  for (const Cell& c : basis) {
    const int i = perm[c.i];
    const int j = perm[c.j];
    if (c.value != 0.0) plan_cost += cost(i, j) * c.value;
    entries.push_back({i, j, c.value});
  }
  TransportPlan plan(n, std::move(entries), plan_cost);

  // Feasibility verification; a failure here is a solver bug, not bad input.
  const auto rs = plan.row_sums();
  const auto cs = plan.col_sums();
  for (int i = 0; i < n; ++i) {
    if (std::abs(rs[i] - 1.0) > 1e-9 ||
        std::abs(cs[i] - n * weights[i]) > 1e-9) {
      throw TransportError("solve_transport_lp: marginal mismatch after solve");
    }
  }
  for (const auto& e : plan.entries()) {
    if (e.value < -1e-12) {
      throw TransportError("solve_transport_lp: negative plan entry");
    }
  }
  return plan;
}

Matrix barycentric_velocity(const TransportPlan& plan, const Matrix& positions,
                            double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("barycentric_velocity: h must be > 0");
  }
  Matrix v = plan.barycentric_targets(positions);
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t k = 0; k < v.cols(); ++k) {
      v(i, k) = (v(i, k) - positions(i, k)) / h;
    }
  }
  return v;
}

std::vector<double> pushforward_moments(const TransportPlan& plan,
                                        const Matrix& positions,
                                        std::span<const int> orders) {
  const Matrix targets = plan.barycentric_targets(positions);
  const std::size_t n = targets.rows();
  std::vector<double> out;
  out.reserve(orders.size());
  for (int r : orders) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double norm2 = 0.0;
      for (std::size_t k = 0; k < targets.cols(); ++k) {
        norm2 += targets(i, k) * targets(i, k);
      }
      s += std::pow(std::sqrt(norm2), r);
    }
    out.push_back(s / static_cast<double>(n));
  }
  return out;
}

double empirical_quantile(std::span<const double> sorted, double u) {
  if (sorted.empty()) {
    throw std::invalid_argument("empirical_quantile: empty sample");
  }
  const auto n = static_cast<long>(sorted.size());
  long idx = static_cast<long>(std::ceil(u * static_cast<double>(n)));
  idx = std::clamp(idx, 1L, n);
  return sorted[static_cast<std::size_t>(idx - 1)];
}

double w2_empirical_1d(std::span<const double> sorted_samples,
                       const std::function<double(double)>& quantile, int k) {
  if (sorted_samples.empty()) {
    throw std::invalid_argument("w2_empirical_1d: empty sample");
  }
  if (k < 1) throw std::invalid_argument("w2_empirical_1d: k must be >= 1");
  double s = 0.0;
  for (int j = 1; j <= k; ++j) {
    const double u = (j - 0.5) / k;
    const double diff = empirical_quantile(sorted_samples, u) - quantile(u);
    s += diff * diff;
  }
  return std::sqrt(s / k);
}

}  // namespace canneal
