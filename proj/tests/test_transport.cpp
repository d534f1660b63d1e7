#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "canneal/rng.hpp"
#include "canneal/transport.hpp"

using namespace canneal;

namespace {

// Brute-force transportation oracle: enumerate all candidate bases (cell
// subsets of size 2n - 1 forming a spanning tree of the bipartite graph),
// solve each by leaf elimination, and keep the best feasible cost.
struct VertexOracle {
  int n;
  const Matrix& cost;
  std::vector<double> demand;
  double best = std::numeric_limits<double>::infinity();

  void consider(const std::vector<int>& cells) {
    const int nodes = 2 * n;
    std::vector<int> degree(nodes, 0);
    for (int c : cells) {
      ++degree[c / n];
      ++degree[n + c % n];
    }
    for (int v = 0; v < nodes; ++v) {
      if (degree[v] == 0) return;  // not spanning
    }
    std::vector<double> residual(nodes);
    for (int i = 0; i < n; ++i) residual[i] = 1.0;
    for (int j = 0; j < n; ++j) residual[n + j] = demand[j];
    std::vector<char> used(cells.size(), 0);
    std::vector<double> value(cells.size(), 0.0);
    // Peel leaves; a tree resolves fully, a cyclic subset stalls.
    for (std::size_t step = 0; step < cells.size(); ++step) {
      int pick = -1;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (used[c]) continue;
        const int i = cells[c] / n;
        const int j = cells[c] % n;
        if (degree[i] == 1 || degree[n + j] == 1) {
          pick = static_cast<int>(c);
          break;
        }
      }
      if (pick < 0) return;  // contains a cycle
      const int i = cells[pick] / n;
      const int j = cells[pick] % n;
      const double v = degree[i] == 1 ? residual[i] : residual[n + j];
      value[pick] = v;
      residual[i] -= v;
      residual[n + j] -= v;
      --degree[i];
      --degree[n + j];
      used[pick] = 1;
    }
    double total = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (value[c] < -1e-12) return;  // infeasible vertex
      total += cost(cells[c] / n, cells[c] % n) * value[c];
    }
    best = std::min(best, total);
  }

  void enumerate(std::vector<int>& cells, int next) {
    if (static_cast<int>(cells.size()) == 2 * n - 1) {
      consider(cells);
      return;
    }
    const int remaining = 2 * n - 1 - static_cast<int>(cells.size());
    for (int c = next; c <= n * n - remaining; ++c) {
      cells.push_back(c);
      enumerate(cells, c + 1);
      cells.pop_back();
    }
  }

  double solve() {
    std::vector<int> cells;
    enumerate(cells, 0);
    return best;
  }
};

double oracle_optimum(const Matrix& cost, const AnnealWeights& w) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> demand(n);
  for (int j = 0; j < n; ++j) demand[j] = n * w[j];
  VertexOracle oracle{n, cost, demand};
  return oracle.solve();
}

Matrix random_positions(StreamRng& rng, int n, int d, double lo, double hi) {
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) x(i, k) = lo + (hi - lo) * rng.uniform();
  }
  return x;
}

}  // namespace

TEST_SUITE_BEGIN("transport");

TEST_CASE("anneal weights: uniform, hand values, shift invariance") {
  const std::vector<double> e0 = {3.0, 1.0, 4.0};
  const AnnealWeights uniform = anneal_weights(e0, 0.0);
  for (double w : uniform.w) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const std::vector<double> e1 = {0.0, std::log(2.0)};
  const AnnealWeights w1 = anneal_weights(e1, 1.0);
  CHECK(w1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(w1[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const std::vector<double> shifted = {100.0, 100.0 + std::log(2.0)};
  const AnnealWeights w2 = anneal_weights(shifted, 1.0);
  CHECK(w2[0] == doctest::Approx(w1[0]).epsilon(1e-14));
  CHECK(w2[1] == doctest::Approx(w1[1]).epsilon(1e-14));

  CHECK_THROWS_AS(anneal_weights(std::vector<double>{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(anneal_weights(e1, -0.5), std::invalid_argument);
}

TEST_CASE("anneal weights survive huge energy spreads") {
  const std::vector<double> energies = {0.0, 1e6, 2e6, 5.0};
  const AnnealWeights w = anneal_weights(energies, 1.0);
  double sum = 0.0;
  for (double wi : w.w) {
    CHECK(std::isfinite(wi));
    CHECK(wi >= 0.0);
    sum += wi;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.ess() >= 1.0);
}

TEST_CASE("cost matrix basics") {
  Matrix p1(2, 1);
  p1(0, 0) = 0.0;
  p1(1, 0) = 1.0;
  const Matrix c1 = cost_matrix(p1);
  CHECK(c1(0, 0) == 0.0);
  CHECK(c1(0, 1) == doctest::Approx(1.0));
  CHECK(c1(1, 0) == doctest::Approx(1.0));

  Matrix p2(2, 2);
  p2(0, 0) = 0.0;
  p2(0, 1) = 0.0;
  p2(1, 0) = 3.0;
  p2(1, 1) = 4.0;
  CHECK(cost_matrix(p2)(0, 1) == doctest::Approx(25.0));

  StreamRng rng(5, 1);
  const Matrix p = random_positions(rng, 6, 3, -2.0, 2.0);
  const Matrix c = cost_matrix(p);
  for (int i = 0; i < 6; ++i) {
    CHECK(c(i, i) == 0.0);
    for (int j = 0; j < 6; ++j) CHECK(c(i, j) == doctest::Approx(c(j, i)));
  }
}

TEST_CASE("uniform weights make the identity plan optimal") {
  StreamRng rng(9, 2);
  const Matrix p = random_positions(rng, 5, 2, 0.0, 1.0);
  const AnnealWeights w = anneal_weights(std::vector<double>(5, 1.0), 0.0);
  const TransportPlan plan = solve_transport_lp(cost_matrix(p), w);
  CHECK(plan.cost() == doctest::Approx(0.0).epsilon(1e-12));
  const Matrix g = plan.dense();
  for (int i = 0; i < 5; ++i) CHECK(g(i, i) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("two-point degenerate plan") {
  Matrix p(2, 1);
  p(0, 0) = 0.0;
  p(1, 0) = 1.0;
  AnnealWeights w;
  w.w = {1.0, 0.0};
  const TransportPlan plan = solve_transport_lp(cost_matrix(p), w);
  CHECK(plan.cost() == doctest::Approx(1.0).epsilon(1e-12));
  const Matrix g = plan.dense();
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 0) == doctest::Approx(1.0));
  CHECK(g(0, 1) == doctest::Approx(0.0));
  CHECK(g(1, 1) == doctest::Approx(0.0));

  const Matrix v = barycentric_velocity(plan, p, 0.1);
  CHECK(v(0, 0) == doctest::Approx(0.0));
  CHECK(v(1, 0) == doctest::Approx(-10.0).epsilon(1e-12));
  CHECK_THROWS_AS(barycentric_velocity(plan, p, 0.0), std::invalid_argument);

  const std::vector<int> orders = {1, 2};
  const auto moments = pushforward_moments(plan, p, orders);
  CHECK(moments[0] == doctest::Approx(0.0));
  CHECK(moments[1] == doctest::Approx(0.0));
}

TEST_CASE("solver matches the vertex-enumeration oracle on random instances") {
  StreamRng rng(20240607, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(3));
    const Matrix p = random_positions(rng, n, 2, 0.0, 1.0);
    std::vector<double> energies(n);
    for (auto& e : energies) e = 3.0 * rng.uniform();
    const double delta_beta = trial % 5 == 0 ? 0.0 : 2.0 * rng.uniform();
    const AnnealWeights w = anneal_weights(energies, delta_beta);
    const Matrix c = cost_matrix(p);

    const TransportPlan plan = solve_transport_lp(c, w);
    const double oracle = oracle_optimum(c, w);
    CHECK(std::abs(plan.cost() - oracle) <= 1e-9 + 1e-9 * std::abs(oracle));

    const auto rs = plan.row_sums();
    const auto cs = plan.col_sums();
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(rs[i] - 1.0) <= 1e-9);
      CHECK(std::abs(cs[i] - n * w[i]) <= 1e-9);
    }
    for (const auto& e : plan.entries()) CHECK(e.value >= -1e-12);
  }
}

TEST_CASE("order hint changes the route, not the optimum") {
  StreamRng rng(77, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6;
    const Matrix p = random_positions(rng, n, 1, -2.0, 2.0);
    std::vector<double> energies(n);
    for (int i = 0; i < n; ++i) energies[i] = 0.5 * p(i, 0) * p(i, 0);
    const AnnealWeights w = anneal_weights(energies, 1.3);
    const Matrix c = cost_matrix(p);

    std::vector<int> hint(n);
    std::iota(hint.begin(), hint.end(), 0);
    std::sort(hint.begin(), hint.end(), [&](int a, int b) { return p(a, 0) < p(b, 0); });

    const double plain = solve_transport_lp(c, w).cost();
    const double hinted = solve_transport_lp(c, w, hint).cost();
    CHECK(plain == doctest::Approx(hinted).epsilon(1e-10));
  }
}

TEST_CASE("weight collapse keeps the solver feasible") {
  StreamRng rng(13, 6);
  const int n = 6;
  const Matrix p = random_positions(rng, n, 1, -1.0, 1.0);
  std::vector<double> energies(n, 0.0);
  energies[3] = -1.0;  // dominates after a large delta_beta
  const AnnealWeights w = anneal_weights(energies, 50.0);
  CHECK(*std::max_element(w.w.begin(), w.w.end()) > 1.0 - 1e-9);
  CHECK(w.ess() == doctest::Approx(1.0).epsilon(1e-6));
  const TransportPlan plan = solve_transport_lp(cost_matrix(p), w);
  const auto cs = plan.col_sums();
  CHECK(cs[3] == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
}

TEST_CASE("barycentric targets stay in the convex hull") {
  StreamRng rng(21, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5;
    const Matrix p = random_positions(rng, n, 1, -3.0, 3.0);
    std::vector<double> energies(n);
    for (int i = 0; i < n; ++i) energies[i] = std::abs(p(i, 0));
    const AnnealWeights w = anneal_weights(energies, rng.uniform());
    const TransportPlan plan = solve_transport_lp(cost_matrix(p), w);
    const Matrix targets = plan.barycentric_targets(p);
    double lo = p(0, 0), hi = p(0, 0);
    for (int i = 0; i < n; ++i) {
      lo = std::min(lo, p(i, 0));
      hi = std::max(hi, p(i, 0));
    }
    for (int i = 0; i < n; ++i) {
      CHECK(targets(i, 0) >= lo - 1e-9);
      CHECK(targets(i, 0) <= hi + 1e-9);
    }
  }
}

TEST_CASE("pushforward moments: identity plan and Jensen bound") {
  StreamRng rng(31, 9);
  const int n = 5;
  const Matrix p = random_positions(rng, n, 1, -2.0, 2.0);
  const AnnealWeights uniform = anneal_weights(std::vector<double>(n, 1.0), 0.0);
  const TransportPlan identity = solve_transport_lp(cost_matrix(p), uniform);
  const std::vector<int> orders = {2};
  const auto m_id = pushforward_moments(identity, p, orders);
  double direct = 0.0;
  for (int i = 0; i < n; ++i) direct += p(i, 0) * p(i, 0);
  CHECK(m_id[0] == doctest::Approx(direct / n).epsilon(1e-9));

  std::vector<double> energies(n);
  for (int i = 0; i < n; ++i) energies[i] = 0.5 * p(i, 0) * p(i, 0);
  const AnnealWeights w = anneal_weights(energies, 1.0);
  const TransportPlan plan = solve_transport_lp(cost_matrix(p), w);
  const auto m = pushforward_moments(plan, p, orders);
  double bound = 0.0;
  for (int i = 0; i < n; ++i) bound += w[i] * p(i, 0) * p(i, 0);
  CHECK(m[0] <= bound + 1e-9);
}

TEST_CASE("empirical W2: singletons, sorted matching, identical sets") {
  const std::vector<double> a = {2.0};
  const std::vector<double> b = {5.0};
  auto qb = [&](double u) { return empirical_quantile(b, u); };
  CHECK(w2_empirical_1d(a, qb, 7) == doctest::Approx(3.0));

  const std::vector<double> c = {0.0, 2.0};
  const std::vector<double> d = {1.0, 3.0};
  auto qd = [&](double u) { return empirical_quantile(d, u); };
  CHECK(w2_empirical_1d(c, qd, 2) == doctest::Approx(1.0));

  auto qc = [&](double u) { return empirical_quantile(c, u); };
  CHECK(w2_empirical_1d(c, qc, 2) == doctest::Approx(0.0));
  CHECK_THROWS_AS(w2_empirical_1d(std::vector<double>{}, qc, 2), std::invalid_argument);
}

TEST_SUITE_END();
