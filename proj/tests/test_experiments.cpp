#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "canneal/experiments.hpp"
#include "canneal/rng.hpp"

using namespace canneal;

namespace {

// Builds a synthetic replicate whose particles at each grid time are exact
// inverse-CDF samples of the reference.
Trajectory exact_sampler_run(const GibbsReference1D& ref, std::span<const double> grid,
                             int n, std::uint64_t seed) {
  Trajectory traj;
  for (double t : grid) {
    Matrix x(n, 1);
    for (int i = 0; i < n; ++i) {
      StreamRng rng(seed, 900, static_cast<std::uint64_t>(i),
                    static_cast<std::uint64_t>(t * 1e6));
      x(i, 0) = ref.sample(t, rng);
    }
    traj.times.push_back(t);
    traj.positions.push_back(std::move(x));
  }
  return traj;
}

GibbsReference1D make_ref(std::vector<double> cache = {}) {
  return GibbsReference1D(builtin_potential("quadratic", 1),
                          builtin_schedule("quadratic", std::vector<double>{0.25, 25.0}),
                          Quad1DConfig{}, std::move(cache));
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("pooled W2 of exact samples sits at the Monte Carlo noise floor") {
  const std::vector<double> grid = {0.1, 0.5, 0.9};
  const GibbsReference1D ref = make_ref(grid);
  const ReferenceQuantiles ref_q(ref, grid, 128);

  std::vector<Trajectory> runs;
  for (int r = 0; r < 4; ++r) runs.push_back(exact_sampler_run(ref, grid, 250, 50 + r));

  // Bootstrap oracle: independent exact pooled draws of the same size.
  std::vector<double> oracle_w2(3, 0.0);
  const int boot = 12;
  for (int b = 0; b < boot; ++b) {
    std::vector<Trajectory> fresh;
    for (int r = 0; r < 4; ++r) {
      fresh.push_back(exact_sampler_run(ref, grid, 250, 9000 + b * 10 + r));
    }
    const auto series = marginal_w2_timeseries(fresh, ref_q, grid);
    for (std::size_t ti = 0; ti < grid.size(); ++ti) oracle_w2[ti] += series[ti].second;
  }
  for (double& v : oracle_w2) v /= boot;

  const auto series = marginal_w2_timeseries(runs, ref_q, grid);
  for (std::size_t ti = 0; ti < grid.size(); ++ti) {
    CHECK(series[ti].second >= 0.0);
    CHECK(series[ti].second <= 3.0 * oracle_w2[ti]);
  }
}

TEST_CASE("identical empirical sets give zero W2") {
  const std::vector<double> grid = {0.5};
  const GibbsReference1D ref = make_ref(grid);
  const int k = 64;
  std::vector<double> atoms(k);
  for (int j = 1; j <= k; ++j) atoms[j - 1] = ref.quantile(0.5, (j - 0.5) / k);
  const ReferenceQuantiles ref_q(ref, grid, k);
  CHECK(ref_q.w2(0, atoms) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("single particle at the median measures the quantile spread") {
  // Even potential: the median is 0 and W2^2 equals the second moment.
  const std::vector<double> grid = {0.0};
  const GibbsReference1D ref(builtin_potential("quadratic", 1),
                             builtin_schedule("linear", std::vector<double>{1.0, 0.0}),
                             Quad1DConfig{}, grid);
  const ReferenceQuantiles ref_q(ref, grid, 4096);
  const std::vector<double> at_median = {0.0};
  // Variance of N(0,1) is 1; the k-grid midpoint rule slightly undershoots.
  CHECK(ref_q.w2(0, at_median) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("time averaged W2 and aggregation") {
  const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  const GibbsReference1D ref = make_ref(grid);
  const ReferenceQuantiles ref_q(ref, grid, 64);
  const Trajectory run = exact_sampler_run(ref, grid, 100, 3);
  const double w2bar = time_averaged_w2(run, ref_q);
  CHECK(w2bar >= 0.0);
  CHECK(w2bar < 0.2);

  const std::vector<double> vals = {0.1, 0.2, 0.3};
  const ConvergenceRow row = aggregate_w2bar(7, 0.02, vals);
  CHECK(row.n == 7);
  CHECK(row.w2bar_mean == doctest::Approx(0.2));
  CHECK(row.replicates == 3);
  CHECK(row.w2bar_se == doctest::Approx(0.1 / std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("best-of-k series: zero at the optimum, union monotonicity") {
  const Potential pot = builtin_potential("double_well", 1);
  // One replicate pinned at the global minimizer: its minimum stays 0.
  double argmin = golden_section_minimize(
      [&](double x) { return pot.value1d(x); }, -3.0, 0.0, 1e-12);

  Trajectory pinned;
  pinned.times = {0.0, 1.0};
  pinned.positions = {Matrix(3, 1, argmin), Matrix(3, 1, argmin)};
  const auto series = best_of_k_timeseries({pinned}, pot);
  for (const auto& [t, v] : series) CHECK(std::abs(v) < 1e-9);

  StreamRng rng(8, 33);
  Trajectory a, b, both;
  a.times = b.times = both.times = {0.0};
  Matrix xa(2, 1), xb(3, 1), xc(5, 1);
  for (int i = 0; i < 2; ++i) xa(i, 0) = rng.normal();
  for (int i = 0; i < 3; ++i) xb(i, 0) = rng.normal();
  for (int i = 0; i < 2; ++i) xc(i, 0) = xa(i, 0);
  for (int i = 0; i < 3; ++i) xc(2 + i, 0) = xb(i, 0);
  a.positions = {xa};
  b.positions = {xb};
  both.positions = {xc};
  const double best_a = best_of_k_timeseries({a}, pot)[0].second;
  const double best_b = best_of_k_timeseries({b}, pot)[0].second;
  const double best_both = best_of_k_timeseries({both}, pot)[0].second;
  CHECK(best_both <= std::min(best_a, best_b) + 1e-12);
}

TEST_CASE("best-of-k is invariant under particle relabeling") {
  const Potential pot = builtin_potential("rastrigin", 2);
  StreamRng rng(4, 44);
  Trajectory fwd, rev;
  fwd.times = rev.times = {0.0};
  Matrix x(4, 2);
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 2; ++k) x(i, k) = 2.0 * rng.normal();
  }
  Matrix y(4, 2);
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 2; ++k) y(i, k) = x(3 - i, k);
  }
  fwd.positions = {x};
  rev.positions = {y};
  CHECK(best_of_k_timeseries({fwd}, pot)[0].second ==
        doctest::Approx(best_of_k_timeseries({rev}, pot)[0].second));
}

TEST_CASE("histograms: point mass, slice normalization, ground-truth agreement") {
  Trajectory run;
  run.times = {0.0};
  run.positions = {Matrix(5, 1, 0.51)};
  const Matrix one_bin = histogram_export({run}, 4, 0.0, 1.0);
  CHECK(one_bin(0, 2) == doctest::Approx(1.0));
  CHECK(one_bin(0, 0) == doctest::Approx(0.0));

  StreamRng rng(6, 55);
  Trajectory noisy;
  noisy.times = {0.0, 1.0};
  Matrix x0(50, 1), x1(50, 1);
  for (int i = 0; i < 50; ++i) {
    x0(i, 0) = 4.0 * rng.uniform() - 2.0;
    x1(i, 0) = 10.0 * rng.normal();  // exercises out-of-range clamping
  }
  noisy.positions = {x0, x1};
  const Matrix hist = histogram_export({noisy}, 16, -2.0, 2.0);
  for (std::size_t ti = 0; ti < 2; ++ti) {
    double sum = 0.0;
    for (int b = 0; b < 16; ++b) sum += hist(ti, b);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Exact-sampler runs reproduce the ground-truth bin masses in total
  // variation at 10^4 particles.
  const std::vector<double> grid = {0.5};
  const GibbsReference1D ref = make_ref(grid);
  const Trajectory exact = exact_sampler_run(ref, grid, 10000, 17);
  const int bins = 24;
  const double lo = -3.0, hi = 3.0;
  const Matrix h = histogram_export({exact}, bins, lo, hi);
  double tv = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double left = lo + (hi - lo) * b / bins;
    const double right = lo + (hi - lo) * (b + 1) / bins;
    double truth = ref.cdf(0.5, right) - ref.cdf(0.5, left);
    if (b == 0) truth += ref.cdf(0.5, left);
    if (b == bins - 1) truth += 1.0 - ref.cdf(0.5, right);
    tv += 0.5 * std::abs(h(0, b) - truth);
  }
  CHECK(tv < 0.05);
}

TEST_CASE("left-mass series") {
  Trajectory run;
  run.times = {0.0};
  Matrix x(4, 1);
  x(0, 0) = -1.0;
  x(1, 0) = -0.2;
  x(2, 0) = 0.3;
  x(3, 0) = 2.0;
  run.positions = {x};
  CHECK(final_mass_below({run}, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("median and standard error helpers") {
  CHECK(median(std::vector<double>{3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(median(std::vector<double>{4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(median({}), std::invalid_argument);
  const std::vector<double> v = {1.0, 1.0, 1.0};
  CHECK(standard_error(v) == doctest::Approx(0.0));
}

TEST_SUITE_END();
