#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "canneal/potential.hpp"
#include "canneal/rng.hpp"

using namespace canneal;

namespace {

// Independent argmin oracle: dense scan plus parabolic refinement.
std::pair<double, double> scan_minimum(const std::function<double(double)>& f, double a,
                                       double b, int points) {
  double best_x = a;
  double best_f = f(a);
  for (int i = 1; i <= points; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / points;
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  double lo = best_x - (b - a) / points;
  double hi = best_x + (b - a) / points;
  for (int iter = 0; iter < 200; ++iter) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, f(x)};
}

double central_difference(const Potential& p, std::vector<double> x, std::size_t k,
                          double eps) {
  x[k] += eps;
  const double up = p.value(x);
  x[k] -= 2.0 * eps;
  const double down = p.value(x);
  return (up - down) / (2.0 * eps);
}

}  // namespace

TEST_SUITE_BEGIN("potential");

TEST_CASE("rastrigin vanishes at the origin") {
  const Potential p = builtin_potential("rastrigin", 10);
  const std::vector<double> x(10, 0.0);
  CHECK(p.value(x) == doctest::Approx(0.0).epsilon(1e-12));
  for (double g : p.gradient(x)) CHECK(g == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rosenbrock vanishes at the all-ones point") {
  const Potential p = builtin_potential("rosenbrock", 10);
  const std::vector<double> x(10, 1.0);
  CHECK(p.value(x) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quadratic values and gradient") {
  const Potential p = builtin_potential("quadratic", 2);
  CHECK(p.value(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(p.value(std::vector<double>{2.0, 0.0}) == doctest::Approx(2.0));
  const auto g = p.gradient(std::vector<double>{2.0, 0.0});
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(0.0));
}

TEST_CASE("double_well minimum sits near -1 at value zero") {
  const Potential p = builtin_potential("double_well", 1);
  auto raw = [&](double x) { return p.value1d(x); };
  const auto [argmin, fmin] = scan_minimum(raw, -3.0, 0.0, 1000000);
  CHECK(std::abs(argmin + 1.0) < 0.1);  // global minimum close to x = -1
  CHECK(std::abs(fmin) < 1e-6);         // offset makes the minimum value 0
  CHECK(std::abs(p.value1d(argmin)) < 1e-6);
}

TEST_CASE("double_well tails dominate the bulk") {
  const Potential p = builtin_potential("double_well", 1);
  double bulk_max = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    bulk_max = std::max(bulk_max, p.value1d(-2.0 + i * 1e-3));
  }
  CHECK(p.value1d(5.0) > bulk_max);
  CHECK(p.value1d(-5.0) > bulk_max);
}

TEST_CASE("gradients match central finite differences") {
  const std::vector<std::pair<std::string, int>> cases = {
      {"double_well", 1}, {"rosenbrock", 4}, {"rastrigin", 4}, {"quadratic", 3}};
  for (const auto& [name, dim] : cases) {
    CAPTURE(name);
    const Potential p = builtin_potential(name, dim);
    StreamRng rng(20240601, 7);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(dim);
      for (auto& xi : x) xi = -3.0 + 6.0 * rng.uniform();
      const auto grad = p.gradient(x);
      for (int k = 0; k < dim; ++k) {
        const double fd = central_difference(p, x, k, 1e-6);
        const double scale = std::max(1.0, std::abs(grad[k]));
        CHECK(std::abs(grad[k] - fd) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("errors: unknown name, bad dims, dimension mismatch") {
  CHECK_THROWS_AS(builtin_potential("does_not_exist", 2), std::invalid_argument);
  CHECK_THROWS_AS(builtin_potential("double_well", 2), std::invalid_argument);
  CHECK_THROWS_AS(builtin_potential("quadratic", 1, std::vector<double>{-1.0}),
                  std::invalid_argument);
  const Potential p = builtin_potential("quadratic", 2);
  CHECK_THROWS_AS(p.value(std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS((p.gradient(std::vector<double>{1.0, 2.0, 3.0})),
                  std::invalid_argument);
}

TEST_SUITE_END();
