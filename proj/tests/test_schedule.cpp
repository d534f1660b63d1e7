#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "canneal/schedule.hpp"

using namespace canneal;

TEST_SUITE_BEGIN("schedule");

TEST_CASE("quadratic schedule values and rate") {
  const CoolingSchedule s = builtin_schedule("quadratic", std::vector<double>{0.25, 25.0});
  CHECK(s.beta(0.0) == doctest::Approx(0.25));
  CHECK(s.beta(1.0) == doctest::Approx(25.25));
  CHECK(s.rate(0.5) == doctest::Approx(25.0));
}

TEST_CASE("linear and exponential schedules") {
  const CoolingSchedule lin = builtin_schedule("linear", std::vector<double>{0.1, 25.0});
  CHECK(lin.beta(0.0) == doctest::Approx(0.1));
  CHECK(lin.beta(1.0) == doctest::Approx(25.1));
  CHECK(lin.rate(0.3) == doctest::Approx(25.0));

  const CoolingSchedule ex = builtin_schedule("exponential", std::vector<double>{1.0, 2.0});
  CHECK(ex.beta(0.5) == doctest::Approx(std::exp(1.0)));
  CHECK(ex.rate(0.5) == doctest::Approx(2.0 * std::exp(1.0)));
}

TEST_CASE("gaussian unit-speed schedule") {
  const CoolingSchedule s =
      builtin_schedule("gaussian_unit_speed", std::vector<double>{2.0});
  CHECK(s.beta(0.0) == doctest::Approx(1.0));
  CHECK(s.beta(1.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(builtin_schedule("gaussian_unit_speed", std::vector<double>{0.5}).beta(0.75),
                  std::domain_error);
}

TEST_CASE("rates match finite differences and schedules are non-decreasing") {
  const std::vector<std::pair<std::string, std::vector<double>>> cases = {
      {"quadratic", {0.25, 25.0}},
      {"linear", {0.1, 5.0}},
      {"exponential", {0.5, 3.0}},
      {"gaussian_unit_speed", {2.0}}};
  for (const auto& [name, params] : cases) {
    CAPTURE(name);
    const CoolingSchedule s = builtin_schedule(name, params);
    const double eps = 1e-6;
    for (int i = 1; i < 100; ++i) {
      const double t = i / 100.0;
      const double fd = (s.beta(t + eps) - s.beta(t - eps)) / (2.0 * eps);
      const double scale = std::max(1.0, std::abs(s.rate(t)));
      CHECK(std::abs(s.rate(t) - fd) / scale < 1e-6);
      CHECK(s.rate(t) >= 0.0);
      CHECK(s.beta(t) >= s.beta(t - eps));
      CHECK(s.beta(t) > 0.0);
    }
  }
}

TEST_CASE("errors: unknown name, non-positive beta") {
  CHECK_THROWS_AS(builtin_schedule("cubic", std::vector<double>{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS((builtin_schedule("linear", std::vector<double>{-1.0, 5.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS((builtin_schedule("quadratic", std::vector<double>{0.25, -25.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(builtin_schedule("linear", std::vector<double>{0.1}),
                  std::invalid_argument);
}

TEST_SUITE_END();
