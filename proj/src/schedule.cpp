#include "canneal/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace canneal {

CoolingSchedule::CoolingSchedule(std::string name, double horizon, Fn beta, Fn rate)
    : name_(std::move(name)), horizon_(horizon), beta_(std::move(beta)),
      rate_(std::move(rate)) {
  if (!(horizon_ > 0.0)) {
    throw std::invalid_argument("CoolingSchedule: horizon must be > 0");
  }
}

void CoolingSchedule::check_time(double t) const {
  if (!(t >= 0.0) || !(t <= horizon_ * (1.0 + 1e-12))) {
    throw std::invalid_argument("CoolingSchedule '" + name_ + "': time " +
                                std::to_string(t) + " outside [0, " +
                                std::to_string(horizon_) + "]");
  }
}

double CoolingSchedule::beta(double t) const {
  check_time(t);
  return beta_(t);
}

double CoolingSchedule::rate(double t) const {
  check_time(t);
  return rate_(t);
}

CoolingSchedule builtin_schedule(const std::string& name, std::span<const double> params,
                                 double horizon) {
  auto need = [&](std::size_t k) {
    if (params.size() != k) {
      throw std::invalid_argument("builtin_schedule: '" + name + "' takes " +
                                  std::to_string(k) + " parameter(s), got " +
                                  std::to_string(params.size()));
    }
  };

  if (name == "quadratic") {
    need(2);
    const double b0 = params[0], c = params[1];
    if (!(b0 > 0.0)) throw std::invalid_argument("builtin_schedule: quadratic needs b0 > 0");
    if (c < 0.0) throw std::invalid_argument("builtin_schedule: quadratic needs c >= 0");
    return CoolingSchedule(
        "quadratic", horizon, [b0, c](double t) { return b0 + c * t * t; },
        [c](double t) { return 2.0 * c * t; });
  }

  if (name == "linear") {
    need(2);
    const double b0 = params[0], c = params[1];
    if (!(b0 > 0.0)) throw std::invalid_argument("builtin_schedule: linear needs b0 > 0");
    if (c < 0.0) throw std::invalid_argument("builtin_schedule: linear needs c >= 0");
    return CoolingSchedule(
        "linear", horizon, [b0, c](double t) { return b0 + c * t; },
        [c](double) { return c; });
  }

  if (name == "exponential") {
    need(2);
    const double b0 = params[0], c = params[1];
    if (!(b0 > 0.0)) throw std::invalid_argument("builtin_schedule: exponential needs b0 > 0");
    if (c < 0.0) throw std::invalid_argument("builtin_schedule: exponential needs c >= 0");
    return CoolingSchedule(
        "exponential", horizon, [b0, c](double t) { return b0 * std::exp(c * t); },
        [b0, c](double t) { return b0 * c * std::exp(c * t); });
  }

  if (name == "gaussian_unit_speed") {
    need(1);
    const double a = params[0];
    if (!(a > 0.0)) {
      throw std::invalid_argument("builtin_schedule: gaussian_unit_speed needs a > 0");
    }
    auto guard = [a](double t) {
      if (t >= a) {
        throw std::domain_error(
            "builtin_schedule: gaussian_unit_speed queried at t >= a");
      }
    };
    return CoolingSchedule(
        "gaussian_unit_speed", horizon,
        [a, guard](double t) {
          guard(t);
          const double d = a - t;
          return a * a / (d * d);
        },
        [a, guard](double t) {
          guard(t);
          const double d = a - t;
          return 2.0 * a * a / (d * d * d);
        });
  }

  throw std::invalid_argument("builtin_schedule: unknown schedule '" + name + "'");
}

}  // namespace canneal
