#pragma once

#include <functional>
#include <span>
#include <string>

namespace canneal {

// Inverse-temperature schedule beta(t) on [0, horizon], together with its
// analytic derivative. Built-in schedules are non-decreasing with beta > 0.
class CoolingSchedule {
 public:
  using Fn = std::function<double(double)>;

  CoolingSchedule(std::string name, double horizon, Fn beta, Fn rate);

  const std::string& name() const { return name_; }
  double horizon() const { return horizon_; }

  double beta(double t) const;
  double rate(double t) const;

 private:
  void check_time(double t) const;

  std::string name_;
  double horizon_;
  Fn beta_;
  Fn rate_;
};

// Factory for the built-in schedules, all on the normalized horizon [0, 1]
// unless stated otherwise:
//   quadratic(b0, c):          beta(t) = b0 + c t^2
//   linear(b0, c):             beta(t) = b0 + c t
//   exponential(b0, c):        beta(t) = b0 exp(c t)
//   gaussian_unit_speed(a):    beta(t) = a^2 (a - t)^{-2}, valid for t < a
CoolingSchedule builtin_schedule(const std::string& name, std::span<const double> params,
                                 double horizon = 1.0);

}  // namespace canneal
