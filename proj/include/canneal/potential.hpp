#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace canneal {

// Objective function with analytic gradient. Built-in potentials are offset
// so that their global minimum value is 0. Instances are immutable and safe
// to evaluate concurrently.
class Potential {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

  Potential(std::string name, int dim, ValueFn value, GradientFn gradient);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> x) const;

  // 1-d conveniences.
  double value1d(double x) const { return value({&x, 1}); }
  double gradient1d(double x) const;

 private:
  void check_dim(std::size_t got) const;

  std::string name_;
  int dim_;
  ValueFn value_;
  GradientFn gradient_;
};

// Factory for the built-in objectives:
//   double_well (dim 1), rosenbrock, rastrigin, quadratic.
// `params` is interpreted per potential; quadratic accepts an optional
// isotropic covariance scale (default 1).
Potential builtin_potential(const std::string& name, int dim,
                            std::span<const double> params = {});

// Minimizes f on [a, b] by golden-section search down to the given bracket
// width. Assumes a single minimum in the bracket.
double golden_section_minimize(const std::function<double(double)>& f, double a,
                               double b, double tol);

}  // namespace canneal
