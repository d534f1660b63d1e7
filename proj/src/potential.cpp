#include "canneal/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace canneal {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

Potential::Potential(std::string name, int dim, ValueFn value, GradientFn gradient)
    : name_(std::move(name)), dim_(dim), value_(std::move(value)),
      gradient_(std::move(gradient)) {
  if (dim_ < 1) throw std::invalid_argument("Potential: dim must be >= 1");
}

void Potential::check_dim(std::size_t got) const {
  if (got != static_cast<std::size_t>(dim_)) {
    throw std::invalid_argument("Potential '" + name_ + "': expected dimension " +
                                std::to_string(dim_) + ", got " + std::to_string(got));
  }
}

double Potential::value(std::span<const double> x) const {
  check_dim(x.size());
  return value_(x);
}

void Potential::gradient(std::span<const double> x, std::span<double> out) const {
  check_dim(x.size());
  check_dim(out.size());
  gradient_(x, out);
}

std::vector<double> Potential::gradient(std::span<const double> x) const {
  std::vector<double> out(x.size());
  gradient(x, std::span<double>(out));
  return out;
}

double Potential::gradient1d(double x) const {
  double g = 0.0;
  gradient({&x, 1}, {&g, 1});
  return g;
}

double golden_section_minimize(const std::function<double(double)>& f, double a,
                               double b, double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

Potential builtin_potential(const std::string& name, int dim,
                            std::span<const double> params) {
  if (dim < 1) throw std::invalid_argument("builtin_potential: dim must be >= 1");

  if (name == "double_well") {
    if (dim != 1) {
      throw std::invalid_argument("builtin_potential: double_well requires dim = 1");
    }
    auto raw = [](double x) { return 0.5 * x * x + std::cos(2.0 * x - 0.5); };
    // The additive offset is fixed at construction so that min U = 0. The
    // global minimum sits in [-3, 0].
    const double argmin = golden_section_minimize(raw, -3.0, 0.0, 1e-10);
    const double offset = -raw(argmin);
    return Potential(
        "double_well", 1,
        [raw, offset](std::span<const double> x) { return raw(x[0]) + offset; },
        [](std::span<const double> x, std::span<double> g) {
          g[0] = x[0] - 2.0 * std::sin(2.0 * x[0] - 0.5);
        });
  }

  if (name == "rosenbrock") {
    if (dim < 2) {
      throw std::invalid_argument("builtin_potential: rosenbrock requires dim >= 2");
    }
    return Potential(
        "rosenbrock", dim,
        [](std::span<const double> x) {
          double s = 0.0;
          for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double a = x[i + 1] - x[i] * x[i];
            const double b = 1.0 - x[i];
            s += 5.0 * a * a + b * b;
          }
          return s;
        },
        [](std::span<const double> x, std::span<double> g) {
          const std::size_t d = x.size();
          for (std::size_t i = 0; i < d; ++i) g[i] = 0.0;
          for (std::size_t i = 0; i + 1 < d; ++i) {
            const double a = x[i + 1] - x[i] * x[i];
            g[i] += -20.0 * a * x[i] - 2.0 * (1.0 - x[i]);
            g[i + 1] += 10.0 * a;
          }
        });
  }

  if (name == "rastrigin") {
    return Potential(
        "rastrigin", dim,
        [](std::span<const double> x) {
          double s = 0.0;
          for (double xi : x) s += xi * xi + (1.0 - std::cos(kTwoPi * xi));
          return s;
        },
        [](std::span<const double> x, std::span<double> g) {
          for (std::size_t i = 0; i < x.size(); ++i) {
            g[i] = 2.0 * x[i] + kTwoPi * std::sin(kTwoPi * x[i]);
          }
        });
  }

  if (name == "quadratic") {
    // U(x) = x^T Sigma^{-1} x / 2 with Sigma = scale * I.
    double scale = 1.0;
    if (params.size() == 1) {
      scale = params[0];
    } else if (!params.empty()) {
      throw std::invalid_argument(
          "builtin_potential: quadratic takes at most one parameter (covariance scale)");
    }
    if (!(scale > 0.0)) {
      throw std::invalid_argument("builtin_potential: quadratic covariance scale must be > 0");
    }
    const double inv = 1.0 / scale;
    return Potential(
        "quadratic", dim,
        [inv](std::span<const double> x) {
          double s = 0.0;
          for (double xi : x) s += xi * xi;
          return 0.5 * inv * s;
        },
        [inv](std::span<const double> x, std::span<double> g) {
          for (std::size_t i = 0; i < x.size(); ++i) g[i] = inv * x[i];
        });
  }

  throw std::invalid_argument("builtin_potential: unknown potential '" + name + "'");
}

}  // namespace canneal
