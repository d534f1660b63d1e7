#pragma once

#include <array>
#include <functional>
#include <stdexcept>

namespace canneal {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive Simpson over [a, b] to the given absolute tolerance. Throws
// QuadratureError if the recursion depth budget is exhausted before the
// local error estimate falls under tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

// Same, for a pair of integrands sharing evaluation points (both components
// must meet the tolerance).
std::array<double, 2> adaptive_simpson_pair(
    const std::function<std::array<double, 2>(double)>& f, double a, double b,
    double tol, int max_depth = 40);

}  // namespace canneal
