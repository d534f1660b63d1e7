#include "canneal/quadrature.hpp"

#include <cmath>

namespace canneal {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    throw QuadratureError("adaptive_simpson: depth budget exhausted");
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

using Pair = std::array<double, 2>;

Pair pair_simpson_rec(const std::function<Pair(double)>& f, double a, double b,
                      const Pair& fa, const Pair& fm, const Pair& fb,
                      const Pair& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm_x = 0.5 * (a + m);
  const double frm_x = 0.5 * (m + b);
  const Pair flm = f(flm_x);
  const Pair frm = f(frm_x);
  const double h = b - a;
  Pair left, right, delta;
  for (int k = 0; k < 2; ++k) {
    left[k] = h / 12.0 * (fa[k] + 4.0 * flm[k] + fm[k]);
    right[k] = h / 12.0 * (fm[k] + 4.0 * frm[k] + fb[k]);
    delta[k] = left[k] + right[k] - whole[k];
  }
  if (std::abs(delta[0]) <= 15.0 * tol && std::abs(delta[1]) <= 15.0 * tol) {
    return {left[0] + right[0] + delta[0] / 15.0, left[1] + right[1] + delta[1] / 15.0};
  }
  if (depth <= 0) {
    throw QuadratureError("adaptive_simpson_pair: depth budget exhausted");
  }
  const Pair l = pair_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1);
  const Pair r = pair_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
  return {l[0] + r[0], l[1] + r[1]};
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

std::array<double, 2> adaptive_simpson_pair(
    const std::function<std::array<double, 2>(double)>& f, double a, double b,
    double tol, int max_depth) {
  if (a == b) return {0.0, 0.0};
  const Pair fa = f(a);
  const Pair fb = f(b);
  const double m = 0.5 * (a + b);
  const Pair fm = f(m);
  Pair whole;
  for (int k = 0; k < 2; ++k) whole[k] = (b - a) / 6.0 * (fa[k] + 4.0 * fm[k] + fb[k]);
  return pair_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace canneal
