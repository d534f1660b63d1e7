#include "canneal/gibbs1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "canneal/quadrature.hpp"

namespace canneal {

namespace {
// Below this the density is treated as numerically vanished.
constexpr double kDensityFloor = 1e-290;
}  // namespace

struct GibbsReference1D::Slice {
  double t = 0.0;
  double beta = 0.0;
  double beta_rate = 0.0;
  double lo = 0.0;
  double width = 0.0;  // panel width
  int panels = 0;
  std::vector<double> edge;     // panels + 1
  std::vector<double> gedge;    // unnormalized density at edges
  std::vector<double> zcum;     // prefix integrals of g, panels + 1
  std::vector<double> cprefix;  // prefix integrals of (U - meanU) g
  std::vector<double> csuffix;  // suffix integrals of (U - meanU) g
  double z_total = 0.0;
  double mean_u = 0.0;
  int median_edge = 0;  // edge index where zcum first reaches z_total / 2

  double edge_at(int j) const { return edge[static_cast<std::size_t>(j)]; }

  int panel_of(double x) const {
    int k = static_cast<int>(std::floor((x - lo) / width));
    return std::clamp(k, 0, panels - 1);
  }

  // Signed prefix integral of the centered density at an arbitrary x,
  // using the suffix accumulation in the right half so that the near-zero
  // value in either tail is free of cancellation.
  double centered_prefix(double x, const Potential& pot, double tol) const {
    const int k = panel_of(x);
    auto integrand = [&](double y) {
      return (pot.value1d(y) - mean_u) * std::exp(-beta * pot.value1d(y));
    };
    if (x <= edge_at(median_edge)) {
      const double partial = adaptive_simpson(integrand, edge_at(k), x, tol);
      return cprefix[static_cast<std::size_t>(k)] + partial;
    }
    const double partial = adaptive_simpson(integrand, x, edge_at(k + 1), tol);
    return -(csuffix[static_cast<std::size_t>(k) + 1] + partial);
  }
};

GibbsReference1D::GibbsReference1D(Potential potential, CoolingSchedule schedule,
                                   Quad1DConfig quad, std::vector<double> cache_times,
                                   double domain_halfwidth)
    : potential_(std::move(potential)), schedule_(std::move(schedule)), quad_(quad),
      cache_times_(std::move(cache_times)) {
  if (potential_.dim() != 1) {
    throw std::invalid_argument("GibbsReference1D: potential must be one-dimensional");
  }
  if (quad_.panels < 2 || quad_.panels % 2 != 0) {
    throw std::invalid_argument("GibbsReference1D: panel count must be even and >= 2");
  }
  if (domain_halfwidth > 0.0) {
    halfwidth_ = domain_halfwidth;
  } else {
    // Widen until the unnormalized density at the boundary is negligible for
    // the broadest measure on the schedule (beta(0)). The built-in potentials
    // grow at least quadratically, so the boundary value bounds the tail mass.
    const double beta0 = schedule_.beta(0.0);
    double L = 8.0;
    while (L <= 512.0) {
      const double gl = std::exp(-beta0 * potential_.value1d(-L));
      const double gr = std::exp(-beta0 * potential_.value1d(L));
      if (gl <= 1e-18 && gr <= 1e-18) break;
      L *= 2.0;
    }
    halfwidth_ = L;
  }
  cache_.reserve(cache_times_.size());
  for (double t : cache_times_) cache_.push_back(build_slice(t));
}

GibbsReference1D::~GibbsReference1D() = default;
GibbsReference1D::GibbsReference1D(GibbsReference1D&&) noexcept = default;
GibbsReference1D& GibbsReference1D::operator=(GibbsReference1D&&) noexcept = default;

std::unique_ptr<GibbsReference1D::Slice> GibbsReference1D::build_slice(double t) const {
  auto s = std::make_unique<Slice>();
  s->t = t;
  s->beta = schedule_.beta(t);
  s->beta_rate = schedule_.rate(t);
  s->lo = -halfwidth_;
  s->panels = quad_.panels;
  s->width = 2.0 * halfwidth_ / quad_.panels;

  const int m = s->panels;
  s->edge.resize(m + 1);
  s->gedge.resize(m + 1);
  for (int j = 0; j <= m; ++j) {
    // Last edge exactly at +L to keep the domain symmetric.
    s->edge[j] = (j == m) ? halfwidth_ : s->lo + j * s->width;
    s->gedge[j] = std::exp(-s->beta * potential_.value1d(s->edge[j]));
  }

  const double beta = s->beta;
  auto pair_integrand = [&](double y) -> std::array<double, 2> {
    const double u = potential_.value1d(y);
    const double g = std::exp(-beta * u);
    return {g, u * g};
  };

  std::vector<double> zpanel(m), epanel(m);
  const double panel_tol = quad_.tol * (s->width / (2.0 * halfwidth_));
  for (int j = 0; j < m; ++j) {
    const auto zi = adaptive_simpson_pair(pair_integrand, s->edge[j], s->edge[j + 1],
                                          panel_tol);
    zpanel[j] = zi[0];
    epanel[j] = zi[1];
  }

  s->zcum.assign(m + 1, 0.0);
  double e_total = 0.0;
  for (int j = 0; j < m; ++j) {
    s->zcum[j + 1] = s->zcum[j] + zpanel[j];
    e_total += epanel[j];
  }
  s->z_total = s->zcum[m];
  if (!(s->z_total > 0.0)) {
    throw QuadratureError("GibbsReference1D: normalizer vanished on the domain");
  }
  s->mean_u = e_total / s->z_total;

  std::vector<double> cpanel(m);
  for (int j = 0; j < m; ++j) cpanel[j] = epanel[j] - s->mean_u * zpanel[j];
  s->cprefix.assign(m + 1, 0.0);
  s->csuffix.assign(m + 1, 0.0);
  for (int j = 0; j < m; ++j) s->cprefix[j + 1] = s->cprefix[j] + cpanel[j];
  for (int j = m - 1; j >= 0; --j) s->csuffix[j] = s->csuffix[j + 1] + cpanel[j];

  const double half = 0.5 * s->z_total;
  s->median_edge = static_cast<int>(
      std::lower_bound(s->zcum.begin(), s->zcum.end(), half) - s->zcum.begin());
  s->median_edge = std::clamp(s->median_edge, 0, m);
  return s;
}

const GibbsReference1D::Slice& GibbsReference1D::slice_for(
    double t, std::unique_ptr<Slice>& scratch) const {
  for (std::size_t i = 0; i < cache_times_.size(); ++i) {
    if (cache_times_[i] == t) return *cache_[i];
  }
  scratch = build_slice(t);
  return *scratch;
}

double GibbsReference1D::normalizer(double t) const {
  std::unique_ptr<Slice> scratch;
  return slice_for(t, scratch).z_total;
}

double GibbsReference1D::mean_potential(double t) const {
  std::unique_ptr<Slice> scratch;
  return slice_for(t, scratch).mean_u;
}

double GibbsReference1D::cdf(double t, double x) const {
  std::unique_ptr<Slice> scratch;
  const Slice& s = slice_for(t, scratch);
  if (x <= s.lo) return 0.0;
  if (x >= halfwidth_) return 1.0;
  const int k = s.panel_of(x);
  const double beta = s.beta;
  auto g = [&](double y) { return std::exp(-beta * potential_.value1d(y)); };
  const double panel_tol = quad_.tol * (s.width / (2.0 * halfwidth_));
  const double partial = adaptive_simpson(g, s.edge_at(k), x, panel_tol);
  return std::clamp((s.zcum[static_cast<std::size_t>(k)] + partial) / s.z_total, 0.0,
                    1.0);
}

double GibbsReference1D::quantile(double t, double u) const {
  if (!(u > 0.0) || !(u < 1.0)) {
    throw std::invalid_argument("GibbsReference1D::quantile: u must lie in (0, 1)");
  }
  std::unique_ptr<Slice> scratch;
  const Slice& s = slice_for(t, scratch);
  const double target = u * s.z_total;
  int k = static_cast<int>(std::upper_bound(s.zcum.begin(), s.zcum.end(), target) -
                           s.zcum.begin()) -
          1;
  k = std::clamp(k, 0, s.panels - 1);

  const double beta = s.beta;
  auto g = [&](double y) { return std::exp(-beta * potential_.value1d(y)); };
  const double panel_tol = quad_.tol * (s.width / (2.0 * halfwidth_));
  const double base = s.zcum[static_cast<std::size_t>(k)];

  double a = s.edge_at(k);
  double b = s.edge_at(k + 1);
  const double xtol = 1e-12 * halfwidth_;
  for (int iter = 0; iter < 200 && (b - a) > xtol; ++iter) {
    const double mid = 0.5 * (a + b);
    const double cum = base + adaptive_simpson(g, s.edge_at(k), mid, panel_tol);
    if (cum < target) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

double GibbsReference1D::velocity(double t, double x) const {
  if (x < -halfwidth_ || x > halfwidth_) {
    throw std::invalid_argument("GibbsReference1D::velocity: x outside the domain");
  }
  std::unique_ptr<Slice> scratch;
  const Slice& s = slice_for(t, scratch);
  const double g = std::exp(-s.beta * potential_.value1d(x));
  if (g < kDensityFloor) {
    throw TailUnderflowError(
        "GibbsReference1D::velocity: density underflow in the tail");
  }
  const double panel_tol = quad_.tol * (s.width / (2.0 * halfwidth_));
  const double icum = s.centered_prefix(x, potential_, panel_tol);
  return s.beta_rate * icum / g;
}

double GibbsReference1D::metric_derivative(double t) const {
  std::unique_ptr<Slice> scratch;
  const Slice& s = slice_for(t, scratch);
  const int m = s.panels;
  // Composite Simpson over panel pairs; the centered prefix at every edge is
  // already available from the cumulative arrays.
  auto f_at = [&](int j) {
    const double g = s.gedge[static_cast<std::size_t>(j)];
    if (g < kDensityFloor) return 0.0;
    const double icum = (j <= s.median_edge)
                            ? s.cprefix[static_cast<std::size_t>(j)]
                            : -s.csuffix[static_cast<std::size_t>(j)];
    return icum * icum / g;
  };
  double integral = 0.0;
  for (int j = 0; j + 2 <= m; j += 2) {
    integral += s.width / 3.0 * (f_at(j) + 4.0 * f_at(j + 1) + f_at(j + 2));
  }
  return std::abs(s.beta_rate) * std::sqrt(integral / s.z_total);
}

GaussianCurve::GaussianCurve(std::vector<double> sigma_diag, CoolingSchedule schedule)
    : sigma_diag_(std::move(sigma_diag)), schedule_(std::move(schedule)) {
  if (sigma_diag_.empty()) {
    throw std::invalid_argument("GaussianCurve: empty covariance diagonal");
  }
  double trace = 0.0;
  for (double v : sigma_diag_) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("GaussianCurve: covariance must be positive definite");
    }
    trace += v;
  }
  frob_ = std::sqrt(trace);
}

GaussianCurve::GaussianCurve(double sigma_scalar, CoolingSchedule schedule)
    : GaussianCurve(std::vector<double>{sigma_scalar}, std::move(schedule)) {}

std::vector<double> GaussianCurve::velocity(double t, std::span<const double> x) const {
  if (x.size() != sigma_diag_.size()) {
    throw std::invalid_argument("GaussianCurve::velocity: dimension mismatch");
  }
  const double factor = -0.5 * schedule_.rate(t) / schedule_.beta(t);
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = factor * x[i];
  return v;
}

double GaussianCurve::velocity1d(double t, double x) const {
  return -0.5 * schedule_.rate(t) / schedule_.beta(t) * x;
}

double GaussianCurve::w2(double t, double s) const {
  const double bt = schedule_.beta(t);
  const double bs = schedule_.beta(s);
  return frob_ * std::abs(1.0 / std::sqrt(bt) - 1.0 / std::sqrt(bs));
}

double GaussianCurve::metric_derivative(double t) const {
  const double b = schedule_.beta(t);
  return 0.5 * frob_ * schedule_.rate(t) / (b * std::sqrt(b));
}

}  // namespace canneal
