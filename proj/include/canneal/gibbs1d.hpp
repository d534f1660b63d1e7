#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "canneal/potential.hpp"
#include "canneal/rng.hpp"
#include "canneal/schedule.hpp"

namespace canneal {

// Raised by velocity queries where the density has underflowed; the
// analytic limit is finite but numerically indeterminate there.
struct TailUnderflowError : std::domain_error {
  using std::domain_error::domain_error;
};

struct Quad1DConfig {
  int panels = 4096;   // fixed panel decomposition of the truncated domain
  double tol = 1e-10;  // absolute tolerance for the per-panel integrals
};

// Quadrature-backed ground truth for the one-dimensional Gibbs curve
// t -> Z_t^{-1} exp(-beta(t) U(x)) dx on a truncated domain [-L, L].
//
// The domain half-width is chosen at construction so that the mass outside
// [-L, L] is negligible (< 1e-12) for every inverse temperature on the
// schedule; the binding case is beta(0), where the measure is broadest.
// All queries are pure; slices for times passed in `cache_times` are built
// eagerly so repeated queries at those times are cheap. Instances are
// immutable after construction and safe to query concurrently.
class GibbsReference1D {
 public:
  GibbsReference1D(Potential potential, CoolingSchedule schedule,
                   Quad1DConfig quad = {}, std::vector<double> cache_times = {},
                   double domain_halfwidth = 0.0 /* 0 = choose automatically */);
  ~GibbsReference1D();
  GibbsReference1D(GibbsReference1D&&) noexcept;
  GibbsReference1D& operator=(GibbsReference1D&&) noexcept;

  const Potential& potential() const { return potential_; }
  const CoolingSchedule& schedule() const { return schedule_; }
  double domain_halfwidth() const { return halfwidth_; }

  // Z(t) = int exp(-beta(t) U) over the truncated domain.
  double normalizer(double t) const;
  double cdf(double t, double x) const;
  double quantile(double t, double u) const;
  // Inverse-CDF sampling; any rng exposing uniform() -> (0,1) works.
  template <typename Rng>
  double sample(double t, Rng& rng) const {
    return quantile(t, rng.uniform());
  }
  // int U d mu_t
  double mean_potential(double t) const;
  // Control velocity of the Gibbs curve at (t, x):
  //   v_t(x) = beta'(t) / pi_t(x) * int_{-L}^{x} (U(y) - int U d mu_t) pi_t(y) dy.
  double velocity(double t, double x) const;
  // Speed of the curve in Wasserstein-2: ( int v_t^2 d mu_t )^{1/2}.
  double metric_derivative(double t) const;
  // mu_t((-inf, x0)); the left-well mass diagnostic is x0 = 0.
  double mass_below(double t, double x0) const { return cdf(t, x0); }

 private:
  struct Slice;
  const Slice& slice_for(double t, std::unique_ptr<Slice>& scratch) const;
  std::unique_ptr<Slice> build_slice(double t) const;

  Potential potential_;
  CoolingSchedule schedule_;
  Quad1DConfig quad_;
  double halfwidth_ = 0.0;
  std::vector<double> cache_times_;
  std::vector<std::unique_ptr<Slice>> cache_;
};

// Closed forms for the curve of centred Gaussians mu_t = N(0, beta(t)^{-1} Sigma)
// with Sigma = diag(sigma). Used both as a reference in its own right and as
// the cross-check oracle for the quadrature machinery.
class GaussianCurve {
 public:
  GaussianCurve(std::vector<double> sigma_diag, CoolingSchedule schedule);
  GaussianCurve(double sigma_scalar, CoolingSchedule schedule);

  int dim() const { return static_cast<int>(sigma_diag_.size()); }
  const CoolingSchedule& schedule() const { return schedule_; }

  // v_t(x) = -(1/2) (beta'(t)/beta(t)) x, independent of Sigma.
  std::vector<double> velocity(double t, std::span<const double> x) const;
  double velocity1d(double t, double x) const;

  // W2(mu_t, mu_s) = ||Sigma^{1/2}||_Fr |beta(t)^{-1/2} - beta(s)^{-1/2}|.
  double w2(double t, double s) const;

  // |mu'|(t) = (||Sigma^{1/2}||_Fr / 2) beta'(t) beta(t)^{-3/2}.
  double metric_derivative(double t) const;

  double frobenius_sqrt_sigma() const { return frob_; }

 private:
  std::vector<double> sigma_diag_;
  CoolingSchedule schedule_;
  double frob_ = 0.0;
};

}  // namespace canneal
