#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "canneal/gibbs1d.hpp"
#include "canneal/matrix.hpp"
#include "canneal/potential.hpp"
#include "canneal/schedule.hpp"
#include "canneal/trajectory.hpp"

namespace canneal {

struct ThinningConfig {
  double lookahead = 0.0;  // tau; 0 means "use the control interval h"
  int grid_points = 16;    // rate evaluations per lookahead window
  double safety = 1.5;     // envelope inflation factor
};

struct PdmpConfig {
  Potential potential;
  CoolingSchedule schedule;
  int n = 1;
  double lambda = 1.0;       // direction speed; directions live on lambda * S^{d-1}
  double refresh_rate = 1.0; // total ensemble refreshment rate
  double h = 0.02;           // scheduled velocity-update interval
  double horizon = 1.0;
  std::uint64_t seed = 0;
  InitSpec init;
  bool control = true;
  ThinningConfig thinning;
  int out_grid = 1000;  // recording grid size (inclusive of both endpoints)

  void validate() const;
};

struct PdmpState {
  Matrix positions;   // n x d
  Matrix directions;  // n x d, each row of norm lambda
  Matrix control;     // n x d
  double t = 0.0;
};

// Specular reflection of y against the level set with normal `gradient`;
// identity when the gradient vanishes.
std::vector<double> reflect(std::span<const double> gradient, std::span<const double> y);

// max(0, beta(t) <grad U(x), y>).
double bounce_rate(double t, std::span<const double> x, std::span<const double> y,
                   const Potential& potential, const CoolingSchedule& schedule);

// Linear flow: positions advance along direction + control for duration s.
void advance_flow(PdmpState& state, double s);

struct EventTime {
  double time = std::numeric_limits<double>::infinity();
  bool beyond_horizon = true;
  int envelope_violations = 0;
};

// First arrival of an inhomogeneous Poisson process on [0, horizon] by
// thinning against a piecewise-constant envelope: the rate is evaluated at
// `grid_points` points per lookahead window and inflated by the safety
// factor; an observed rate above the envelope rebuilds the window with the
// factor doubled.
template <typename RateFn, typename Rng>
EventTime sample_event_time(RateFn&& rate, double horizon,
                            const ThinningConfig& cfg, Rng& rng) {
  if (!(cfg.lookahead > 0.0) || cfg.grid_points < 1 || !(cfg.safety >= 1.0)) {
    throw std::invalid_argument("sample_event_time: bad thinning configuration");
  }
  EventTime out;
  double w0 = 0.0;
  while (w0 < horizon) {
    const double wlen = std::min(cfg.lookahead, horizon - w0);
    double safety = cfg.safety;
    bool window_done = false;
    while (!window_done) {
      double peak = 0.0;
      if (cfg.grid_points == 1) {
        peak = rate(w0);
      } else {
        for (int i = 0; i < cfg.grid_points; ++i) {
          const double s = w0 + wlen * static_cast<double>(i) / (cfg.grid_points - 1);
          peak = std::max(peak, rate(s));
        }
      }
      const double envelope = safety * peak;
      if (!(envelope > 0.0)) break;  // silent window, no event possible
      double s = 0.0;
      while (true) {
        s += rng.exponential(envelope);
        if (s >= wlen) {
          window_done = true;
          break;
        }
        const double r = rate(w0 + s);
        if (r > envelope) {
          // Envelope violated: rebuild this window with a doubled factor.
          safety *= 2.0;
          ++out.envelope_violations;
          break;
        }
        if (rng.uniform() * envelope <= r) {
          out.time = w0 + s;
          out.beyond_horizon = false;
          return out;
        }
      }
    }
    w0 += wlen;
  }
  return out;
}

struct PdmpRunStats {
  long bounces = 0;
  long refreshes = 0;
  long scheduled_updates = 0;
  long envelope_violations = 0;
};

enum class PdmpEventKind { Start, Bounce, Refresh, Scheduled, End };

struct PdmpSinks {
  // Positions sampled on the fixed output grid.
  std::function<void(double t, const Matrix& positions)> on_grid;
  std::function<void(const UpdateRecord&)> on_update;
  // State right after every event (and at start/end); between consecutive
  // calls the trajectory is exactly linear in direction + control.
  std::function<void(const PdmpState&, PdmpEventKind)> on_event;
};

// Synchronous controlled bouncy-particle annealing: candidate bounce times
// per particle by thinning, ensemble-level refreshments, scheduled control
// re-estimation every h time units, recording on a fixed grid.
PdmpRunStats run_controlled_pdmp(const PdmpConfig& cfg, const PdmpSinks& sinks,
                                 const GibbsReference1D* mu0 = nullptr);

Trajectory run_controlled_pdmp(const PdmpConfig& cfg,
                               const GibbsReference1D* mu0 = nullptr);

// Direction uniform on lambda * S^{d-1} via a normalized Gaussian draw.
template <typename Rng>
std::vector<double> sample_direction(int dim, double lambda, Rng& rng) {
  std::vector<double> y(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      y[k] = rng.normal();
      norm2 += y[k] * y[k];
    }
  } while (!(norm2 > 0.0));
  const double scale = lambda / std::sqrt(norm2);
  for (double& v : y) v *= scale;
  return y;
}

}  // namespace canneal
