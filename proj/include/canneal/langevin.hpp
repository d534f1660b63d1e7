#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "canneal/gibbs1d.hpp"
#include "canneal/matrix.hpp"
#include "canneal/potential.hpp"
#include "canneal/schedule.hpp"
#include "canneal/trajectory.hpp"
#include "canneal/transport.hpp"

namespace canneal {

struct LangevinConfig {
  Potential potential;
  CoolingSchedule schedule;
  int n = 1;
  double dt = 1e-3;
  int steps_per_update = 1;  // k; the control interval is h = k dt
  double lambda = 1.0;       // timescale of the gradient/noise dynamics
  double horizon = 1.0;
  std::uint64_t seed = 0;
  InitSpec init;
  bool control = true;

  // Throws std::invalid_argument on violated invariants; returns the step count.
  int validate() const;
};

struct Ensemble {
  Matrix positions;  // n x d
  Matrix control;    // n x d
  double t = 0.0;
};

struct ControlEstimate {
  Matrix velocities;
  double ess = 0.0;
  double lp_cost = 0.0;
};

// One velocity re-estimation: annealing weights over [t, t+h], cost matrix,
// exact transport solve, barycentric projection.
ControlEstimate estimate_control(const Ensemble& ens, const Potential& potential,
                                 const CoolingSchedule& schedule, double h);

// One Euler-Maruyama step
//   X <- X + dt (V - lambda grad U(X)) + sqrt(2 lambda dt / beta(t)) zeta,
// with the control velocities V held fixed. The lambda timescale multiplies
// the gradient/noise dynamics as a time change (so exp(-beta U) stays the
// instantaneous stationary measure) while the control velocities live on
// the curve's own clock. Throws DivergenceError when a coordinate leaves
// the finite range.
void langevin_step(Ensemble& ens, const Potential& potential,
                   const CoolingSchedule& schedule, double dt, double lambda,
                   const Matrix& noise);

struct LangevinSinks {
  // Called with the initial state and after every step.
  std::function<void(double t, const Matrix& positions)> on_step;
  std::function<void(const UpdateRecord&)> on_update;
};

// Full integration loop: estimate the control (when enabled), integrate k
// steps, repeat. `mu0` supplies the exact Gibbs initial sampler for
// InitSpec::Kind::GibbsMu0 (pass a shared instance to amortize its setup
// across replicates; when null one is built internally).
void run_controlled_langevin(const LangevinConfig& cfg, const LangevinSinks& sinks,
                             const GibbsReference1D* mu0 = nullptr);

// Convenience wrapper recording everything.
Trajectory run_controlled_langevin(const LangevinConfig& cfg,
                                   const GibbsReference1D* mu0 = nullptr);

// Draws the initial n x d ensemble; stream-keyed per particle.
Matrix sample_initial_positions(const InitSpec& init, const Potential& potential,
                                int n, std::uint64_t seed,
                                const GibbsReference1D* mu0);

}  // namespace canneal
