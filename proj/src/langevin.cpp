#include "canneal/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace canneal {

int LangevinConfig::validate() const {
  if (n < 1) throw std::invalid_argument("LangevinConfig: n must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("LangevinConfig: dt must be > 0");
  if (steps_per_update < 1) {
    throw std::invalid_argument("LangevinConfig: steps_per_update must be >= 1");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("LangevinConfig: lambda must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("LangevinConfig: horizon must be > 0");
  if (horizon > schedule.horizon() * (1.0 + 1e-12)) {
    throw std::invalid_argument("LangevinConfig: horizon exceeds the schedule horizon");
  }
  const double ratio = horizon / dt;
  const auto steps = static_cast<long>(std::llround(ratio));
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9) {
    throw std::invalid_argument(
        "LangevinConfig: horizon must be a whole number of dt steps");
  }
  return static_cast<int>(steps);
}

ControlEstimate estimate_control(const Ensemble& ens, const Potential& potential,
                                 const CoolingSchedule& schedule, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("estimate_control: h must be > 0");
  const std::size_t n = ens.positions.rows();
  const std::size_t d = ens.positions.cols();

  std::vector<double> energies(n);
  for (std::size_t i = 0; i < n; ++i) {
    energies[i] = potential.value(ens.positions.row(i));
  }
  const double delta_beta = schedule.beta(ens.t + h) - schedule.beta(ens.t);
  const AnnealWeights weights = anneal_weights(energies, delta_beta);

  const Matrix cost = cost_matrix(ens.positions);
  std::vector<int> hint;
  if (d == 1) {
    // A position-sorted initial basis is already monotone, which is optimal
    // for one-dimensional squared costs; the simplex then just verifies.
    hint.resize(n);
    std::iota(hint.begin(), hint.end(), 0);
    std::sort(hint.begin(), hint.end(), [&](int a, int b) {
      return ens.positions(a, 0) < ens.positions(b, 0);
    });
  }
  const TransportPlan plan = solve_transport_lp(cost, weights, hint);

  ControlEstimate out;
  out.velocities = barycentric_velocity(plan, ens.positions, h);
  out.ess = weights.ess();
  out.lp_cost = plan.cost();
  return out;
}

void langevin_step(Ensemble& ens, const Potential& potential,
                   const CoolingSchedule& schedule, double dt, double lambda,
                   const Matrix& noise) {
  const std::size_t n = ens.positions.rows();
  const std::size_t d = ens.positions.cols();
  if (noise.rows() != n || noise.cols() != d) {
    throw std::invalid_argument("langevin_step: noise shape mismatch");
  }
  const double beta = schedule.beta(ens.t);
  const double noise_scale = std::sqrt(2.0 * lambda * dt / beta);

  std::vector<double> grad(d);
  for (std::size_t i = 0; i < n; ++i) {
    potential.gradient(ens.positions.row(i), grad);
    for (std::size_t k = 0; k < d; ++k) {
      ens.positions(i, k) += dt * (ens.control(i, k) - lambda * grad[k]) +
                             noise_scale * noise(i, k);
      if (!(std::abs(ens.positions(i, k)) < kDivergenceThreshold)) {
        throw DivergenceError(ens.t, "langevin_step: particle " + std::to_string(i) +
                                         " diverged at t=" + std::to_string(ens.t));
      }
    }
  }
  ens.t += dt;
}

Matrix sample_initial_positions(const InitSpec& init, const Potential& potential,
                                int n, std::uint64_t seed,
                                const GibbsReference1D* mu0) {
  const int d = potential.dim();
  Matrix x(n, d);
  if (init.kind == InitSpec::Kind::GibbsMu0) {
    if (d != 1) {
      throw std::invalid_argument(
          "sample_initial_positions: gibbs_mu0 init requires a 1-d potential");
    }
    if (mu0 == nullptr) {
      throw std::invalid_argument(
          "sample_initial_positions: gibbs_mu0 init needs a reference");
    }
    for (int i = 0; i < n; ++i) {
      StreamRng rng(seed, rng_tag::kInit, static_cast<std::uint64_t>(i));
      x(i, 0) = mu0->sample(0.0, rng);
    }
    return x;
  }
  if (!(init.variance > 0.0)) {
    throw std::invalid_argument("sample_initial_positions: variance must be > 0");
  }
  std::vector<double> mean(d, 0.0);
  if (init.mean.size() == 1) {
    mean.assign(d, init.mean[0]);
  } else if (init.mean.size() == static_cast<std::size_t>(d)) {
    mean = init.mean;
  } else if (!init.mean.empty()) {
    throw std::invalid_argument("sample_initial_positions: mean length mismatch");
  }
  const double sd = std::sqrt(init.variance);
  for (int i = 0; i < n; ++i) {
    StreamRng rng(seed, rng_tag::kInit, static_cast<std::uint64_t>(i));
    for (int k = 0; k < d; ++k) x(i, k) = mean[k] + sd * rng.normal();
  }
  return x;
}

void run_controlled_langevin(const LangevinConfig& cfg, const LangevinSinks& sinks,
                             const GibbsReference1D* mu0) {
  const int steps = cfg.validate();
  const int d = cfg.potential.dim();

  std::optional<GibbsReference1D> own_mu0;
  if (cfg.init.kind == InitSpec::Kind::GibbsMu0 && mu0 == nullptr) {
    own_mu0.emplace(cfg.potential, cfg.schedule, Quad1DConfig{},
                    std::vector<double>{0.0});
    mu0 = &*own_mu0;
  }

  Ensemble ens;
  ens.positions = sample_initial_positions(cfg.init, cfg.potential, cfg.n, cfg.seed, mu0);
  ens.control = Matrix(cfg.n, d, 0.0);
  ens.t = 0.0;

  if (sinks.on_step) sinks.on_step(0.0, ens.positions);

  Matrix noise(cfg.n, d);
  for (int step = 0; step < steps; ++step) {
    ens.t = step * cfg.dt;
    if (cfg.control && step % cfg.steps_per_update == 0) {
      const int block = std::min(cfg.steps_per_update, steps - step);
      const double h = block * cfg.dt;
      ControlEstimate est = estimate_control(ens, cfg.potential, cfg.schedule, h);
      ens.control = std::move(est.velocities);
      if (sinks.on_update) sinks.on_update({ens.t, est.ess, est.lp_cost});
    }
    for (int i = 0; i < cfg.n; ++i) {
      StreamRng rng(cfg.seed, rng_tag::kLangevinNoise, static_cast<std::uint64_t>(i),
                    static_cast<std::uint64_t>(step));
      for (int k = 0; k < d; ++k) noise(i, k) = rng.normal();
    }
    langevin_step(ens, cfg.potential, cfg.schedule, cfg.dt, cfg.lambda, noise);
    if (sinks.on_step) sinks.on_step((step + 1) * cfg.dt, ens.positions);
  }
}

Trajectory run_controlled_langevin(const LangevinConfig& cfg,
                                   const GibbsReference1D* mu0) {
  Trajectory traj;
  LangevinSinks sinks;
  sinks.on_step = [&](double t, const Matrix& x) {
    traj.times.push_back(t);
    traj.positions.push_back(x);
  };
  sinks.on_update = [&](const UpdateRecord& u) { traj.updates.push_back(u); };
  run_controlled_langevin(cfg, sinks, mu0);
  return traj;
}

}  // namespace canneal
