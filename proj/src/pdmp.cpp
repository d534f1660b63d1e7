#include "canneal/pdmp.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "canneal/langevin.hpp"

namespace canneal {

void PdmpConfig::validate() const {
  if (n < 1) throw std::invalid_argument("PdmpConfig: n must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("PdmpConfig: lambda must be > 0");
  if (refresh_rate < 0.0) {
    throw std::invalid_argument("PdmpConfig: refresh_rate must be >= 0");
  }
  if (!(h > 0.0)) throw std::invalid_argument("PdmpConfig: h must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("PdmpConfig: horizon must be > 0");
  if (horizon > schedule.horizon() * (1.0 + 1e-12)) {
    throw std::invalid_argument("PdmpConfig: horizon exceeds the schedule horizon");
  }
  if (thinning.lookahead < 0.0 || thinning.grid_points < 1 ||
      !(thinning.safety > 1.0)) {
    throw std::invalid_argument("PdmpConfig: bad thinning configuration");
  }
  if (out_grid < 2) throw std::invalid_argument("PdmpConfig: out_grid must be >= 2");
}

std::vector<double> reflect(std::span<const double> gradient,
                            std::span<const double> y) {
  if (gradient.size() != y.size()) {
    throw std::invalid_argument("reflect: dimension mismatch");
  }
  double g2 = 0.0;
  double gy = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    g2 += gradient[k] * gradient[k];
    gy += gradient[k] * y[k];
  }
  std::vector<double> out(y.begin(), y.end());
  if (g2 == 0.0) return out;
  const double c = 2.0 * gy / g2;
  for (std::size_t k = 0; k < y.size(); ++k) out[k] -= c * gradient[k];
  return out;
}

double bounce_rate(double t, std::span<const double> x, std::span<const double> y,
                   const Potential& potential, const CoolingSchedule& schedule) {
  const std::vector<double> grad = potential.gradient(x);
  double gy = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) gy += grad[k] * y[k];
  return std::max(0.0, schedule.beta(t) * gy);
}

void advance_flow(PdmpState& state, double s) {
  if (s < 0.0) throw std::invalid_argument("advance_flow: negative duration");
  const std::size_t n = state.positions.rows();
  const std::size_t d = state.positions.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      state.positions(i, k) += s * (state.directions(i, k) + state.control(i, k));
    }
  }
  state.t += s;
}

namespace {

// Records grid times in (t_from, t_to] by linear interpolation along the flow.
class GridRecorder {
 public:
  GridRecorder(int grid_size, double horizon, const PdmpSinks& sinks)
      : grid_size_(grid_size), horizon_(horizon), sinks_(sinks) {}

  double grid_time(int j) const {
    return horizon_ * static_cast<double>(j) / (grid_size_ - 1);
  }

  void record_initial(const PdmpState& state) {
    if (sinks_.on_grid) sinks_.on_grid(0.0, state.positions);
    next_ = 1;
  }

  void advance_through(const PdmpState& state, double s) {
    if (!sinks_.on_grid) return;
    const double t1 = state.t + s;
    while (next_ < grid_size_ && grid_time(next_) <= t1 + 1e-15) {
      const double tau = std::min(grid_time(next_), t1) - state.t;
      Matrix snap = state.positions;
      for (std::size_t i = 0; i < snap.rows(); ++i) {
        for (std::size_t k = 0; k < snap.cols(); ++k) {
          snap(i, k) += tau * (state.directions(i, k) + state.control(i, k));
        }
      }
      sinks_.on_grid(grid_time(next_), snap);
      ++next_;
    }
  }

 private:
  int grid_size_;
  double horizon_;
  const PdmpSinks& sinks_;
  int next_ = 1;
};

void check_finite(const PdmpState& state) {
  for (double v : state.positions.data()) {
    if (!(std::abs(v) < kDivergenceThreshold)) {
      throw DivergenceError(state.t, "run_controlled_pdmp: particle diverged at t=" +
                                         std::to_string(state.t));
    }
  }
}

}  // namespace

PdmpRunStats run_controlled_pdmp(const PdmpConfig& cfg, const PdmpSinks& sinks,
                                 const GibbsReference1D* mu0) {
  cfg.validate();
  const int d = cfg.potential.dim();
  const int n = cfg.n;

  std::optional<GibbsReference1D> own_mu0;
  if (cfg.init.kind == InitSpec::Kind::GibbsMu0 && mu0 == nullptr) {
    own_mu0.emplace(cfg.potential, cfg.schedule, Quad1DConfig{},
                    std::vector<double>{0.0});
    mu0 = &*own_mu0;
  }

  ThinningConfig thinning = cfg.thinning;
  if (thinning.lookahead <= 0.0) thinning.lookahead = cfg.h;

  PdmpState state;
  state.positions = sample_initial_positions(cfg.init, cfg.potential, n, cfg.seed, mu0);
  state.directions = Matrix(n, d);
  state.control = Matrix(n, d, 0.0);
  state.t = 0.0;
  for (int i = 0; i < n; ++i) {
    StreamRng rng(cfg.seed, rng_tag::kDirection, static_cast<std::uint64_t>(i));
    const std::vector<double> y = sample_direction(d, cfg.lambda, rng);
    for (int k = 0; k < d; ++k) state.directions(i, k) = y[k];
  }

  std::vector<StreamRng> bounce_rng;
  bounce_rng.reserve(n);
  for (int i = 0; i < n; ++i) {
    bounce_rng.emplace_back(cfg.seed, rng_tag::kBounce, static_cast<std::uint64_t>(i));
  }
  StreamRng refresh_rng(cfg.seed, rng_tag::kRefresh);

  PdmpRunStats stats;
  GridRecorder recorder(cfg.out_grid, cfg.horizon, sinks);
  recorder.record_initial(state);
  if (sinks.on_event) sinks.on_event(state, PdmpEventKind::Start);

  auto do_scheduled_update = [&](double h_eff) {
    Ensemble ens{state.positions, state.control, state.t};
    ControlEstimate est = estimate_control(ens, cfg.potential, cfg.schedule, h_eff);
    state.control = std::move(est.velocities);
    ++stats.scheduled_updates;
    if (sinks.on_update) sinks.on_update({state.t, est.ess, est.lp_cost});
    if (sinks.on_event) sinks.on_event(state, PdmpEventKind::Scheduled);
  };

  // Scheduled events fire at t_k = h k, starting at t = 0. With control off
  // they are no-ops, but the segment boundaries are kept identical so that a
  // controlled run whose estimates vanish (n = 1) consumes the exact same
  // random draws as the independent one.
  long next_sched = 1;
  if (cfg.control) do_scheduled_update(std::min(cfg.h, cfg.horizon));

  while (state.t < cfg.horizon) {
    const double t_sched = cfg.h * static_cast<double>(next_sched);
    const double t_star = std::min(cfg.horizon, t_sched);
    const double window = t_star - state.t;

    // Candidate bounce times, one per particle, along the current segment.
    int winner = -1;
    double delta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double* x0 = &state.positions(i, 0);
      const double* y0 = &state.directions(i, 0);
      const double* v0 = &state.control(i, 0);
      const double t0 = state.t;
      std::vector<double> xbuf(d);
      auto rate = [&, x0, y0, v0, t0](double s) {
        for (int k = 0; k < d; ++k) xbuf[k] = x0[k] + s * (y0[k] + v0[k]);
        return bounce_rate(t0 + s, xbuf, {y0, static_cast<std::size_t>(d)},
                           cfg.potential, cfg.schedule);
      };
      const EventTime et = sample_event_time(rate, window, thinning, bounce_rng[i]);
      stats.envelope_violations += et.envelope_violations;
      if (!et.beyond_horizon && et.time < delta) {
        delta = et.time;
        winner = i;
      }
    }
    bool refresh = false;
    if (cfg.refresh_rate > 0.0) {
      const double dr = refresh_rng.exponential(cfg.refresh_rate);
      if (dr < delta) {
        delta = dr;
        refresh = true;
        winner = -1;
      }
    }

    if (state.t + delta < t_star) {
      recorder.advance_through(state, delta);
      advance_flow(state, delta);
      check_finite(state);
      if (refresh) {
        const int i = static_cast<int>(refresh_rng.uniform_index(n));
        const std::vector<double> y = sample_direction(d, cfg.lambda, refresh_rng);
        for (int k = 0; k < d; ++k) state.directions(i, k) = y[k];
        ++stats.refreshes;
        if (sinks.on_event) sinks.on_event(state, PdmpEventKind::Refresh);
      } else {
        const std::vector<double> grad =
            cfg.potential.gradient(state.positions.row(winner));
        const std::vector<double> y =
            reflect(grad, state.directions.row(winner));
        for (int k = 0; k < d; ++k) state.directions(winner, k) = y[k];
        ++stats.bounces;
        if (sinks.on_event) sinks.on_event(state, PdmpEventKind::Bounce);
      }
    } else {
      recorder.advance_through(state, window);
      advance_flow(state, window);
      state.t = t_star;  // keep the event grid exact
      check_finite(state);
      if (t_star >= cfg.horizon) break;
      if (cfg.control) {
        do_scheduled_update(std::min(cfg.h, cfg.horizon - state.t));
      }
      ++next_sched;
    }
  }

  state.t = cfg.horizon;
  if (sinks.on_event) sinks.on_event(state, PdmpEventKind::End);
  return stats;
}

Trajectory run_controlled_pdmp(const PdmpConfig& cfg, const GibbsReference1D* mu0) {
  Trajectory traj;
  PdmpSinks sinks;
  sinks.on_grid = [&](double t, const Matrix& x) {
    traj.times.push_back(t);
    traj.positions.push_back(x);
  };
  sinks.on_update = [&](const UpdateRecord& u) { traj.updates.push_back(u); };
  run_controlled_pdmp(cfg, sinks, mu0);
  return traj;
}

}  // namespace canneal
