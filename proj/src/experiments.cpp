#include "canneal/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "canneal/transport.hpp"

namespace canneal {

ReferenceQuantiles::ReferenceQuantiles(const GibbsReference1D& ref,
                                       std::span<const double> times, int k)
    : k_(k) {
  if (k < 1) throw std::invalid_argument("ReferenceQuantiles: k must be >= 1");
  table_.reserve(times.size());
  for (double t : times) {
    std::vector<double> q(k);
    for (int j = 1; j <= k; ++j) q[j - 1] = ref.quantile(t, (j - 0.5) / k);
    table_.push_back(std::move(q));
  }
}

double ReferenceQuantiles::w2(std::size_t time_index,
                              std::span<const double> sorted_samples) const {
  const auto& q = table_[time_index];
  double s = 0.0;
  for (int j = 1; j <= k_; ++j) {
    const double diff = empirical_quantile(sorted_samples, (j - 0.5) / k_) - q[j - 1];
    s += diff * diff;
  }
  return std::sqrt(s / k_);
}

namespace {

void check_one_dimensional(const std::vector<Trajectory>& runs) {
  for (const auto& r : runs) {
    if (r.dim() != 1) {
      throw std::invalid_argument("experiment diagnostic requires 1-d trajectories");
    }
  }
}

std::vector<double> sorted_slice(const Trajectory& run, std::size_t ti) {
  const Matrix& x = run.positions[ti];
  std::vector<double> v(x.data());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<std::pair<double, double>> marginal_w2_timeseries(
    const std::vector<Trajectory>& runs, const ReferenceQuantiles& ref_q,
    std::span<const double> grid) {
  if (runs.empty()) throw std::invalid_argument("marginal_w2_timeseries: no runs");
  check_one_dimensional(runs);
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (std::size_t ti = 0; ti < grid.size(); ++ti) {
    std::vector<double> pooled;
    for (const auto& run : runs) {
      const auto& x = run.positions[ti].data();
      pooled.insert(pooled.end(), x.begin(), x.end());
    }
    std::sort(pooled.begin(), pooled.end());
    out.emplace_back(grid[ti], ref_q.w2(ti, pooled));
  }
  return out;
}

std::vector<double> replicate_w2_series(const Trajectory& run,
                                        const ReferenceQuantiles& ref_q) {
  std::vector<double> out(run.times.size());
  for (std::size_t ti = 0; ti < run.times.size(); ++ti) {
    out[ti] = ref_q.w2(ti, sorted_slice(run, ti));
  }
  return out;
}

double time_averaged_w2(const Trajectory& run, const ReferenceQuantiles& ref_q) {
  if (run.times.size() < 2) {
    throw std::invalid_argument("time_averaged_w2: need at least two grid times");
  }
  const std::vector<double> w2 = replicate_w2_series(run, ref_q);
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < run.times.size(); ++i) {
    integral += 0.5 * (w2[i] + w2[i + 1]) * (run.times[i + 1] - run.times[i]);
  }
  const double span = run.times.back() - run.times.front();
  return integral / span;
}

ConvergenceRow aggregate_w2bar(int n, double h, std::span<const double> w2bars) {
  ConvergenceRow row;
  row.n = n;
  row.h = h;
  row.replicates = static_cast<int>(w2bars.size());
  row.w2bar_mean = mean(w2bars);
  row.w2bar_se = standard_error(w2bars);
  return row;
}

std::vector<std::pair<double, double>> best_of_k_timeseries(
    const std::vector<Trajectory>& runs, const Potential& potential) {
  if (runs.empty()) throw std::invalid_argument("best_of_k_timeseries: no runs");
  const std::size_t times = runs[0].times.size();
  std::vector<std::pair<double, double>> out;
  out.reserve(times);
  for (std::size_t ti = 0; ti < times; ++ti) {
    std::vector<double> best(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const Matrix& x = runs[r].positions[ti];
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < x.rows(); ++i) {
        m = std::min(m, potential.value(x.row(i)));
      }
      best[r] = m;
    }
    out.emplace_back(runs[0].times[ti], median(std::move(best)));
  }
  return out;
}

Matrix histogram_export(const std::vector<Trajectory>& runs, int bins, double lo,
                        double hi) {
  if (runs.empty()) throw std::invalid_argument("histogram_export: no runs");
  if (bins < 1 || !(hi > lo)) {
    throw std::invalid_argument("histogram_export: bad bin specification");
  }
  check_one_dimensional(runs);
  const std::size_t times = runs[0].times.size();
  Matrix hist(times, bins, 0.0);
  for (std::size_t ti = 0; ti < times; ++ti) {
    long count = 0;
    for (const auto& run : runs) {
      for (double x : run.positions[ti].data()) {
        int b = static_cast<int>(std::floor((x - lo) / (hi - lo) * bins));
        b = std::clamp(b, 0, bins - 1);
        hist(ti, b) += 1.0;
        ++count;
      }
    }
    for (int b = 0; b < bins; ++b) hist(ti, b) /= static_cast<double>(count);
  }
  return hist;
}

std::vector<double> mass_below_timeseries(const std::vector<Trajectory>& runs,
                                          double x0) {
  if (runs.empty()) throw std::invalid_argument("mass_below_timeseries: no runs");
  check_one_dimensional(runs);
  const std::size_t times = runs[0].times.size();
  std::vector<double> out(times, 0.0);
  for (std::size_t ti = 0; ti < times; ++ti) {
    long below = 0;
    long total = 0;
    for (const auto& run : runs) {
      for (double x : run.positions[ti].data()) {
        below += x < x0 ? 1 : 0;
        ++total;
      }
    }
    out[ti] = static_cast<double>(below) / static_cast<double>(total);
  }
  return out;
}

double final_mass_below(const std::vector<Trajectory>& runs, double x0) {
  return mass_below_timeseries(runs, x0).back();
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace canneal
