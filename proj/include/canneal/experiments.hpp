#pragma once

#include <span>
#include <utility>
#include <vector>

#include "canneal/gibbs1d.hpp"
#include "canneal/matrix.hpp"
#include "canneal/potential.hpp"
#include "canneal/trajectory.hpp"

namespace canneal {

// Reference quantiles of the Gibbs curve tabulated on (time grid) x (rank
// grid u_j = (j - 1/2) / k); evaluating them once makes the W2 diagnostics
// cheap across many replicates.
class ReferenceQuantiles {
 public:
  ReferenceQuantiles(const GibbsReference1D& ref, std::span<const double> times,
                     int k);

  int k() const { return k_; }
  std::size_t time_count() const { return table_.size(); }
  std::span<const double> at(std::size_t time_index) const { return table_[time_index]; }

  // Quantile-coupling W2 between an ascending-sorted sample and the
  // reference at the given grid time.
  double w2(std::size_t time_index, std::span<const double> sorted_samples) const;

 private:
  int k_;
  std::vector<std::vector<double>> table_;
};

// Pools every replicate's particles at each grid time and measures the
// W2 distance of the pooled empirical measure to the reference.
std::vector<std::pair<double, double>> marginal_w2_timeseries(
    const std::vector<Trajectory>& runs, const ReferenceQuantiles& ref_q,
    std::span<const double> grid);

// Per-replicate W2(t), for variance diagnostics.
std::vector<double> replicate_w2_series(const Trajectory& run,
                                        const ReferenceQuantiles& ref_q);

// Time-averaged W2 of one replicate by the trapezoid rule on its grid.
double time_averaged_w2(const Trajectory& run, const ReferenceQuantiles& ref_q);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double w2bar_mean = 0.0;
  double w2bar_se = 0.0;
  int replicates = 0;
};
using ConvergenceTable = std::vector<ConvergenceRow>;

ConvergenceRow aggregate_w2bar(int n, double h, std::span<const double> w2bars);

// Median across replicates of the ensemble-minimum objective, per grid time.
std::vector<std::pair<double, double>> best_of_k_timeseries(
    const std::vector<Trajectory>& runs, const Potential& potential);

// Averaged empirical densities: one row per grid time, one column per bin;
// out-of-range mass is clamped into the edge bins so each row sums to one.
Matrix histogram_export(const std::vector<Trajectory>& runs, int bins, double lo,
                        double hi);

// Fraction of particle coordinates below x0, per grid time (1-d runs).
std::vector<double> mass_below_timeseries(const std::vector<Trajectory>& runs,
                                          double x0);
double final_mass_below(const std::vector<Trajectory>& runs, double x0);

double median(std::vector<double> values);
double mean(std::span<const double> values);
// Standard error of the mean.
double standard_error(std::span<const double> values);

}  // namespace canneal
