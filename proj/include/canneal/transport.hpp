#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "canneal/matrix.hpp"

namespace canneal {

// Self-normalized annealing weights w_i proportional to
// exp(-energy_i * delta_beta), computed in log space.
struct AnnealWeights {
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  double operator[](std::size_t i) const { return w[i]; }
  // Effective sample size 1 / sum w_i^2.
  double ess() const;
};

AnnealWeights anneal_weights(std::span<const double> energies, double delta_beta);

// Pairwise squared Euclidean distances of the rows of `positions`.
Matrix cost_matrix(const Matrix& positions);

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A vertex solution of the discrete transport problem
//   min <C, G>  s.t.  G 1 = 1,  G^T 1 = n w,  G >= 0.
// Stored sparsely: a vertex has at most 2n - 1 nonzero cells.
class TransportPlan {
 public:
  struct Entry {
    int row;
    int col;
    double value;
  };

  TransportPlan(int n, std::vector<Entry> entries, double cost);

  int size() const { return n_; }
  double cost() const { return cost_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  Matrix dense() const;

  // Barycentric targets T(x_i) = sum_j G_ij x_j, one row per source point.
  Matrix barycentric_targets(const Matrix& positions) const;

 private:
  int n_;
  std::vector<Entry> entries_;
  double cost_;
};

// Exact transportation-simplex solve (north-west-corner start, Bland's
// anti-cycling pivot rule). `order_hint`, when given, is a permutation of
// {0..n-1} applied to rows and columns before building the initial basis; a
// position-sorted hint makes the start nearly optimal for one-dimensional
// point sets. The returned plan is always in original indices.
TransportPlan solve_transport_lp(const Matrix& cost, const AnnealWeights& weights,
                                 std::span<const int> order_hint = {});

// V_i = (sum_j G_ij x_j - x_i) / h.
Matrix barycentric_velocity(const TransportPlan& plan, const Matrix& positions,
                            double h);

// Moments (1/n) sum_i |T(x_i)|^order of the projected pushforward.
std::vector<double> pushforward_moments(const TransportPlan& plan,
                                        const Matrix& positions,
                                        std::span<const int> orders);

// Inverse empirical CDF of an ascending-sorted sample.
double empirical_quantile(std::span<const double> sorted, double u);

// Quantile-coupling W2 between a sorted empirical sample and a reference
// quantile function, on the midpoint grid u_j = (j - 1/2) / k.
double w2_empirical_1d(std::span<const double> sorted_samples,
                       const std::function<double(double)>& quantile, int k);

}  // namespace canneal
