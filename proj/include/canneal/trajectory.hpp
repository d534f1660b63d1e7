#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "canneal/matrix.hpp"

namespace canneal {

// Raised when an integrator state leaves the finite range; the run aborts
// and the harness counts the failure.
struct DivergenceError : std::runtime_error {
  DivergenceError(double when, const std::string& what)
      : std::runtime_error(what), t(when) {}
  double t;
};

constexpr double kDivergenceThreshold = 1e8;

// A velocity re-estimation record: weight degeneracy and transport cost.
struct UpdateRecord {
  double t = 0.0;
  double ess = 0.0;
  double lp_cost = 0.0;
};

// Positions of the whole ensemble on a time grid, plus the per-update
// diagnostics. Both integrators emit this shape.
struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> positions;  // one n x d snapshot per grid time
  std::vector<UpdateRecord> updates;

  int n() const { return positions.empty() ? 0 : static_cast<int>(positions[0].rows()); }
  int dim() const {
    return positions.empty() ? 0 : static_cast<int>(positions[0].cols());
  }
};

// Initial-state sampler specification.
struct InitSpec {
  enum class Kind { GibbsMu0, Gaussian };
  Kind kind = Kind::GibbsMu0;
  std::vector<double> mean;  // Gaussian mean; scalar entries broadcast over dim
  double variance = 1.0;     // isotropic Gaussian variance

  static InitSpec gibbs_mu0() { return {}; }
  static InitSpec gaussian(std::vector<double> mean, double variance) {
    return {Kind::Gaussian, std::move(mean), variance};
  }
};

// Stream tags for the counter-based RNG keys; every random draw in the
// toolkit is keyed as (seed, tag, ...) so results are independent of
// scheduling and worker count.
namespace rng_tag {
constexpr std::uint64_t kInit = 1;
constexpr std::uint64_t kLangevinNoise = 2;
constexpr std::uint64_t kDirection = 3;
constexpr std::uint64_t kBounce = 4;
constexpr std::uint64_t kRefresh = 5;
constexpr std::uint64_t kReplicate = 6;
}  // namespace rng_tag

}  // namespace canneal
