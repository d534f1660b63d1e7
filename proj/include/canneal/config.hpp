#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "canneal/langevin.hpp"
#include "canneal/pdmp.hpp"

namespace canneal {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value configuration with [section] headers and '#' comments.
// Keys are tracked on consumption so misspelled or unknown keys are hard
// errors rather than silent defaults.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_string(const std::string& text);

  // "section.key=value" (command-line override form).
  void set_dotted(const std::string& assignment);
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::optional<std::string> take(const std::string& section, const std::string& key);
  // Throws ConfigError naming the first never-consumed key.
  void expect_all_consumed() const;

  const std::map<std::string, std::map<std::string, std::string>>& entries() const {
    return entries_;
  }
  const std::vector<std::string>& overrides() const { return overrides_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> entries_;
  mutable std::map<std::string, std::map<std::string, bool>> consumed_;
  std::vector<std::string> overrides_;
};

// Fully resolved experiment description; every field has a documented
// default so a minimal config stays small.
struct ExperimentSpec {
  std::string method = "langevin";  // langevin | pdmp
  bool control = true;
  int replicates = 1;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency
  int failure_budget = 0;
  std::string trajectories = "auto";  // auto | on | off

  std::string potential_name = "double_well";
  int dim = 1;
  std::vector<double> potential_params;
  std::string schedule_name = "quadratic";
  std::vector<double> schedule_params = {0.25, 25.0};
  double horizon = 1.0;

  InitSpec init;

  // Langevin parameters.
  int lg_n = 10;
  double lg_dt = 1e-3;
  int lg_k = 20;
  double lg_lambda = 1.0;

  // PDMP parameters.
  int pd_n = 10;
  double pd_lambda = 1.0;
  double pd_refresh = 1.0;
  double pd_h = 0.02;
  int pd_out_grid = 1001;
  ThinningConfig thinning;

  // Diagnostics.
  bool metric_w2 = true;
  int w2_quantiles = 256;
  bool metric_best_of_k = false;
  bool metric_histogram = false;
  int bins = 64;
  double hist_lo = -3.0;
  double hist_hi = 3.0;
  bool metric_left_mass = true;

  // Convergence study.
  std::vector<int> conv_n_list = {5, 40};
  std::vector<double> conv_h_list = {0.02};
  int conv_replicates = 200;

  // Ground-truth dump.
  int ref_t_grid = 101;
  int ref_x_grid = 201;
  double ref_x_lo = -3.0;
  double ref_x_hi = 3.0;

  Potential make_potential() const;
  CoolingSchedule make_schedule() const;
  LangevinConfig make_langevin_config(std::uint64_t run_seed) const;
  PdmpConfig make_pdmp_config(std::uint64_t run_seed) const;

  bool write_trajectories() const {
    if (trajectories == "on") return true;
    if (trajectories == "off") return false;
    return replicates <= 10;
  }
};

// Consumes the map and validates; throws ConfigError on unknown keys,
// unparsable values, or violated invariants (naming the offender).
ExperimentSpec resolve_spec(ConfigMap& map);

}  // namespace canneal
