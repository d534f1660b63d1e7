#pragma once

#include <functional>
#include <string>

#include "canneal/config.hpp"
#include "canneal/csv.hpp"
#include "canneal/experiments.hpp"

namespace canneal {

// Deterministic per-replicate seed derivation.
std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);

// Runs fn(0..count-1) on a pool of `workers` threads (0 = hardware
// concurrency). Exceptions are captured and rethrown on the caller.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

struct ReplicateSet {
  std::vector<Trajectory> runs;  // successful replicates, in replicate order
  std::vector<int> replicate_ids;
  int failures = 0;
};

// Runs `replicates` trajectories of the spec's method. `tweak` (optional)
// adjusts each replicate's config before the run (used by the convergence
// study to vary n and h). Shares a single exact mu0 sampler across
// replicates when the init kind asks for one.
ReplicateSet run_replicates(
    const ExperimentSpec& spec, int replicates, int workers,
    const std::function<void(LangevinConfig&)>& tweak_langevin = {},
    const std::function<void(PdmpConfig&)>& tweak_pdmp = {});

// Per-(n, h) mean time-averaged W2 with standard errors, replicates from
// spec.conv_replicates.
ConvergenceTable run_convergence_study(const ExperimentSpec& spec, int workers);

struct ManifestInfo {
  const ConfigMap* config = nullptr;
  std::uint64_t seed = 0;
  double wall_clock_sec = 0.0;
  int failures = 0;
};

// Writes `<csv_path minus .csv>.manifest.json` echoing the resolved
// configuration; every emitted CSV gets exactly one.
void write_manifest(const std::string& csv_path, const ManifestInfo& info);

void write_trajectories_csv(const std::string& path, const ReplicateSet& set);
void write_diagnostics_csv(const std::string& path, const ExperimentSpec& spec,
                           const ReplicateSet& set, const GibbsReference1D* ref);
void write_convergence_csv(const std::string& path, const ConvergenceTable& table);
void write_histogram_csv(const std::string& path, const ExperimentSpec& spec,
                         const ReplicateSet& set);
void write_gibbs_ref_csvs(const std::string& density_path, const std::string& stats_path,
                          const ExperimentSpec& spec);

const char* version_string();

}  // namespace canneal
