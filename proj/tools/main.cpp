#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "canneal/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  bool has_seed = false;
  std::uint64_t seed = 0;
  int workers = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Configuration file (key = value with [sections])");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--set", args.overrides, "Override a config entry, e.g. --set langevin.n=20")
      ->take_all();
  cmd->add_option("--seed", args.seed, "Random seed (overrides run.seed)")
      ->each([&args](const std::string&) { args.has_seed = true; });
  cmd->add_option("--workers", args.workers, "Worker threads (0 = hardware)");
}

canneal::ConfigMap load_config(const CommonArgs& args, const std::string& method) {
  canneal::ConfigMap map = args.config_path.empty()
                               ? canneal::ConfigMap::from_string("")
                               : canneal::ConfigMap::from_file(args.config_path);
  if (!method.empty()) map.set("run", "method", method);
  for (const auto& o : args.overrides) map.set_dotted(o);
  if (args.has_seed) map.set_dotted("run.seed=" + std::to_string(args.seed));
  if (args.workers >= 0) map.set_dotted("run.workers=" + std::to_string(args.workers));
  return map;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  std::filesystem::create_directories(args.out_dir);
  return (std::filesystem::path(args.out_dir) / name).string();
}

int run_method(const CommonArgs& args, const std::string& method) {
  const auto start = std::chrono::steady_clock::now();
  canneal::ConfigMap map = load_config(args, method);
  canneal::ExperimentSpec spec = canneal::resolve_spec(map);

  const canneal::ReplicateSet set =
      canneal::run_replicates(spec, spec.replicates, spec.workers);

  canneal::ManifestInfo info;
  info.config = &map;
  info.seed = spec.seed;
  info.failures = set.failures;
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };

  if (set.runs.empty()) {
    info.wall_clock_sec = elapsed();
    canneal::write_manifest(out_path(args, "diagnostics.csv"), info);
    std::cerr << "error: all replicates diverged\n";
    return kExitDivergence;
  }

  std::optional<canneal::GibbsReference1D> ref;
  if (spec.metric_w2 && set.runs[0].dim() == 1) {
    ref.emplace(spec.make_potential(), spec.make_schedule(), canneal::Quad1DConfig{},
                set.runs[0].times);
  }

  const std::string diag = out_path(args, "diagnostics.csv");
  canneal::write_diagnostics_csv(diag, spec, set, ref ? &*ref : nullptr);
  info.wall_clock_sec = elapsed();
  canneal::write_manifest(diag, info);

  if (spec.write_trajectories()) {
    const std::string traj = out_path(args, "trajectories.csv");
    canneal::write_trajectories_csv(traj, set);
    info.wall_clock_sec = elapsed();
    canneal::write_manifest(traj, info);
  }
  if (spec.metric_histogram && set.runs[0].dim() == 1) {
    const std::string hist = out_path(args, "histogram.csv");
    canneal::write_histogram_csv(hist, spec, set);
    info.wall_clock_sec = elapsed();
    canneal::write_manifest(hist, info);
  }

  if (set.failures > spec.failure_budget) {
    std::cerr << "error: " << set.failures << " replicate(s) diverged (budget "
              << spec.failure_budget << ")\n";
    return kExitDivergence;
  }
  return kExitOk;
}

int run_convergence(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  canneal::ConfigMap map = load_config(args, "");
  canneal::ExperimentSpec spec = canneal::resolve_spec(map);
  const canneal::ConvergenceTable table =
      canneal::run_convergence_study(spec, spec.workers);
  const std::string path = out_path(args, "convergence.csv");
  canneal::write_convergence_csv(path, table);
  canneal::ManifestInfo info;
  info.config = &map;
  info.seed = spec.seed;
  info.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  canneal::write_manifest(path, info);
  return kExitOk;
}

int run_gibbs_ref(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  canneal::ConfigMap map = load_config(args, "");
  canneal::ExperimentSpec spec = canneal::resolve_spec(map);
  const std::string density = out_path(args, "gibbs_density.csv");
  const std::string stats = out_path(args, "gibbs_stats.csv");
  canneal::write_gibbs_ref_csvs(density, stats, spec);
  canneal::ManifestInfo info;
  info.config = &map;
  info.seed = spec.seed;
  info.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  canneal::write_manifest(density, info);
  canneal::write_manifest(stats, info);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interacting-particle simulated annealing with transport-based control"};
  app.require_subcommand(1);

  CommonArgs lg_args, pd_args, conv_args, ref_args;
  CLI::App* lg = app.add_subcommand("langevin", "Controlled Langevin annealing runs");
  add_common(lg, lg_args);
  CLI::App* pd = app.add_subcommand("pdmp", "Controlled bouncy-particle annealing runs");
  add_common(pd, pd_args);
  CLI::App* conv = app.add_subcommand("convergence", "n x h convergence study");
  add_common(conv, conv_args);
  CLI::App* ref = app.add_subcommand("gibbs-ref", "Dump ground-truth curve tables");
  add_common(ref, ref_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (lg->parsed()) return run_method(lg_args, "langevin");
    if (pd->parsed()) return run_method(pd_args, "pdmp");
    if (conv->parsed()) return run_convergence(conv_args);
    if (ref->parsed()) return run_gibbs_ref(ref_args);
  } catch (const canneal::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const canneal::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
