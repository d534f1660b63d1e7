#include "canneal/runner.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "canneal/rng.hpp"

namespace canneal {

const char* version_string() { return "canneal 0.1.0"; }

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate) {
  StreamRng rng(base_seed, rng_tag::kReplicate, static_cast<std::uint64_t>(replicate));
  return rng.next_u64();
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

// A single shared exact initial sampler per replicate batch.
std::optional<GibbsReference1D> make_shared_mu0(const ExperimentSpec& spec) {
  if (spec.init.kind != InitSpec::Kind::GibbsMu0) return std::nullopt;
  return GibbsReference1D(spec.make_potential(), spec.make_schedule(), Quad1DConfig{},
                          std::vector<double>{0.0});
}

}  // namespace

ReplicateSet run_replicates(const ExperimentSpec& spec, int replicates, int workers,
                            const std::function<void(LangevinConfig&)>& tweak_langevin,
                            const std::function<void(PdmpConfig&)>& tweak_pdmp) {
  const std::optional<GibbsReference1D> mu0 = make_shared_mu0(spec);
  const GibbsReference1D* mu0_ptr = mu0 ? &*mu0 : nullptr;

  std::vector<std::optional<Trajectory>> slots(replicates);
  std::vector<char> failed(replicates, 0);

  parallel_for(replicates, workers, [&](int r) {
    try {
      if (spec.method == "langevin") {
        LangevinConfig cfg = spec.make_langevin_config(replicate_seed(spec.seed, r));
        if (tweak_langevin) tweak_langevin(cfg);
        slots[r] = run_controlled_langevin(cfg, mu0_ptr);
      } else {
        PdmpConfig cfg = spec.make_pdmp_config(replicate_seed(spec.seed, r));
        if (tweak_pdmp) tweak_pdmp(cfg);
        slots[r] = run_controlled_pdmp(cfg, mu0_ptr);
      }
    } catch (const DivergenceError&) {
      failed[r] = 1;
    }
  });

  ReplicateSet out;
  for (int r = 0; r < replicates; ++r) {
    if (failed[r]) {
      ++out.failures;
    } else {
      out.runs.push_back(std::move(*slots[r]));
      out.replicate_ids.push_back(r);
    }
  }
  return out;
}

ConvergenceTable run_convergence_study(const ExperimentSpec& spec, int workers) {
  ConvergenceTable table;
  for (int n : spec.conv_n_list) {
    for (double h : spec.conv_h_list) {
      ExperimentSpec sub = spec;
      sub.lg_n = n;
      sub.pd_n = n;
      sub.pd_h = h;
      if (spec.method == "langevin") {
        const int k = std::max(1, static_cast<int>(std::llround(h / spec.lg_dt)));
        sub.lg_k = k;
      }
      const ReplicateSet set =
          run_replicates(sub, spec.conv_replicates, workers);
      if (set.runs.empty()) {
        throw std::runtime_error("run_convergence_study: every replicate diverged");
      }
      // One reference-quantile table per (n, h) grid; all replicates share it.
      const GibbsReference1D ref(spec.make_potential(), spec.make_schedule(),
                                 Quad1DConfig{}, set.runs[0].times);
      const ReferenceQuantiles ref_q(ref, set.runs[0].times, spec.w2_quantiles);
      std::vector<double> w2bars(set.runs.size());
      parallel_for(static_cast<int>(set.runs.size()), workers, [&](int i) {
        w2bars[i] = time_averaged_w2(set.runs[i], ref_q);
      });
      table.push_back(aggregate_w2bar(n, h, w2bars));
    }
  }
  return table;
}

void write_manifest(const std::string& csv_path, const ManifestInfo& info) {
  std::string base = csv_path;
  if (base.size() > 4 && base.substr(base.size() - 4) == ".csv") {
    base = base.substr(0, base.size() - 4);
  }
  nlohmann::json j;
  j["version"] = version_string();
  j["seed"] = info.seed;
  j["wall_clock_sec"] = info.wall_clock_sec;
  j["failures"] = info.failures;
  if (info.config) {
    nlohmann::json cfg;
    for (const auto& [section, keys] : info.config->entries()) {
      for (const auto& [key, value] : keys) cfg[section][key] = value;
    }
    j["config"] = cfg;
    j["overrides"] = info.config->overrides();
  }
  const std::string path = base + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_manifest: cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write_manifest: write failed for " + path);
}

void write_trajectories_csv(const std::string& path, const ReplicateSet& set) {
  if (set.runs.empty()) throw std::invalid_argument("write_trajectories_csv: no runs");
  const int d = set.runs[0].dim();
  std::vector<std::string> header = {"replicate", "t", "particle"};
  for (int k = 0; k < d; ++k) header.push_back("coord_" + std::to_string(k));
  CsvWriter w(path, header);
  std::vector<CsvValue> row(3 + d);
  for (std::size_t r = 0; r < set.runs.size(); ++r) {
    const Trajectory& run = set.runs[r];
    for (std::size_t ti = 0; ti < run.times.size(); ++ti) {
      for (std::size_t i = 0; i < run.positions[ti].rows(); ++i) {
        row[0] = static_cast<long>(set.replicate_ids[r]);
        row[1] = run.times[ti];
        row[2] = static_cast<long>(i);
        for (int k = 0; k < d; ++k) row[3 + k] = run.positions[ti](i, k);
        w.row(row);
      }
    }
  }
  w.close();
}

void write_diagnostics_csv(const std::string& path, const ExperimentSpec& spec,
                           const ReplicateSet& set, const GibbsReference1D* ref) {
  if (set.runs.empty()) throw std::invalid_argument("write_diagnostics_csv: no runs");
  const std::vector<std::string> header = {"t", "metric", "value"};
  CsvWriter w(path, header);
  std::vector<CsvValue> row(3);
  auto emit = [&](double t, const std::string& metric, double value) {
    row[0] = t;
    row[1] = metric;
    row[2] = value;
    w.row(row);
  };

  const auto& grid = set.runs[0].times;
  const bool one_d = set.runs[0].dim() == 1;

  if (spec.metric_w2 && one_d && ref != nullptr) {
    const ReferenceQuantiles ref_q(*ref, grid, spec.w2_quantiles);
    for (const auto& [t, v] : marginal_w2_timeseries(set.runs, ref_q, grid)) {
      emit(t, "w2_pooled", v);
    }
    std::vector<double> w2bars(set.runs.size());
    for (std::size_t i = 0; i < set.runs.size(); ++i) {
      w2bars[i] = time_averaged_w2(set.runs[i], ref_q);
    }
    emit(grid.back(), "w2bar_mean", mean(w2bars));
    emit(grid.back(), "w2bar_se", standard_error(w2bars));
  }
  if (spec.metric_left_mass && one_d) {
    const std::vector<double> lm = mass_below_timeseries(set.runs, 0.0);
    for (std::size_t ti = 0; ti < grid.size(); ++ti) emit(grid[ti], "left_mass", lm[ti]);
  }
  if (spec.metric_best_of_k) {
    const Potential pot = spec.make_potential();
    for (const auto& [t, v] : best_of_k_timeseries(set.runs, pot)) {
      emit(t, "best_of_k", v);
    }
  }
  for (const auto& run : set.runs) {
    for (const auto& u : run.updates) {
      emit(u.t, "ess", u.ess);
      emit(u.t, "lp_cost", u.lp_cost);
    }
    break;  // per-update diagnostics from the first replicate only
  }
  w.close();
}

void write_convergence_csv(const std::string& path, const ConvergenceTable& table) {
  const std::vector<std::string> header = {"n", "h", "w2bar_mean", "w2bar_se",
                                           "replicates"};
  CsvWriter w(path, header);
  std::vector<CsvValue> row(5);
  for (const auto& r : table) {
    row[0] = static_cast<long>(r.n);
    row[1] = r.h;
    row[2] = r.w2bar_mean;
    row[3] = r.w2bar_se;
    row[4] = static_cast<long>(r.replicates);
    w.row(row);
  }
  w.close();
}

void write_histogram_csv(const std::string& path, const ExperimentSpec& spec,
                         const ReplicateSet& set) {
  const Matrix hist = histogram_export(set.runs, spec.bins, spec.hist_lo, spec.hist_hi);
  const std::vector<std::string> header = {"t", "bin_lo", "bin_hi", "mass"};
  CsvWriter w(path, header);
  const double width = (spec.hist_hi - spec.hist_lo) / spec.bins;
  std::vector<CsvValue> row(4);
  for (std::size_t ti = 0; ti < hist.rows(); ++ti) {
    for (int b = 0; b < spec.bins; ++b) {
      row[0] = set.runs[0].times[ti];
      row[1] = spec.hist_lo + b * width;
      row[2] = spec.hist_lo + (b + 1) * width;
      row[3] = hist(ti, b);
      w.row(row);
    }
  }
  w.close();
}

void write_gibbs_ref_csvs(const std::string& density_path, const std::string& stats_path,
                          const ExperimentSpec& spec) {
  std::vector<double> tgrid(spec.ref_t_grid);
  for (int i = 0; i < spec.ref_t_grid; ++i) {
    tgrid[i] = spec.horizon * static_cast<double>(i) / (spec.ref_t_grid - 1);
  }
  const GibbsReference1D ref(spec.make_potential(), spec.make_schedule(), Quad1DConfig{},
                             tgrid);
  {
    const std::vector<std::string> header = {"t", "x", "density"};
    CsvWriter w(density_path, header);
    std::vector<CsvValue> row(3);
    const Potential pot = spec.make_potential();
    for (double t : tgrid) {
      const double beta = ref.schedule().beta(t);
      const double z = ref.normalizer(t);
      for (int j = 0; j < spec.ref_x_grid; ++j) {
        const double x = spec.ref_x_lo + (spec.ref_x_hi - spec.ref_x_lo) *
                                             static_cast<double>(j) /
                                             (spec.ref_x_grid - 1);
        row[0] = t;
        row[1] = x;
        row[2] = std::exp(-beta * pot.value1d(x)) / z;
        w.row(row);
      }
    }
    w.close();
  }
  {
    const std::vector<std::string> header = {"t", "normalizer", "mean_potential",
                                             "metric_derivative", "left_mass"};
    CsvWriter w(stats_path, header);
    std::vector<CsvValue> row(5);
    for (double t : tgrid) {
      row[0] = t;
      row[1] = ref.normalizer(t);
      row[2] = ref.mean_potential(t);
      row[3] = ref.metric_derivative(t);
      row[4] = ref.mass_below(t, 0.0);
      w.row(row);
    }
    w.close();
  }
}

}  // namespace canneal
