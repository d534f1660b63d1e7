#include "canneal/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace canneal {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& where, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse '" + value + "' as a real for " + where);
  }
}

long parse_long(const std::string& where, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse '" + value + "' as an integer for " + where);
  }
}

std::uint64_t parse_u64(const std::string& where, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse '" + value + "' as an unsigned integer for " +
                      where);
  }
}

bool parse_onoff(const std::string& where, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("config: expected on/off for " + where + ", got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& where, const std::string& value) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(value);
  while (in >> token) {
    if (!token.empty() && token.back() == ',') token.pop_back();
    if (token.empty()) continue;
    out.push_back(parse_double(where, token));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& where, const std::string& value) {
  std::vector<int> out;
  for (double v : parse_double_list(where, value)) out.push_back(static_cast<int>(v));
  return out;
}

}  // namespace

ConfigMap ConfigMap::from_string(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config: malformed section header at line " +
                          std::to_string(lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("config: empty section name at line " + std::to_string(lineno));
      }
      map.entries_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: empty key at line " + std::to_string(lineno));
    }
    if (section.empty()) {
      throw ConfigError("config: key '" + key + "' appears before any [section]");
    }
    map.entries_[section][key] = value;
  }
  return map;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

void ConfigMap::set_dotted(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("config: override must look like section.key=value, got '" +
                      assignment + "'");
  }
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    throw ConfigError("config: override key must be section.key, got '" + path + "'");
  }
  set(path.substr(0, dot), path.substr(dot + 1), value);
  overrides_.push_back(assignment);
}

void ConfigMap::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  entries_[section][key] = value;
}

std::optional<std::string> ConfigMap::take(const std::string& section,
                                           const std::string& key) {
  const auto sit = entries_.find(section);
  if (sit == entries_.end()) return std::nullopt;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return std::nullopt;
  consumed_[section][key] = true;
  return kit->second;
}

void ConfigMap::expect_all_consumed() const {
  for (const auto& [section, keys] : entries_) {
    for (const auto& [key, value] : keys) {
      const auto sit = consumed_.find(section);
      const bool used = sit != consumed_.end() && sit->second.count(key) > 0;
      if (!used) {
        throw ConfigError("config: unknown key '" + key + "' in section [" + section +
                          "]");
      }
    }
  }
}

Potential ExperimentSpec::make_potential() const {
  return builtin_potential(potential_name, dim, potential_params);
}

CoolingSchedule ExperimentSpec::make_schedule() const {
  return builtin_schedule(schedule_name, schedule_params, horizon);
}

LangevinConfig ExperimentSpec::make_langevin_config(std::uint64_t run_seed) const {
  LangevinConfig cfg{make_potential(), make_schedule()};
  cfg.n = lg_n;
  cfg.dt = lg_dt;
  cfg.steps_per_update = lg_k;
  cfg.lambda = lg_lambda;
  cfg.horizon = horizon;
  cfg.seed = run_seed;
  cfg.init = init;
  cfg.control = control;
  return cfg;
}

PdmpConfig ExperimentSpec::make_pdmp_config(std::uint64_t run_seed) const {
  PdmpConfig cfg{make_potential(), make_schedule()};
  cfg.n = pd_n;
  cfg.lambda = pd_lambda;
  cfg.refresh_rate = pd_refresh;
  cfg.h = pd_h;
  cfg.horizon = horizon;
  cfg.seed = run_seed;
  cfg.init = init;
  cfg.control = control;
  cfg.thinning = thinning;
  cfg.out_grid = pd_out_grid;
  return cfg;
}

ExperimentSpec resolve_spec(ConfigMap& map) {
  ExperimentSpec spec;
  auto take_d = [&](const char* s, const char* k, double& dst) {
    if (auto v = map.take(s, k)) dst = parse_double(std::string(s) + "." + k, *v);
  };
  auto take_i = [&](const char* s, const char* k, int& dst) {
    if (auto v = map.take(s, k)) {
      dst = static_cast<int>(parse_long(std::string(s) + "." + k, *v));
    }
  };
  auto take_b = [&](const char* s, const char* k, bool& dst) {
    if (auto v = map.take(s, k)) dst = parse_onoff(std::string(s) + "." + k, *v);
  };
  auto take_s = [&](const char* s, const char* k, std::string& dst) {
    if (auto v = map.take(s, k)) dst = *v;
  };

  take_s("run", "method", spec.method);
  take_b("run", "control", spec.control);
  take_i("run", "replicates", spec.replicates);
  if (auto v = map.take("run", "seed")) spec.seed = parse_u64("run.seed", *v);
  take_i("run", "workers", spec.workers);
  take_i("run", "failure_budget", spec.failure_budget);
  take_s("run", "trajectories", spec.trajectories);

  take_s("potential", "name", spec.potential_name);
  take_i("potential", "dim", spec.dim);
  if (auto v = map.take("potential", "params")) {
    spec.potential_params = parse_double_list("potential.params", *v);
  }

  take_s("schedule", "name", spec.schedule_name);
  if (auto v = map.take("schedule", "params")) {
    spec.schedule_params = parse_double_list("schedule.params", *v);
  }
  take_d("schedule", "horizon", spec.horizon);

  std::string init_kind = "gibbs_mu0";
  take_s("init", "kind", init_kind);
  if (init_kind == "gibbs_mu0") {
    spec.init.kind = InitSpec::Kind::GibbsMu0;
  } else if (init_kind == "gaussian") {
    spec.init.kind = InitSpec::Kind::Gaussian;
  } else {
    throw ConfigError("config: init.kind must be gibbs_mu0 or gaussian, got '" +
                      init_kind + "'");
  }
  if (auto v = map.take("init", "mean")) {
    spec.init.mean = parse_double_list("init.mean", *v);
  }
  take_d("init", "variance", spec.init.variance);

  take_i("langevin", "n", spec.lg_n);
  take_d("langevin", "dt", spec.lg_dt);
  take_i("langevin", "k", spec.lg_k);
  take_d("langevin", "lambda", spec.lg_lambda);

  take_i("pdmp", "n", spec.pd_n);
  take_d("pdmp", "lambda", spec.pd_lambda);
  take_d("pdmp", "refresh_rate", spec.pd_refresh);
  take_d("pdmp", "h", spec.pd_h);
  take_i("pdmp", "out_grid", spec.pd_out_grid);
  take_d("pdmp", "thin_lookahead", spec.thinning.lookahead);
  take_i("pdmp", "thin_grid", spec.thinning.grid_points);
  take_d("pdmp", "thin_safety", spec.thinning.safety);

  take_b("metrics", "w2", spec.metric_w2);
  take_i("metrics", "w2_quantiles", spec.w2_quantiles);
  take_b("metrics", "best_of_k", spec.metric_best_of_k);
  take_b("metrics", "histogram", spec.metric_histogram);
  take_i("metrics", "bins", spec.bins);
  take_d("metrics", "hist_lo", spec.hist_lo);
  take_d("metrics", "hist_hi", spec.hist_hi);
  take_b("metrics", "left_mass", spec.metric_left_mass);

  if (auto v = map.take("convergence", "n_list")) {
    spec.conv_n_list = parse_int_list("convergence.n_list", *v);
  }
  if (auto v = map.take("convergence", "h_list")) {
    spec.conv_h_list = parse_double_list("convergence.h_list", *v);
  }
  take_i("convergence", "replicates", spec.conv_replicates);

  take_i("gibbs_ref", "t_grid", spec.ref_t_grid);
  take_i("gibbs_ref", "x_grid", spec.ref_x_grid);
  take_d("gibbs_ref", "x_lo", spec.ref_x_lo);
  take_d("gibbs_ref", "x_hi", spec.ref_x_hi);

  map.expect_all_consumed();

  // Invariant checks with the offending key named.
  if (spec.method != "langevin" && spec.method != "pdmp") {
    throw ConfigError("config: run.method must be langevin or pdmp");
  }
  if (spec.replicates < 1) throw ConfigError("config: run.replicates must be >= 1");
  if (spec.workers < 0) throw ConfigError("config: run.workers must be >= 0");
  if (spec.failure_budget < 0) {
    throw ConfigError("config: run.failure_budget must be >= 0");
  }
  if (spec.trajectories != "auto" && spec.trajectories != "on" &&
      spec.trajectories != "off") {
    throw ConfigError("config: run.trajectories must be auto/on/off");
  }
  if (!(spec.lg_dt > 0.0)) throw ConfigError("config: langevin.dt must be > 0");
  if (spec.lg_k < 1) throw ConfigError("config: langevin.k must be >= 1");
  if (!(spec.lg_lambda > 0.0)) throw ConfigError("config: langevin.lambda must be > 0");
  if (spec.lg_n < 1) throw ConfigError("config: langevin.n must be >= 1");
  if (spec.pd_n < 1) throw ConfigError("config: pdmp.n must be >= 1");
  if (!(spec.pd_lambda > 0.0)) throw ConfigError("config: pdmp.lambda must be > 0");
  if (spec.pd_refresh < 0.0) throw ConfigError("config: pdmp.refresh_rate must be >= 0");
  if (!(spec.pd_h > 0.0)) throw ConfigError("config: pdmp.h must be > 0");
  if (!(spec.horizon > 0.0)) throw ConfigError("config: schedule.horizon must be > 0");
  if (spec.conv_replicates < 1) {
    throw ConfigError("config: convergence.replicates must be >= 1");
  }
  return spec;
}

}  // namespace canneal
