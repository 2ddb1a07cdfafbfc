#include "aircomp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "aircomp/rng.hpp"

namespace aircomp {

namespace {

struct Cell {
  int k = 0;
  int n_r = 0;
  int s = 0;
  int g = 0;
};

std::vector<Cell> make_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  switch (config.experiment) {
    case ExperimentKind::SweepS:
      for (int k : config.k_list) {
        for (int s : config.s_list) {
          cells.push_back({k, config.n_r, s, config.g});
        }
      }
      break;
    case ExperimentKind::SweepG:
      for (int k : config.k_list) {
        for (int g : config.g_list) {
          cells.push_back({k, config.n_r, config.s, g});
        }
      }
      break;
    default:
      for (int k : config.k_list) {
        cells.push_back({k, config.n_r, config.s, config.g});
      }
      break;
  }
  return cells;
}

std::vector<MethodId> effective_methods(const ExperimentConfig& config) {
  std::vector<MethodId> methods = config.methods;
  if (config.experiment == ExperimentKind::OracleCheck &&
      std::find(methods.begin(), methods.end(), MethodId::Oracle) ==
          methods.end()) {
    methods.insert(methods.begin(), MethodId::Oracle);
  }
  return methods;
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += (x - mean) * (x - mean);
  return std::sqrt(sum / static_cast<double>(xs.size() - 1));
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Empirical CDF sampled at 50 probability levels i/50, i = 1..50.
std::vector<double> cdf_quantiles(std::vector<double> xs) {
  std::vector<double> out;
  if (xs.empty()) return out;
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  out.reserve(50);
  for (int i = 1; i <= 50; ++i) {
    const auto idx = static_cast<std::size_t>(
        std::min(n - 1.0, std::ceil(n * static_cast<double>(i) / 50.0) - 1.0));
    out.push_back(xs[idx]);
  }
  return out;
}

struct TrialMeasurement {
  double objective = 0.0;
  double mse = 0.0;
  double wall_seconds = 0.0;
  bool solver_backed = false;
  bool surrogate_monotone = true;
  double rank1_ratio = 1.0;
};

TrialMeasurement measure_method(const ChannelSet& channels, MethodId method,
                                const Cell& cell, const BeamConfig& beam_config,
                                RngSeed method_seed, long long oracle_limit) {
  TrialMeasurement out;
  const auto start = std::chrono::steady_clock::now();
  const MethodOutcome outcome = run_method(channels, method, cell.s, cell.g,
                                           beam_config, method_seed, oracle_limit);
  const auto stop = std::chrono::steady_clock::now();
  out.wall_seconds = std::chrono::duration<double>(stop - start).count();
  out.objective = outcome.objective;
  out.mse = outcome.mse_over_sigma2;
  out.solver_backed = outcome.solver_backed;
  out.surrogate_monotone = outcome.surrogate_monotone;
  out.rank1_ratio = outcome.rank1_ratio;
  return out;
}

nlohmann::json summarize_solver_rows(
    const ExperimentConfig& config, const std::vector<Cell>& cells,
    const std::vector<MethodId>& methods, const std::vector<ResultRow>& rows,
    const std::vector<TrialMeasurement>& measurements) {
  nlohmann::json cells_json = nlohmann::json::array();
  const std::size_t trials = static_cast<std::size_t>(config.trials);
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      std::vector<double> mses, walls;
      int solver_runs = 0, surrogate_violations = 0, rank1_failures = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t idx = (mi * cells.size() + ci) * trials + t;
        mses.push_back(measurements[idx].mse);
        walls.push_back(measurements[idx].wall_seconds);
        if (measurements[idx].solver_backed) {
          ++solver_runs;
          if (!measurements[idx].surrogate_monotone) ++surrogate_violations;
          if (measurements[idx].rank1_ratio < 0.999) ++rank1_failures;
        }
      }
      const double mean = mean_of(mses);
      cells_json.push_back({{"method", to_string(methods[mi])},
                            {"k", cells[ci].k},
                            {"n_r", cells[ci].n_r},
                            {"s", cells[ci].s},
                            {"g", cells[ci].g},
                            {"trials", config.trials},
                            {"mean", mean},
                            {"std", stddev_of(mses, mean)},
                            {"wall_median", median_of(walls)},
                            {"cdf", cdf_quantiles(mses)},
                            {"solver_runs", solver_runs},
                            {"surrogate_violations", surrogate_violations},
                            {"rank1_below_threshold", rank1_failures}});
    }
  }

  nlohmann::json summary{{"experiment", to_string(config.experiment)},
                         {"cells", std::move(cells_json)}};

  if (config.experiment == ExperimentKind::OracleCheck) {
    // Per-trial domination of the oracle over every other method.
    nlohmann::json dominance;
    std::size_t oracle_index = methods.size();
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      if (methods[mi] == MethodId::Oracle) oracle_index = mi;
    }
    if (oracle_index < methods.size()) {
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        if (mi == oracle_index) continue;
        int violations = 0;
        double ratio_sum = 0.0;
        std::size_t count = 0;
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
          for (std::size_t t = 0; t < trials; ++t) {
            const std::size_t oi = (oracle_index * cells.size() + ci) * trials + t;
            const std::size_t hi = (mi * cells.size() + ci) * trials + t;
            if (measurements[hi].objective > measurements[oi].objective) {
              ++violations;
            }
            ratio_sum += measurements[hi].objective / measurements[oi].objective;
            ++count;
          }
        }
        dominance[to_string(methods[mi])] = {
            {"violations", violations},
            {"mean_objective_ratio",
             count == 0 ? 0.0 : ratio_sum / static_cast<double>(count)}};
      }
      summary["oracle_dominance"] = std::move(dominance);
    }
  }
  (void)rows;
  return summary;
}

ExperimentOutput run_flsim_experiment(const ExperimentConfig& config) {
  ExperimentOutput out;
  const int k = config.k_list.front();
  FlConfig fl;
  fl.rounds = config.fl_rounds;
  fl.s = config.s;
  fl.sigma2 = config.fl_sigma2;
  fl.split = data_split_from_string(config.fl_split);
  if (config.fl_mse_override >= 0.0) fl.mse_override = config.fl_mse_override;

  BeamConfig beam_config;
  beam_config.power = power_from_dbm(config.p_dbm);

  nlohmann::json curves = nlohmann::json::array();
  for (MethodId method : config.methods) {
    std::vector<double> finals;
    for (int trial = 0; trial < config.trials; ++trial) {
      const RngSeed tseed = trial_seed(config.seed, trial);
      const ChannelSet channels = generate_channels(k, config.n_r, tseed);
      std::vector<double> mse_log;
      const std::vector<double> curve = run_federated(
          channels, method, fl, beam_config, tseed, &mse_log);
      for (std::size_t r = 0; r < curve.size(); ++r) {
        out.fl_rows.push_back({static_cast<int>(r), to_string(method),
                               tseed.value, curve[r], mse_log[r]});
      }
      finals.push_back(curve.back());
    }
    const double mean = mean_of(finals);
    curves.push_back({{"method", to_string(method)},
                      {"mean_final_accuracy", mean},
                      {"std_final_accuracy", stddev_of(finals, mean)}});
  }
  out.summary = nlohmann::json{{"experiment", to_string(config.experiment)},
                               {"methods", std::move(curves)}};
  return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::MseVsK: return "mse_vs_k";
    case ExperimentKind::Cdf: return "cdf";
    case ExperimentKind::SweepS: return "sweep_s";
    case ExperimentKind::SweepG: return "sweep_g";
    case ExperimentKind::Runtime: return "runtime";
    case ExperimentKind::FlSim: return "flsim";
    case ExperimentKind::OracleCheck: return "oracle_check";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (ExperimentKind kind :
       {ExperimentKind::MseVsK, ExperimentKind::Cdf, ExperimentKind::SweepS,
        ExperimentKind::SweepG, ExperimentKind::Runtime, ExperimentKind::FlSim,
        ExperimentKind::OracleCheck}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown experiment name: " + name);
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (n_r < 1) throw ConfigError("n_r must be >= 1");
  if (s < 1) throw ConfigError("s must be >= 1");
  if (g < 1) throw ConfigError("g must be >= 1");
  if (k_list.empty()) throw ConfigError("k_list must be nonempty");
  if (methods.empty()) throw ConfigError("methods must be nonempty");
  for (int k : k_list) {
    if (k < s) {
      throw ConfigError("k_list entry " + std::to_string(k) +
                        " is smaller than s=" + std::to_string(s) +
                        " (k must be >= s)");
    }
  }
  if (experiment == ExperimentKind::SweepS) {
    for (int sv : s_list) {
      if (sv < 1) throw ConfigError("s_list entries must be >= 1");
      for (int k : k_list) {
        if (k < sv) {
          throw ConfigError("k_list entry " + std::to_string(k) +
                            " is smaller than s_list entry " +
                            std::to_string(sv));
        }
      }
    }
  }
  if (experiment == ExperimentKind::SweepG) {
    for (int gv : g_list) {
      if (gv < 1) throw ConfigError("g_list entries must be >= 1");
    }
  }
  if (fl_rounds < 1) throw ConfigError("fl_rounds must be >= 1");
  data_split_from_string(fl_split);
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig config;
  if (doc.is_null()) return config;
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "experiment") {
        config.experiment = experiment_from_string(value.get<std::string>());
      } else if (key == "k_list") {
        config.k_list = value.get<std::vector<int>>();
      } else if (key == "n_r") {
        config.n_r = value.get<int>();
      } else if (key == "s") {
        config.s = value.get<int>();
      } else if (key == "g") {
        config.g = value.get<int>();
      } else if (key == "p_dbm") {
        config.p_dbm = value.get<double>();
      } else if (key == "trials") {
        config.trials = value.get<int>();
      } else if (key == "methods") {
        config.methods.clear();
        for (const auto& name : value.get<std::vector<std::string>>()) {
          config.methods.push_back(method_from_string(name));
        }
      } else if (key == "seed") {
        config.seed.value = value.get<std::uint64_t>();
      } else if (key == "out_path") {
        config.out_path = value.get<std::string>();
      } else if (key == "threads") {
        config.threads = value.get<int>();
      } else if (key == "s_list") {
        config.s_list = value.get<std::vector<int>>();
      } else if (key == "g_list") {
        config.g_list = value.get<std::vector<int>>();
      } else if (key == "oracle_limit") {
        config.oracle_limit = value.get<long long>();
      } else if (key == "fl_rounds") {
        config.fl_rounds = value.get<int>();
      } else if (key == "fl_sigma2") {
        config.fl_sigma2 = value.get<double>();
      } else if (key == "fl_split") {
        config.fl_split = value.get<std::string>();
      } else if (key == "fl_mse_override") {
        config.fl_mse_override = value.get<double>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  std::vector<std::string> method_names;
  method_names.reserve(config.methods.size());
  for (MethodId m : config.methods) method_names.push_back(to_string(m));
  return nlohmann::json{{"experiment", to_string(config.experiment)},
                        {"k_list", config.k_list},
                        {"n_r", config.n_r},
                        {"s", config.s},
                        {"g", config.g},
                        {"p_dbm", config.p_dbm},
                        {"trials", config.trials},
                        {"methods", method_names},
                        {"seed", config.seed.value},
                        {"out_path", config.out_path},
                        {"threads", config.threads},
                        {"s_list", config.s_list},
                        {"g_list", config.g_list},
                        {"oracle_limit", config.oracle_limit},
                        {"fl_rounds", config.fl_rounds},
                        {"fl_sigma2", config.fl_sigma2},
                        {"fl_split", config.fl_split},
                        {"fl_mse_override", config.fl_mse_override}};
}

RngSeed trial_seed(RngSeed base, int trial) {
  return derive_seed(base, static_cast<std::uint64_t>(trial));
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment == ExperimentKind::FlSim) {
    return run_flsim_experiment(config);
  }

  const std::vector<Cell> cells = make_cells(config);
  const std::vector<MethodId> methods = effective_methods(config);
  const auto trials = static_cast<std::size_t>(config.trials);

  BeamConfig beam_config;
  beam_config.power = power_from_dbm(config.p_dbm);

  std::vector<TrialMeasurement> measurements(methods.size() * cells.size() *
                                             trials);

  // One task = one (cell, trial): all methods share the channel realization.
  struct Task {
    std::size_t cell;
    std::size_t trial;
  };
  std::vector<Task> tasks;
  tasks.reserve(cells.size() * trials);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t t = 0; t < trials; ++t) tasks.push_back({ci, t});
  }

  unsigned worker_count =
      config.threads > 0
          ? static_cast<unsigned>(config.threads)
          : std::max(1u, std::thread::hardware_concurrency());
  // Wall-time medians stay clean without core contention.
  if (config.experiment == ExperimentKind::Runtime) worker_count = 1;
  worker_count = std::min<unsigned>(worker_count,
                                    static_cast<unsigned>(tasks.size()));

  std::atomic<std::size_t> next_task{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t task_index = next_task.fetch_add(1);
      if (task_index >= tasks.size()) return;
      const Task task = tasks[task_index];
      const Cell& cell = cells[task.cell];
      try {
        const RngSeed tseed = trial_seed(config.seed, static_cast<int>(task.trial));
        const ChannelSet channels = generate_channels(cell.k, cell.n_r, tseed);
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
          const RngSeed method_seed = derive_seed(tseed, 7000 + mi);
          const std::size_t slot =
              (mi * cells.size() + task.cell) * trials + task.trial;
          measurements[slot] =
              measure_method(channels, methods[mi], cell, beam_config,
                             method_seed, config.oracle_limit);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(worker_count);
  for (unsigned i = 0; i < worker_count; ++i) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();
  if (first_error) std::rethrow_exception(first_error);

  ExperimentOutput out;
  out.rows.reserve(measurements.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t idx = (mi * cells.size() + ci) * trials + t;
        const TrialMeasurement& m = measurements[idx];
        out.rows.push_back({to_string(config.experiment),
                            to_string(methods[mi]), cells[ci].k, cells[ci].n_r,
                            cells[ci].s, cells[ci].g,
                            trial_seed(config.seed, static_cast<int>(t)).value,
                            m.objective, m.mse, m.wall_seconds});
      }
    }
  }
  out.summary =
      summarize_solver_rows(config, cells, methods, out.rows, measurements);
  return out;
}

void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot open output file: " + path);
  file << "experiment,method,k,n_r,s,g,trial_seed,objective,mse_over_sigma2,"
          "wall_time_seconds\n";
  for (const ResultRow& row : rows) {
    file << row.experiment << ',' << row.method << ',' << row.k << ','
         << row.n_r << ',' << row.s << ',' << row.g << ',' << row.trial_seed
         << ',' << format_double(row.objective) << ','
         << format_double(row.mse_over_sigma2) << ','
         << format_double(row.wall_time_seconds) << '\n';
  }
}

void write_fl_csv(const std::string& path, const std::vector<FlCurveRow>& rows) {
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot open output file: " + path);
  file << "round,method,seed,accuracy,mse_over_sigma2\n";
  for (const FlCurveRow& row : rows) {
    file << row.round << ',' << row.method << ',' << row.seed << ','
         << format_double(row.accuracy) << ','
         << format_double(row.mse_over_sigma2) << '\n';
  }
}

void write_summary_json(const std::string& path, const nlohmann::json& summary) {
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot open output file: " + path);
  file << summary.dump(2) << '\n';
}

}  // namespace aircomp
