#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aircomp/flsim.hpp"
#include "aircomp/sched.hpp"
#include "aircomp/types.hpp"

namespace aircomp {

enum class ExperimentKind {
  MseVsK,
  Cdf,
  SweepS,
  SweepG,
  Runtime,
  FlSim,
  OracleCheck,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::MseVsK;
  std::vector<int> k_list = {20, 50, 100, 150, 200};
  int n_r = 8;
  int s = 10;
  int g = 5;
  double p_dbm = 0.0;
  int trials = 50;
  std::vector<MethodId> methods = {MethodId::Iterative, MethodId::Policy,
                                   MethodId::PolicyGreedy,
                                   MethodId::RandomSelection};
  RngSeed seed{1};
  std::string out_path = "results.csv";
  int threads = 0;  // 0 = hardware concurrency

  std::vector<int> s_list = {5, 10, 20};     // sweep_s cells
  std::vector<int> g_list = {1, 3, 5, 10};   // sweep_g cells
  long long oracle_limit = 10000;

  // flsim experiment knobs
  int fl_rounds = 100;
  double fl_sigma2 = 1.0;
  std::string fl_split = "iid";
  double fl_mse_override = -1.0;  // < 0 means "solve per round"

  void validate() const;  // throws ConfigError naming the offending field
};

/// One emitted measurement. The CSV header is exactly these field names.
struct ResultRow {
  std::string experiment;
  std::string method;
  int k = 0;
  int n_r = 0;
  int s = 0;
  int g = 0;
  std::uint64_t trial_seed = 0;
  double objective = 0.0;
  double mse_over_sigma2 = 0.0;
  double wall_time_seconds = 0.0;
};

/// flsim experiment rows (its CSV schema differs from ResultRow).
struct FlCurveRow {
  int round = 0;
  std::string method;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double mse_over_sigma2 = 0.0;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<FlCurveRow> fl_rows;  // populated by the flsim experiment only
  nlohmann::json summary;  // per-cell mean/std/CDF + solver property counters
};

/// Build a config from a flat JSON object; unknown keys, type mismatches and
/// invariant violations raise ConfigError with the key name.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Runs one experiment: one row per (method, parameter cell, trial), channels
/// regenerated per trial from derive_seed(seed, trial), trials dispatched to a
/// worker pool with deterministic row order. Wall time wraps only the
/// scheduling+beam call.
ExperimentOutput run_experiment(const ExperimentConfig& config);

void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows);
void write_fl_csv(const std::string& path, const std::vector<FlCurveRow>& rows);
void write_summary_json(const std::string& path, const nlohmann::json& summary);

/// Per-trial seed: derive_seed(base, trial) — adding trials never perturbs
/// earlier ones.
RngSeed trial_seed(RngSeed base, int trial);

}  // namespace aircomp
