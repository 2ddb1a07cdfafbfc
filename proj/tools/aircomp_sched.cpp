#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aircomp/experiment.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (const std::string& item : split_csv(text)) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw aircomp::ConfigError("flag --" + flag + ": '" + item +
                                 "' is not an integer");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AirComp federated-learning scheduling and beam steering experiments"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run one experiment from config/flags");

  std::string config_path;
  std::string experiment, methods, k_list, s_list, g_list, fl_split, out_path;
  int n_r = -1, s = -1, g = -1, trials = -1, threads = -1, fl_rounds = -1;
  double p_dbm = std::numeric_limits<double>::quiet_NaN();
  double fl_sigma2 = std::numeric_limits<double>::quiet_NaN();
  double fl_mse_override = std::numeric_limits<double>::quiet_NaN();
  std::int64_t seed = -1;

  run->add_option("--config", config_path, "JSON config file (flags override it)");
  run->add_option("--experiment", experiment,
                  "mse_vs_k|cdf|sweep_s|sweep_g|runtime|flsim|oracle_check");
  run->add_option("--k-list", k_list, "comma-separated user counts");
  run->add_option("--n-r", n_r, "aggregator antenna count");
  run->add_option("--s", s, "selected subset size");
  run->add_option("--g", g, "greedy candidate count");
  run->add_option("--p-dbm", p_dbm, "transmit power in dBm");
  run->add_option("--trials", trials, "Monte-Carlo trials per cell");
  run->add_option("--methods", methods, "comma-separated method names");
  run->add_option("--seed", seed, "base RNG seed");
  run->add_option("--out", out_path, "output CSV path");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");
  run->add_option("--s-list", s_list, "sweep_s cells");
  run->add_option("--g-list", g_list, "sweep_g cells");
  run->add_option("--fl-rounds", fl_rounds, "flsim: training rounds");
  run->add_option("--fl-sigma2", fl_sigma2, "flsim: channel noise power");
  run->add_option("--fl-split", fl_split, "flsim: iid|label_skew");
  run->add_option("--fl-mse-override", fl_mse_override,
                  "flsim: fixed mse/sigma^2 level (negative = solve per round)");

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json doc;
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) {
        throw aircomp::ConfigError("cannot open config file: " + config_path);
      }
      std::string text((std::istreambuf_iterator<char>(file)),
                       std::istreambuf_iterator<char>());
      if (!text.empty()) {
        doc = nlohmann::json::parse(text);
      }
    }
    aircomp::ExperimentConfig config = aircomp::config_from_json(doc);

    if (!experiment.empty()) {
      config.experiment = aircomp::experiment_from_string(experiment);
    }
    if (!k_list.empty()) config.k_list = parse_int_list(k_list, "k-list");
    if (n_r >= 0) config.n_r = n_r;
    if (s >= 0) config.s = s;
    if (g >= 0) config.g = g;
    if (!std::isnan(p_dbm)) config.p_dbm = p_dbm;
    if (trials >= 0) config.trials = trials;
    if (!methods.empty()) {
      config.methods.clear();
      for (const std::string& name : split_csv(methods)) {
        config.methods.push_back(aircomp::method_from_string(name));
      }
    }
    if (seed >= 0) config.seed.value = static_cast<std::uint64_t>(seed);
    if (!out_path.empty()) config.out_path = out_path;
    if (threads >= 0) config.threads = threads;
    if (!s_list.empty()) config.s_list = parse_int_list(s_list, "s-list");
    if (!g_list.empty()) config.g_list = parse_int_list(g_list, "g-list");
    if (fl_rounds >= 0) config.fl_rounds = fl_rounds;
    if (!std::isnan(fl_sigma2)) config.fl_sigma2 = fl_sigma2;
    if (!fl_split.empty()) config.fl_split = fl_split;
    if (!std::isnan(fl_mse_override)) config.fl_mse_override = fl_mse_override;

    config.validate();

    const aircomp::ExperimentOutput output = aircomp::run_experiment(config);
    if (config.experiment == aircomp::ExperimentKind::FlSim) {
      aircomp::write_fl_csv(config.out_path, output.fl_rows);
    } else {
      aircomp::write_rows_csv(config.out_path, output.rows);
    }
    aircomp::write_summary_json(config.out_path + ".summary.json",
                                output.summary);
    std::cout << "wrote " << config.out_path << " and "
              << config.out_path + ".summary.json" << '\n';
  } catch (const aircomp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
