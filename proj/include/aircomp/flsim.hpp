#pragma once

#include <optional>
#include <vector>

#include "aircomp/beam.hpp"
#include "aircomp/channel.hpp"
#include "aircomp/sched.hpp"
#include "aircomp/types.hpp"

namespace aircomp {

using ModelVector = RVector;

struct LocalDataset {
  RMatrix features;        // rows = samples
  Eigen::VectorXi labels;  // 0/1
  int owner = 0;
};

enum class DataSplit { Iid, LabelSkew };

DataSplit data_split_from_string(const std::string& name);
std::string to_string(DataSplit split);

struct FlConfig {
  int rounds = 100;
  double local_lr = 0.1;   // mu, per-user step size
  double server_lr = 0.5;  // aggregator step size
  int batch_size = 64;
  int s = 10;              // selected users per round
  double sigma2 = 1.0;     // channel noise power
  DataSplit split = DataSplit::Iid;
  int local_batches = 5;       // mini-batch steps per round per user
  int samples_per_user = 60;
  int feature_dim = 10;
  /// When set, every round uses this mse/sigma^2 instead of solving the
  /// scheduling/beam problem for it (paired noise-level studies).
  std::optional<double> mse_override;
};

/// Two-class Gaussian-mixture task. iid: uniform class mix per user;
/// label_skew: each user drawn 90% from one class. Deterministic per seed.
std::vector<LocalDataset> make_synthetic_task(int num_users,
                                              int samples_per_user, int dim,
                                              DataSplit split, RngSeed seed);

/// Mean logistic loss of w (last entry = bias) on the dataset.
double logistic_loss(const ModelVector& w, const RMatrix& features,
                     const Eigen::VectorXi& labels);

/// Analytic gradient of logistic_loss.
ModelVector logistic_gradient(const ModelVector& w, const RMatrix& features,
                              const Eigen::VectorXi& labels);

double classification_accuracy(const ModelVector& w, const RMatrix& features,
                               const Eigen::VectorXi& labels);

/// `batches` mini-batch gradient steps on the local logistic loss.
ModelVector local_update(const ModelVector& model, const LocalDataset& data,
                         double lr, int batches, int batch_size, RngSeed seed);

/// (sum of models + e) / S with e i.i.d. real Gaussian per coordinate,
/// std = sqrt(mse_over_sigma2 * sigma2). Exact average when the noise
/// level is zero.
ModelVector noisy_aggregate(const std::vector<ModelVector>& models,
                            double mse_over_sigma2, double sigma2,
                            RngSeed seed);

/// One federated run: per round, schedule via `method` on that round's
/// channel realization, update the selected users locally, aggregate over
/// the air with the round's mse/sigma^2, and record held-out accuracy.
/// When mse_log is given it receives the per-round mse/sigma^2 levels.
std::vector<double> run_federated(const ChannelSet& channels, MethodId method,
                                  const FlConfig& fl,
                                  const BeamConfig& beam_config, RngSeed seed,
                                  std::vector<double>* mse_log = nullptr);

}  // namespace aircomp
