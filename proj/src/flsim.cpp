#include "aircomp/flsim.hpp"

#include <cmath>

#include "aircomp/rng.hpp"

namespace aircomp {

namespace {

constexpr double kClassMargin = 2.0;  // Bayes accuracy ~ Phi(2) on the mixture

/// Fixed unit direction separating the two classes, derived from the seed so
/// the whole task is reproducible.
RVector class_direction(int dim, RngSeed seed) {
  SplitMix64 rng(derive_seed(seed, 17));
  RVector u(dim);
  for (int i = 0; i < dim; ++i) u(i) = rng.normal();
  const double norm = u.norm();
  if (norm == 0.0) {
    u.setZero();
    u(0) = 1.0;
    return u;
  }
  return u / norm;
}

void fill_sample(RVector& x, int label, const RVector& direction,
                 SplitMix64& rng) {
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  x += (label == 1 ? kClassMargin : -kClassMargin) * direction;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double margin(const ModelVector& w, const RMatrix& features, Eigen::Index row) {
  const Eigen::Index d = features.cols();
  return features.row(row).dot(w.head(d)) + w(d);
}

}  // namespace

DataSplit data_split_from_string(const std::string& name) {
  if (name == "iid") return DataSplit::Iid;
  if (name == "label_skew") return DataSplit::LabelSkew;
  throw ConfigError("unknown data split: " + name);
}

std::string to_string(DataSplit split) {
  return split == DataSplit::Iid ? "iid" : "label_skew";
}

std::vector<LocalDataset> make_synthetic_task(int num_users,
                                              int samples_per_user, int dim,
                                              DataSplit split, RngSeed seed) {
  if (num_users < 1 || samples_per_user < 1 || dim < 2) {
    throw ConfigError("make_synthetic_task: need users >= 1, samples >= 1, dim >= 2");
  }
  const RVector direction = class_direction(dim, seed);

  std::vector<LocalDataset> users;
  users.reserve(static_cast<std::size_t>(num_users));
  for (int u = 0; u < num_users; ++u) {
    SplitMix64 rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(u)));
    LocalDataset data;
    data.owner = u;
    data.features.resize(samples_per_user, dim);
    data.labels.resize(samples_per_user);
    const int dominant = u % 2;
    RVector x(dim);
    for (int n = 0; n < samples_per_user; ++n) {
      int label;
      if (split == DataSplit::Iid) {
        label = rng.uniform01() < 0.5 ? 0 : 1;
      } else {
        label = rng.uniform01() < 0.9 ? dominant : 1 - dominant;
      }
      fill_sample(x, label, direction, rng);
      data.features.row(n) = x;
      data.labels(n) = label;
    }
    users.push_back(std::move(data));
  }
  return users;
}

double logistic_loss(const ModelVector& w, const RMatrix& features,
                     const Eigen::VectorXi& labels) {
  double total = 0.0;
  for (Eigen::Index n = 0; n < features.rows(); ++n) {
    const double z = margin(w, features, n);
    const double y = labels(n);
    // log(1 + e^z) - y z, evaluated stably.
    total += std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
  }
  return total / static_cast<double>(features.rows());
}

ModelVector logistic_gradient(const ModelVector& w, const RMatrix& features,
                              const Eigen::VectorXi& labels) {
  const Eigen::Index d = features.cols();
  ModelVector grad = ModelVector::Zero(d + 1);
  for (Eigen::Index n = 0; n < features.rows(); ++n) {
    const double err = sigmoid(margin(w, features, n)) - labels(n);
    grad.head(d) += err * features.row(n).transpose();
    grad(d) += err;
  }
  return grad / static_cast<double>(features.rows());
}

double classification_accuracy(const ModelVector& w, const RMatrix& features,
                               const Eigen::VectorXi& labels) {
  Eigen::Index correct = 0;
  for (Eigen::Index n = 0; n < features.rows(); ++n) {
    const int predicted = margin(w, features, n) >= 0.0 ? 1 : 0;
    if (predicted == labels(n)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(features.rows());
}

ModelVector local_update(const ModelVector& model, const LocalDataset& data,
                         double lr, int batches, int batch_size, RngSeed seed) {
  if (model.size() != data.features.cols() + 1) {
    throw DimensionError("local_update: model dimension mismatch");
  }
  const auto total = static_cast<std::uint64_t>(data.features.rows());
  SplitMix64 rng(seed);
  ModelVector w = model;
  RMatrix batch_x(batch_size, data.features.cols());
  Eigen::VectorXi batch_y(batch_size);
  for (int b = 0; b < batches; ++b) {
    for (int i = 0; i < batch_size; ++i) {
      const auto row = static_cast<Eigen::Index>(rng.bounded(total));
      batch_x.row(i) = data.features.row(row);
      batch_y(i) = data.labels(row);
    }
    w -= lr * logistic_gradient(w, batch_x, batch_y);
  }
  return w;
}

ModelVector noisy_aggregate(const std::vector<ModelVector>& models,
                            double mse_over_sigma2, double sigma2,
                            RngSeed seed) {
  if (models.empty()) {
    throw ConfigError("noisy_aggregate: empty model list");
  }
  if (mse_over_sigma2 < 0.0) {
    throw ConfigError("noisy_aggregate: negative mse level");
  }
  ModelVector sum = models.front();
  for (std::size_t i = 1; i < models.size(); ++i) {
    if (models[i].size() != sum.size()) {
      throw DimensionError("noisy_aggregate: model dimension mismatch");
    }
    sum += models[i];
  }
  const double noise_std = std::sqrt(mse_over_sigma2 * sigma2);
  if (noise_std > 0.0) {
    SplitMix64 rng(seed);
    for (Eigen::Index i = 0; i < sum.size(); ++i) {
      sum(i) += noise_std * rng.normal();
    }
  }
  return sum / static_cast<double>(models.size());
}

std::vector<double> run_federated(const ChannelSet& channels, MethodId method,
                                  const FlConfig& fl,
                                  const BeamConfig& beam_config, RngSeed seed,
                                  std::vector<double>* mse_log) {
  channels.validate();
  if (fl.rounds < 1 || fl.local_lr <= 0.0 || fl.server_lr <= 0.0) {
    throw ConfigError("run_federated: rounds >= 1 and positive learning rates required");
  }
  const int k_total = channels.k_total();
  if (fl.s < 1 || fl.s > k_total) {
    throw ConfigError("run_federated: subset size outside [1, k_total]");
  }

  const std::vector<LocalDataset> datasets = make_synthetic_task(
      k_total, fl.samples_per_user, fl.feature_dim, fl.split,
      derive_seed(seed, 1));

  // Held-out evaluation set drawn from the global mixture.
  const std::vector<LocalDataset> held_out =
      make_synthetic_task(1, 2000, fl.feature_dim, DataSplit::Iid,
                          derive_seed(seed, 2));
  const RMatrix& test_x = held_out.front().features;
  const Eigen::VectorXi& test_y = held_out.front().labels;

  ModelVector global = ModelVector::Zero(fl.feature_dim + 1);
  std::vector<double> accuracy_curve;
  accuracy_curve.reserve(static_cast<std::size_t>(fl.rounds));

  for (int round = 0; round < fl.rounds; ++round) {
    // Block fading: a fresh realization each round, the passed set for round 0.
    const ChannelSet round_channels =
        round == 0 ? channels
                   : generate_channels(k_total, channels.n_r(),
                                       derive_seed(seed, 10 + static_cast<std::uint64_t>(round)));
    const RngSeed method_seed =
        derive_seed(seed, 5000 + static_cast<std::uint64_t>(round));

    Schedule schedule;
    double mse_level;
    if (fl.mse_override.has_value()) {
      schedule = schedule_only(round_channels, method, fl.s, 5, beam_config,
                               method_seed);
      mse_level = *fl.mse_override;
    } else {
      MethodOutcome outcome =
          run_method(round_channels, method, fl.s, 5, beam_config, method_seed);
      schedule = std::move(outcome.schedule);
      mse_level = outcome.mse_over_sigma2;
    }
    if (mse_log != nullptr) mse_log->push_back(mse_level);

    std::vector<ModelVector> locals;
    locals.reserve(schedule.users.size());
    for (int u : schedule.users) {
      locals.push_back(local_update(
          global, datasets[static_cast<std::size_t>(u)], fl.local_lr,
          fl.local_batches, fl.batch_size,
          derive_seed(seed, 100000 + static_cast<std::uint64_t>(round) *
                                         static_cast<std::uint64_t>(k_total) +
                                         static_cast<std::uint64_t>(u))));
    }
    const ModelVector aggregated = noisy_aggregate(
        locals, mse_level, fl.sigma2,
        derive_seed(seed, 900000 + static_cast<std::uint64_t>(round)));
    global += fl.server_lr * (aggregated - global);
    accuracy_curve.push_back(classification_accuracy(global, test_x, test_y));
  }
  return accuracy_curve;
}

}  // namespace aircomp
