#include "aircomp/channel.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "aircomp/rng.hpp"

namespace aircomp {

void ChannelSet::validate() const {
  if (gains.rows() < 1 || gains.cols() < 1) {
    throw DimensionError("channel set needs n_r >= 1 and k_total >= 1");
  }
  if (!gains.allFinite()) {
    throw ConfigError("channel set contains non-finite entries");
  }
}

ChannelSet generate_channels(int k_total, int n_r, RngSeed seed) {
  if (k_total < 1 || n_r < 1) {
    throw DimensionError("generate_channels: k_total and n_r must be >= 1");
  }
  SplitMix64 rng(seed);
  ChannelSet out;
  out.gains.resize(n_r, k_total);
  for (int k = 0; k < k_total; ++k) {
    for (int a = 0; a < n_r; ++a) {
      out.gains(a, k) = rng.standard_complex_gaussian();
    }
  }
  return out;
}

ChannelSet normalize_channels(const ChannelSet& channels) {
  ChannelSet out = channels;
  for (int k = 0; k < out.k_total(); ++k) {
    const double norm = out.gains.col(k).norm();
    if (norm == 0.0) {
      throw ZeroVectorError("normalize_channels: user " + std::to_string(k) +
                            " has a zero channel");
    }
    out.gains.col(k) /= norm;
  }
  return out;
}

double pairwise_angle(const CVector& h_i, const CVector& h_j) {
  if (h_i.size() != h_j.size()) {
    throw DimensionError("pairwise_angle: vector lengths differ");
  }
  const double ni = h_i.norm();
  const double nj = h_j.norm();
  if (ni == 0.0 || nj == 0.0) {
    throw ZeroVectorError("pairwise_angle: zero channel vector");
  }
  const double cosine = std::clamp(std::abs(h_i.dot(h_j)) / (ni * nj), 0.0, 1.0);
  return std::acos(cosine);
}

AngleStats angle_stats(const ChannelSet& channels, const Schedule& subset) {
  if (subset.users.empty()) {
    throw ConfigError("angle_stats: empty subset");
  }
  subset.validate(channels.k_total());

  const int s = subset.size();
  AngleStats stats;
  stats.pairwise_angles = RMatrix::Zero(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      const double angle = pairwise_angle(channels.gains.col(subset.users[i]),
                                          channels.gains.col(subset.users[j]));
      stats.pairwise_angles(i, j) = angle;
      stats.pairwise_angles(j, i) = angle;
      stats.max_angle = std::max(stats.max_angle, angle);
    }
  }
  return stats;
}

nlohmann::json channel_set_to_json(const ChannelSet& channels) {
  nlohmann::json users = nlohmann::json::array();
  for (int k = 0; k < channels.k_total(); ++k) {
    nlohmann::json entries = nlohmann::json::array();
    for (int a = 0; a < channels.n_r(); ++a) {
      const Complex c = channels.gains(a, k);
      entries.push_back({c.real(), c.imag()});
    }
    users.push_back(std::move(entries));
  }
  return nlohmann::json{{"n_r", channels.n_r()}, {"channels", std::move(users)}};
}

ChannelSet channel_set_from_json(const nlohmann::json& doc) {
  const int n_r = doc.at("n_r").get<int>();
  const auto& users = doc.at("channels");
  if (n_r < 1 || users.empty()) {
    throw ConfigError("channel JSON needs n_r >= 1 and at least one user");
  }
  ChannelSet out;
  out.gains.resize(n_r, static_cast<Eigen::Index>(users.size()));
  for (Eigen::Index k = 0; k < out.gains.cols(); ++k) {
    const auto& entries = users.at(static_cast<std::size_t>(k));
    if (static_cast<int>(entries.size()) != n_r) {
      throw ConfigError("channel JSON: user " + std::to_string(k) +
                        " has wrong antenna count");
    }
    for (int a = 0; a < n_r; ++a) {
      const auto& pair = entries.at(static_cast<std::size_t>(a));
      out.gains(a, k) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  }
  out.validate();
  return out;
}

}  // namespace aircomp
