#pragma once

#include <cmath>

#include <nlohmann/json_fwd.hpp>

#include "aircomp/types.hpp"

namespace aircomp {

/// The K complex channel vectors between users and the aggregator,
/// stored column-wise: gains.col(k) is h_k (n_r coefficients).
struct ChannelSet {
  CMatrix gains;

  int n_r() const { return static_cast<int>(gains.rows()); }
  int k_total() const { return static_cast<int>(gains.cols()); }
  auto channel(int k) const { return gains.col(k); }

  /// Throws on empty dimensions or non-finite entries.
  void validate() const;
};

/// i.i.d. circularly-symmetric complex Gaussian channels with unit power
/// (real/imaginary parts each variance 1/2). Deterministic per seed.
ChannelSet generate_channels(int k_total, int n_r, RngSeed seed);

/// Copy with every channel scaled to unit norm. Callers choose between raw
/// unit-power sets (experiments) and normalized sets (angle analysis).
ChannelSet normalize_channels(const ChannelSet& channels);

/// |m^H h|, the receive projection magnitude. Phase-invariant in both
/// arguments. Throws DimensionError on length mismatch.
template <typename DerivedM, typename DerivedH>
double projection_magnitude(const Eigen::MatrixBase<DerivedM>& m,
                            const Eigen::MatrixBase<DerivedH>& h) {
  if (m.size() != h.size()) {
    throw DimensionError("projection_magnitude: vector lengths differ");
  }
  return std::abs(m.dot(h));
}

/// arccos(|h_i^H h_j| / (||h_i|| ||h_j||)) in [0, pi/2]; the argument is
/// clamped to [0, 1] against floating-point overshoot.
/// Throws ZeroVectorError when either input has zero norm.
double pairwise_angle(const CVector& h_i, const CVector& h_j);

struct AngleStats {
  RMatrix pairwise_angles;  // |subset| x |subset|, radians, zero diagonal
  double max_angle = 0.0;   // max off-diagonal entry (0 for singletons)
};

/// All pairwise angles over the subset plus their maximum.
/// Throws ConfigError on an empty or out-of-range subset.
AngleStats angle_stats(const ChannelSet& channels, const Schedule& subset);

/// JSON schema: {"n_r": int, "channels": [[[re, im], ...], ...]}.
nlohmann::json channel_set_to_json(const ChannelSet& channels);
ChannelSet channel_set_from_json(const nlohmann::json& doc);

}  // namespace aircomp
