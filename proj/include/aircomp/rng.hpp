#pragma once

#include <cstdint>
#include <utility>

#include "aircomp/types.hpp"

namespace aircomp {

/// SplitMix64 generator (Steele, Lea, Flood 2014). Chosen because the whole
/// sequence is a pure function of the 64-bit seed, so published CSVs can be
/// regenerated bit-exactly. Gaussians come from Box-Muller on explicit
/// uniform draws; no hidden state beyond the 64-bit counter.
class SplitMix64 {
 public:
  explicit SplitMix64(RngSeed seed) : state_(seed.value) {}

  std::uint64_t next();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform in (0, 1]; safe as the log argument in Box-Muller.
  double uniform01_positive();

  /// One standard normal draw (consumes one Box-Muller pair).
  double normal();

  /// Two independent standard normals from one Box-Muller transform.
  std::pair<double, double> normal_pair();

  /// Circularly-symmetric complex Gaussian, zero mean, unit power:
  /// real and imaginary parts each N(0, 1/2).
  Complex standard_complex_gaussian();

  /// Uniform integer in [0, n), rejection sampling (no modulo bias).
  std::uint64_t bounded(std::uint64_t n);

 private:
  std::uint64_t state_;
};

/// SplitMix64 finalizer; used as the documented hash for seed derivation.
std::uint64_t mix64(std::uint64_t x);

/// Derived stream seed: mix64(base ^ mix64(stream + 1)). Adding streams
/// never perturbs earlier ones.
RngSeed derive_seed(RngSeed base, std::uint64_t stream);

}  // namespace aircomp
