#include "aircomp/rng.hpp"

#include <cmath>
#include <numbers>

namespace aircomp {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double SplitMix64::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform01_positive() {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

std::pair<double, double> SplitMix64::normal_pair() {
  const double u1 = uniform01_positive();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

double SplitMix64::normal() { return normal_pair().first; }

Complex SplitMix64::standard_complex_gaussian() {
  const auto [re, im] = normal_pair();
  return Complex(re, im) * std::numbers::sqrt2 / 2.0;
}

std::uint64_t SplitMix64::bounded(std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

RngSeed derive_seed(RngSeed base, std::uint64_t stream) {
  return RngSeed{mix64(base.value ^ mix64(stream + 1))};
}

}  // namespace aircomp
