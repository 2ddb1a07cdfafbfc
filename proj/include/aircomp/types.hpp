#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aircomp {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Seed for the deterministic generators; the same seed always reproduces
/// the same channels, subsets, and noise bit-exactly.
struct RngSeed {
  std::uint64_t value = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ZeroVectorError : public Error {
 public:
  using Error::Error;
};

class NonHermitianError : public Error {
 public:
  using Error::Error;
};

class InfiniteEtaError : public Error {
 public:
  using Error::Error;
};

class NoFeasibleTauError : public Error {
 public:
  using Error::Error;
};

class CombinatorialLimitError : public Error {
 public:
  using Error::Error;
};

class IterLimitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Ordered set of distinct user indices. Order records selection rank
/// (first element = first user picked); set semantics apply when two
/// schedules are compared for convergence.
struct Schedule {
  std::vector<int> users;

  int size() const { return static_cast<int>(users.size()); }
  bool contains(int k) const;
  std::vector<int> sorted() const;

  /// Throws ConfigError on duplicates or indices outside [0, k_total).
  void validate(int k_total) const;
};

bool same_user_set(const Schedule& a, const Schedule& b);

}  // namespace aircomp
