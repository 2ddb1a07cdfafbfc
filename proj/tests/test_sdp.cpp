#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "aircomp/eig.hpp"
#include "aircomp/rng.hpp"
#include "aircomp/sdp.hpp"

using namespace aircomp;

namespace {

CMatrix random_channels(int n_r, int s, RngSeed seed) {
  SplitMix64 rng(seed);
  CMatrix h(n_r, s);
  for (int k = 0; k < s; ++k) {
    for (int a = 0; a < n_r; ++a) h(a, k) = rng.standard_complex_gaussian();
  }
  return h;
}

/// Brute-force oracle for 2x2 instances: parameterize the Hermitian matrix
/// M = [[a, b+ic], [b-ic, 1-a]] and grid over (a, b, c) with a feasibility
/// filter (PSD iff a(1-a) >= b^2 + c^2 on the unit-trace slice).
double grid_search_objective(const CMatrix& h, double tau, const CVector& v) {
  const int steps = 200;
  double best = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia <= steps; ++ia) {
    const double a = static_cast<double>(ia) / steps;
    for (int ib = -steps / 2; ib <= steps / 2; ++ib) {
      const double b = static_cast<double>(ib) / steps;
      for (int ic = -steps / 2; ic <= steps / 2; ++ic) {
        const double c = static_cast<double>(ic) / steps;
        if (a * (1.0 - a) + 1e-12 < b * b + c * c) continue;
        CMatrix m(2, 2);
        m(0, 0) = Complex(a, 0);
        m(0, 1) = Complex(b, c);
        m(1, 0) = Complex(b, -c);
        m(1, 1) = Complex(1.0 - a, 0);
        bool feasible = true;
        for (Eigen::Index k = 0; k < h.cols(); ++k) {
          const double val = (h.col(k).adjoint() * m * h.col(k)).value().real();
          if (val + 1e-12 < tau) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        const double obj = 1.0 - (v.adjoint() * m * v).value().real();
        best = std::min(best, obj);
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("single user at tau = ||h||^2 pins M to the matched rank-one matrix") {
  CMatrix h(3, 1);
  h << Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.0);
  REQUIRE(h.col(0).squaredNorm() == doctest::Approx(1.0));

  DcSubproblem problem{h, 1.0, h.col(0)};
  const SdpSolution sol = solve_subproblem(problem, SdpSolverConfig{});
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-4));
  CHECK((sol.matrix.entries - h.col(0) * h.col(0).adjoint()).norm() < 1e-3);
  CHECK(sol.max_constraint_violation <= 1e-6);
}

TEST_CASE("single user with tau above ||h||^2 is infeasible") {
  CMatrix h(3, 1);
  h << Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.0);
  DcSubproblem problem{h, 1.5, h.col(0)};
  const SdpSolution sol = solve_subproblem(problem, SdpSolverConfig{});
  CHECK(sol.status == SdpStatus::Infeasible);
}

TEST_CASE("two orthonormal users match the grid-search oracle") {
  CMatrix h = CMatrix::Identity(2, 2);
  CVector v(2);
  v << Complex(1 / std::numbers::sqrt2, 0), Complex(1 / std::numbers::sqrt2, 0);

  DcSubproblem problem{h, 0.5, v};
  const SdpSolution sol = solve_subproblem(problem, SdpSolverConfig{});
  const double oracle = grid_search_objective(h, 0.5, v);
  CHECK(sol.status == SdpStatus::Optimal);
  CHECK(std::abs(sol.objective - oracle) < 1e-3);
}

TEST_CASE("random 2x2 instances never beat the oracle and stay near it") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const CMatrix h = random_channels(2, 2 + static_cast<int>(seed % 2),
                                      RngSeed{800 + seed});
    double tau_up = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < h.cols(); ++k) {
      tau_up = std::min(tau_up, h.col(k).squaredNorm());
    }
    const double tau = 0.35 * tau_up;

    SplitMix64 rng(RngSeed{900 + seed});
    CVector v(2);
    v << rng.standard_complex_gaussian(), rng.standard_complex_gaussian();
    v /= v.norm();

    DcSubproblem problem{h, tau, v};
    const SdpSolution sol = solve_subproblem(problem, SdpSolverConfig{});
    if (sol.status != SdpStatus::Optimal) continue;
    const double oracle = grid_search_objective(h, tau, v);
    CHECK(sol.objective >= oracle - 1e-3);
    CHECK(sol.objective <= oracle + 2e-3);
  }
}

TEST_CASE("returned matrix is Hermitian PSD with unit trace regardless of status") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const CMatrix h = random_channels(4, 3, RngSeed{100 + seed});
    double tau_up = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < h.cols(); ++k) {
      tau_up = std::min(tau_up, h.col(k).squaredNorm());
    }
    // Mix of feasible and infeasible levels.
    const double tau = (seed % 2 == 0) ? 0.4 * tau_up : 1.4 * tau_up;

    SplitMix64 rng(RngSeed{200 + seed});
    CVector v(4);
    for (int i = 0; i < 4; ++i) v(i) = rng.standard_complex_gaussian();
    v /= v.norm();

    SdpSolverConfig config;
    config.max_iters = 2000;
    const SdpSolution sol = solve_subproblem(DcSubproblem{h, tau, v}, config);
    CHECK(sol.matrix.satisfies_invariants());
    if (sol.status == SdpStatus::Optimal) {
      CHECK(sol.max_constraint_violation <= config.feas_tol);
      CHECK(sol.matrix.trace() == doctest::Approx(1.0).epsilon(1e-5));
    }
  }
}

TEST_CASE("feasibility is monotone in tau") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CMatrix h = random_channels(3, 3, RngSeed{300 + seed});
    double tau_up = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < h.cols(); ++k) {
      tau_up = std::min(tau_up, h.col(k).squaredNorm());
    }
    SplitMix64 rng(RngSeed{400 + seed});
    CVector v(3);
    for (int i = 0; i < 3; ++i) v(i) = rng.standard_complex_gaussian();
    v /= v.norm();

    const double tau_hi = 0.6 * tau_up;
    const double tau_lo = 0.3 * tau_up;
    const SdpSolution hi =
        solve_subproblem(DcSubproblem{h, tau_hi, v}, SdpSolverConfig{});
    if (hi.status == SdpStatus::Optimal) {
      const SdpSolution lo =
          solve_subproblem(DcSubproblem{h, tau_lo, v}, SdpSolverConfig{});
      CHECK(lo.status == SdpStatus::Optimal);
    }
  }
}

TEST_CASE("dimension and parameter validation") {
  CMatrix h = CMatrix::Identity(3, 2);
  CVector v = CVector::Ones(2);  // wrong length
  CHECK_THROWS_AS(solve_subproblem(DcSubproblem{h, 0.5, v}, SdpSolverConfig{}),
                  DimensionError);
  CHECK_THROWS_AS(
      solve_subproblem(DcSubproblem{h, -0.1, CVector{}}, SdpSolverConfig{}),
      ConfigError);
}

TEST_CASE("trace flag dumps an iterate trajectory") {
  CMatrix h = CMatrix::Identity(2, 2);
  CVector v(2);
  v << Complex(1, 0), Complex(0, 0);
  std::ostringstream trace;
  SdpSolverConfig config;
  config.trace = &trace;
  solve_subproblem(DcSubproblem{h, 0.25, v}, config);
  CHECK(trace.str().find(',') != std::string::npos);
}
