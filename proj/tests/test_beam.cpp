#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aircomp/beam.hpp"
#include "aircomp/channel.hpp"
#include "aircomp/eig.hpp"
#include "aircomp/rng.hpp"

using namespace aircomp;

namespace {

Schedule all_users(const ChannelSet& set) {
  Schedule s;
  for (int k = 0; k < set.k_total(); ++k) s.users.push_back(k);
  return s;
}

/// Dense search over unit complex 2-vectors modulo global phase:
/// m = (cos(theta), e^{i psi} sin(theta)).
double sphere_grid_objective(const ChannelSet& set, const Schedule& subset,
                             double power) {
  const int n_theta = 400;
  const int n_psi = 720;
  double best = 0.0;
  for (int it = 0; it <= n_theta; ++it) {
    const double theta = 0.5 * std::numbers::pi * it / n_theta;
    for (int ip = 0; ip < n_psi; ++ip) {
      const double psi = 2.0 * std::numbers::pi * ip / n_psi;
      CVector m(2);
      m << Complex(std::cos(theta), 0.0),
          std::exp(Complex(0.0, psi)) * std::sin(theta);
      double worst = std::numeric_limits<double>::infinity();
      for (int u : subset.users) {
        worst = std::min(worst, std::norm(m.dot(set.gains.col(u))));
      }
      best = std::max(best, power * worst);
    }
  }
  return best;
}

ChannelSet orthonormal_pair() {
  ChannelSet set;
  set.gains = CMatrix::Identity(2, 2);
  return set;
}

}  // namespace

TEST_CASE("canonical beam: unit norm, leading entry real nonnegative") {
  SplitMix64 rng(RngSeed{3});
  CVector raw(4);
  for (int i = 0; i < 4; ++i) raw(i) = rng.standard_complex_gaussian();
  const BeamVector m = canonicalize_beam(raw);
  CHECK(m.coeffs.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.coeffs(0).imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.coeffs(0).real() >= 0.0);
  CHECK_THROWS_AS(canonicalize_beam(CVector::Zero(3)), ZeroVectorError);
}

TEST_CASE("power conversion: 0 dBm is unit power") {
  CHECK(power_from_dbm(0.0) == doctest::Approx(1.0));
  CHECK(power_from_dbm(10.0) == doctest::Approx(10.0));
  CHECK(power_from_dbm(-10.0) == doctest::Approx(0.1));
}

TEST_CASE("rank1_check thresholds") {
  CVector h(3);
  h << Complex(1, 0), Complex(0, 1), Complex(1, 1);
  h /= h.norm();
  CHECK(rank1_check(PsdMatrix{h * h.adjoint()}, 0.999));
  CHECK_FALSE(rank1_check(PsdMatrix{CMatrix::Identity(3, 3) / 3.0}, 0.999));

  CVector u(3), v(3);
  u << Complex(1, 0), Complex(0, 0), Complex(0, 0);
  v << Complex(0, 0), Complex(1, 0), Complex(0, 0);
  const CMatrix mixed = 0.9995 * (u * u.adjoint()) + 0.0005 * (v * v.adjoint());
  CHECK(rank1_check(PsdMatrix{mixed}, 0.999));
}

TEST_CASE("extraction of a rank-one matrix is collinear and canonical") {
  SplitMix64 rng(RngSeed{5});
  CVector h(4);
  for (int i = 0; i < 4; ++i) h(i) = rng.standard_complex_gaussian();
  h /= h.norm();
  const BeamVector m = extract_beam(PsdMatrix{h * h.adjoint()});
  CHECK(std::abs(m.coeffs.dot(h)) == doctest::Approx(1.0).epsilon(1e-9));

  // Phase of the generating vector never shows in the extraction.
  for (int r = 0; r < 10; ++r) {
    const double theta = rng.uniform01() * 2.0 * std::numbers::pi;
    const CVector rotated = h * std::exp(Complex(0.0, theta));
    const BeamVector again = extract_beam(PsdMatrix{rotated * rotated.adjoint()});
    CHECK((again.coeffs - m.coeffs).norm() < 1e-10);
  }
}

TEST_CASE("extraction rejects high-rank matrices") {
  CHECK_THROWS_AS(extract_beam(PsdMatrix{CMatrix::Identity(3, 3) / 3.0}), Error);
}

TEST_CASE("dc_iterate: matched single user converges immediately") {
  const ChannelSet set = generate_channels(1, 4, RngSeed{7});
  const CVector h = set.gains.col(0);
  const double h2 = h.squaredNorm();
  const PsdMatrix init{h * h.adjoint() / h2};

  BeamConfig config;
  const DcRun run = dc_iterate(set, Schedule{{0}}, h2, init, config);
  CHECK(run.converged);
  CHECK(run.iterations == 1);
  REQUIRE(run.surrogate_trace.size() == 1);
  CHECK(run.surrogate_trace.front() == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("dc_iterate: two orthonormal users split the beam evenly") {
  const ChannelSet set = orthonormal_pair();
  const Schedule subset = all_users(set);
  BeamConfig config;
  CMatrix scatter = CMatrix::Identity(2, 2) / 2.0;
  const DcRun run = dc_iterate(set, subset, 0.5, PsdMatrix{scatter}, config);
  CHECK(run.converged);
  CHECK(rank1_ratio(run.lifted.entries) >= 0.999);

  const BeamVector m = extract_beam(run.lifted, 0.999);
  for (int u : subset.users) {
    CHECK(std::norm(m.coeffs.dot(set.gains.col(u))) ==
          doctest::Approx(0.5).epsilon(2e-3));
  }
}

TEST_CASE("dc_iterate: surrogate trace is non-increasing") {
  const ChannelSet set = generate_channels(3, 4, RngSeed{11});
  const Schedule subset = all_users(set);
  double tau_up = std::numeric_limits<double>::infinity();
  for (int u : subset.users) {
    tau_up = std::min(tau_up, set.gains.col(u).squaredNorm());
  }
  CMatrix scatter = CMatrix::Zero(4, 4);
  for (int u : subset.users) {
    scatter += set.gains.col(u) * set.gains.col(u).adjoint();
  }
  scatter /= scatter.trace().real();

  BeamConfig config;
  const DcRun run =
      dc_iterate(set, subset, 0.5 * tau_up, PsdMatrix{scatter}, config);
  for (std::size_t i = 1; i < run.surrogate_trace.size(); ++i) {
    CHECK(run.surrogate_trace[i] <= run.surrogate_trace[i - 1] + 1e-8);
  }
}

TEST_CASE("beam steering: singleton is the matched filter") {
  const ChannelSet set = generate_channels(3, 5, RngSeed{13});
  BeamConfig config;
  const BeamResult result = solve_beam_steering(set, Schedule{{1}}, config);
  const CVector h = set.gains.col(1);
  CHECK(result.objective == doctest::Approx(h.squaredNorm()).epsilon(1e-6));
  CHECK(std::abs(result.m.coeffs.dot(h)) ==
        doctest::Approx(h.norm()).epsilon(1e-6));
  CHECK(result.surrogate_monotone);
}

TEST_CASE("beam steering: two orthonormal users cap at one half") {
  const ChannelSet set = orthonormal_pair();
  BeamConfig config;
  const BeamResult result = solve_beam_steering(set, all_users(set), config);
  CHECK(result.objective == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(result.rank1_ratio >= 0.999);
}

TEST_CASE("beam steering: within 2% of the n_r=2 sphere grid oracle") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    ChannelSet set = generate_channels(3, 2, RngSeed{2000 + seed});
    set = normalize_channels(set);
    const Schedule subset = all_users(set);
    BeamConfig config;
    const BeamResult result = solve_beam_steering(set, subset, config);
    const double oracle = sphere_grid_objective(set, subset, config.power);
    CHECK(result.objective >= 0.98 * oracle);
    CHECK(result.objective <= oracle * 1.001 + 1e-6);
  }
}

TEST_CASE("beam steering: objective recomputation and bisection bound") {
  const ChannelSet set = generate_channels(4, 4, RngSeed{17});
  const Schedule subset = all_users(set);
  BeamConfig config;
  const BeamResult result = solve_beam_steering(set, subset, config);

  double min_p2 = std::numeric_limits<double>::infinity();
  for (int u : subset.users) {
    min_p2 = std::min(min_p2, std::norm(result.m.coeffs.dot(set.gains.col(u))));
  }
  CHECK(result.objective == doctest::Approx(config.power * min_p2).epsilon(1e-8));
  CHECK(result.objective >= config.power * (result.tau_star - 1e-3));

  const int bound =
      static_cast<int>(std::ceil(std::log2(1.0 / config.delta_rel))) + 1;
  CHECK(result.bisection_steps <= bound);
}

TEST_CASE("beam steering: global phase invariance of the objective") {
  const ChannelSet set = generate_channels(3, 4, RngSeed{19});
  const Schedule subset = all_users(set);
  BeamConfig config;
  const BeamResult result = solve_beam_steering(set, subset, config);

  SplitMix64 rng(RngSeed{23});
  for (int r = 0; r < 100; ++r) {
    const double theta = rng.uniform01() * 2.0 * std::numbers::pi;
    const CVector rotated = result.m.coeffs * std::exp(Complex(0.0, theta));
    double min_p2 = std::numeric_limits<double>::infinity();
    for (int u : subset.users) {
      min_p2 = std::min(min_p2, std::norm(rotated.dot(set.gains.col(u))));
    }
    CHECK(std::abs(config.power * min_p2 - result.objective) <=
          1e-12 * std::max(1.0, result.objective));
  }
}

TEST_CASE("corollary bound: objective at least P cos^2(alpha) on unit subsets") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ChannelSet set = generate_channels(3, 4, RngSeed{3000 + seed});
    set = normalize_channels(set);
    const Schedule subset = all_users(set);
    BeamConfig config;
    const BeamResult result = solve_beam_steering(set, subset, config);
    const AngleStats stats = angle_stats(set, subset);
    const double bound =
        config.power * std::cos(stats.max_angle) * std::cos(stats.max_angle);
    CHECK(result.objective >= bound - 1e-4);
  }
}

TEST_CASE("scaling one channel up never hurts the objective") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ChannelSet set = generate_channels(3, 4, RngSeed{4000 + seed});
    const Schedule subset = all_users(set);
    BeamConfig config;
    config.delta_rel = 1e-5;  // objective noise must sit below the 1e-4 slack
    const BeamResult base = solve_beam_steering(set, subset, config);

    ChannelSet scaled = set;
    scaled.gains.col(1) *= 1.5;
    const BeamResult better = solve_beam_steering(scaled, subset, config);
    CHECK(better.objective >= base.objective - 1e-4);
  }
}

TEST_CASE("debug stream records bisection steps") {
  const ChannelSet set = generate_channels(2, 3, RngSeed{29});
  std::ostringstream debug;
  BeamConfig config;
  config.debug = &debug;
  const BeamResult result = solve_beam_steering(set, all_users(set), config);
  int lines = 0;
  for (char c : debug.str()) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == result.bisection_steps);
}

TEST_CASE("mse report: matched singleton at unit power") {
  ChannelSet set;
  set.gains = CMatrix::Zero(3, 1);
  set.gains(0, 0) = Complex(1.0, 0.0);
  const BeamVector m = canonicalize_beam(set.gains.col(0));
  const MseReport report = mse_report(set, Schedule{{0}}, m, 1.0, 1.0);
  CHECK(report.eta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.mse_over_sigma2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mse report: normalized mse is exactly the inverse objective") {
  const ChannelSet set = generate_channels(4, 4, RngSeed{31});
  const Schedule subset = all_users(set);
  BeamConfig config;
  const BeamResult result = solve_beam_steering(set, subset, config);
  const MseReport report = mse_report(set, subset, result.m, config.power, 1.0);
  CHECK(report.mse_over_sigma2 * report.objective ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.objective == doctest::Approx(result.objective).epsilon(1e-9));
  CHECK(report.projections.size() == subset.users.size());
}

TEST_CASE("mse report: zero projection raises InfiniteEta") {
  ChannelSet set;
  set.gains = CMatrix::Identity(2, 2);
  CVector m(2);
  m << Complex(1, 0), Complex(0, 0);
  CHECK_THROWS_AS(mse_report(set, Schedule{{0, 1}}, BeamVector{m}, 1.0, 1.0),
                  InfiniteEtaError);
}

TEST_CASE("transmit coefficients invert the effective channel") {
  const ChannelSet set = generate_channels(4, 4, RngSeed{37});
  const Schedule subset = all_users(set);
  BeamConfig config;
  const BeamResult result = solve_beam_steering(set, subset, config);
  const MseReport report = mse_report(set, subset, result.m, config.power, 1.0);
  const std::vector<Complex> b =
      transmit_coefficients(set, subset, result.m, report.eta);

  const double sqrt_eta = std::sqrt(report.eta);
  bool any_at_cap = false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Complex product =
        sqrt_eta * result.m.coeffs.dot(set.gains.col(subset.users[i])) * b[i];
    CHECK(std::abs(product - Complex(1.0, 0.0)) < 1e-9);
    CHECK(std::norm(b[i]) <= config.power + 1e-9);
    if (std::norm(b[i]) >= config.power - 1e-6) any_at_cap = true;
  }
  CHECK(any_at_cap);  // the argmax user transmits at full power
}

TEST_CASE("beam result serializes with all fields") {
  const ChannelSet set = generate_channels(2, 3, RngSeed{41});
  BeamConfig config;
  const BeamResult result = solve_beam_steering(set, all_users(set), config);
  const nlohmann::json doc = beam_result_to_json(result);
  CHECK(doc.contains("m"));
  CHECK(doc.contains("tau_star"));
  CHECK(doc.contains("objective"));
  CHECK(doc.contains("dc_outer_iters"));
  CHECK(doc.contains("bisection_steps"));
  CHECK(doc.contains("rank1_ratio"));
}
