#include "aircomp/beam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "aircomp/eig.hpp"

namespace aircomp {

namespace {

CMatrix subset_columns(const ChannelSet& channels, const Schedule& subset) {
  subset.validate(channels.k_total());
  if (subset.users.empty()) {
    throw ConfigError("beam steering needs a nonempty subset");
  }
  CMatrix h(channels.n_r(), subset.size());
  for (int i = 0; i < subset.size(); ++i) {
    h.col(i) = channels.gains.col(subset.users[i]);
  }
  return h;
}

double min_projection_squared(const CMatrix& h, const CVector& m) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    best = std::min(best, std::norm(m.dot(h.col(k))));
  }
  return best;
}

/// DC initialization: the subset's trace-normalized scatter matrix, tilted
/// slightly toward the coherent sum direction. The tilt breaks eigenvalue
/// ties (an exactly symmetric scatter has a degenerate principal eigenvector
/// and stalls the linearization) without moving the trace off 1.
PsdMatrix dc_initial_matrix(const CMatrix& h) {
  CMatrix m = CMatrix::Zero(h.rows(), h.rows());
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    m.noalias() += h.col(k) * h.col(k).adjoint();
  }
  m /= m.trace().real();
  CVector coherent = h.rowwise().sum();
  const double norm = coherent.norm();
  if (norm > 1e-12) {
    coherent /= norm;
    m = 0.95 * m + 0.05 * (coherent * coherent.adjoint());
  }
  return PsdMatrix{std::move(m)};
}

bool trace_is_monotone(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1] + 1e-8) return false;
  }
  return true;
}

}  // namespace

BeamVector canonicalize_beam(const CVector& m) {
  const double norm = m.norm();
  if (norm < 1e-12) {
    throw ZeroVectorError("canonicalize_beam: zero vector");
  }
  CVector unit = m / norm;
  for (Eigen::Index i = 0; i < unit.size(); ++i) {
    const double mag = std::abs(unit(i));
    if (mag > 1e-8) {
      unit *= std::conj(unit(i)) / mag;
      break;
    }
  }
  return BeamVector{std::move(unit)};
}

double power_from_dbm(double p_dbm) { return std::pow(10.0, p_dbm / 10.0); }

DcRun dc_iterate(const ChannelSet& channels, const Schedule& subset, double tau,
                 const PsdMatrix& init, const BeamConfig& config) {
  const CMatrix h = subset_columns(channels, subset);
  if (tau < 0.0) {
    throw ConfigError("dc_iterate: tau must be nonnegative");
  }

  DcRun run;
  run.lifted = init;
  SdpWarmStart warm;
  double prev_surrogate = std::numeric_limits<double>::infinity();

  for (int t = 0; t < config.dc_max_iters; ++t) {
    const HermitianEig eig =
        hermitian_eigendecomposition(run.lifted.entries, 1e-6);
    CVector v = eig.eigenvectors.col(0);
    if (eig.eigenvalues.size() > 1) {
      // A (near-)tied top pair makes the linearization direction arbitrary;
      // blending the tied eigenvectors escapes the symmetric saddle.
      const double gap = eig.eigenvalues(0) - eig.eigenvalues(1);
      if (gap < 1e-9 * std::max(eig.eigenvalues(0), 1e-300)) {
        v = (eig.eigenvectors.col(0) + eig.eigenvectors.col(1)).normalized();
      }
    }
    DcSubproblem sub{h, tau, std::move(v)};
    const SdpSolution sol = solve_subproblem(sub, config.sdp, &warm);
    run.sdp_status = sol.status;
    if (sol.status != SdpStatus::Optimal) {
      return run;
    }

    if (sol.objective > prev_surrogate + 1e-9) {
      // The solver can no longer improve the surrogate; keep the incumbent.
      run.converged = true;
      return run;
    }

    const double change = (sol.matrix.entries - run.lifted.entries).norm();
    const double surrogate_drop = prev_surrogate - sol.objective;
    run.lifted = sol.matrix;
    run.surrogate_trace.push_back(sol.objective);
    prev_surrogate = sol.objective;
    ++run.iterations;

    if (change <= config.dc_tol || surrogate_drop <= 1e-10) {
      run.converged = true;
      return run;
    }
  }
  return run;
}

bool rank1_check(const PsdMatrix& m, double threshold) {
  return rank1_ratio(m.entries) >= threshold;
}

BeamVector extract_beam(const PsdMatrix& m, double min_ratio) {
  const HermitianEig eig = hermitian_eigendecomposition(m.entries, 1e-8);
  const double trace = m.trace();
  if (trace <= 0.0 || eig.eigenvalues(0) / trace < min_ratio) {
    throw Error("extract_beam: matrix is not rank-one within threshold");
  }
  return canonicalize_beam(eig.eigenvectors.col(0));
}

BeamResult solve_beam_steering(const ChannelSet& channels,
                               const Schedule& subset,
                               const BeamConfig& config) {
  const CMatrix h = subset_columns(channels, subset);
  double tau_up = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    const double n2 = h.col(k).squaredNorm();
    if (n2 == 0.0) {
      throw ZeroVectorError("solve_beam_steering: zero channel in subset");
    }
    tau_up = std::min(tau_up, n2);
  }

  const double delta_abs = config.delta_rel * tau_up;
  const PsdMatrix init = dc_initial_matrix(h);

  BeamResult result;
  double tau_low = 0.0;
  bool found = false;
  PsdMatrix best_lifted;

  while (tau_up - tau_low > delta_abs) {
    const double tau = 0.5 * (tau_up + tau_low);
    const DcRun run = dc_iterate(channels, subset, tau, init, config);
    result.dc_outer_iters += run.iterations;
    ++result.bisection_steps;
    if (!trace_is_monotone(run.surrogate_trace)) {
      result.surrogate_monotone = false;
    }

    const bool feasible =
        run.converged && rank1_check(run.lifted, config.rank1_threshold);
    if (config.debug != nullptr) {
      *config.debug << tau << ',' << (feasible ? 1 : 0) << ','
                    << run.iterations << '\n';
    }
    if (feasible) {
      tau_low = tau;
      best_lifted = run.lifted;
      found = true;
    } else {
      tau_up = tau;
    }
  }

  if (!found) {
    throw NoFeasibleTauError(
        "solve_beam_steering: no feasible tau (degenerate channels)");
  }

  result.m = extract_beam(best_lifted, config.rank1_threshold);
  result.tau_star = tau_low;
  result.rank1_ratio = rank1_ratio(best_lifted.entries);
  result.objective = config.power * min_projection_squared(h, result.m.coeffs);
  return result;
}

MseReport mse_report(const ChannelSet& channels, const Schedule& subset,
                     const BeamVector& m, double power, double sigma2) {
  const CMatrix h = subset_columns(channels, subset);
  if (m.coeffs.size() != h.rows()) {
    throw DimensionError("mse_report: beam dimension mismatch");
  }

  MseReport report;
  report.projections.reserve(static_cast<std::size_t>(h.cols()));
  double min_p2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    const double p = std::abs(m.coeffs.dot(h.col(k)));
    if (p == 0.0) {
      throw InfiniteEtaError("mse_report: zero projection for user " +
                             std::to_string(subset.users[static_cast<std::size_t>(k)]));
    }
    report.projections.push_back(p);
    min_p2 = std::min(min_p2, p * p);
  }
  report.objective = power * min_p2;
  report.eta = 1.0 / report.objective;
  report.mse_over_sigma2 = report.eta;
  (void)sigma2;  // MSE itself is eta * sigma2; the normalized form is returned
  return report;
}

std::vector<Complex> transmit_coefficients(const ChannelSet& channels,
                                           const Schedule& subset,
                                           const BeamVector& m, double eta) {
  if (eta <= 0.0) {
    throw ConfigError("transmit_coefficients: eta must be positive");
  }
  const CMatrix h = subset_columns(channels, subset);
  const double sqrt_eta = std::sqrt(eta);
  std::vector<Complex> coeffs;
  coeffs.reserve(static_cast<std::size_t>(h.cols()));
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    const Complex proj = m.coeffs.dot(h.col(k));  // m^H h_k
    const double p2 = std::norm(proj);
    if (p2 == 0.0) {
      throw InfiniteEtaError("transmit_coefficients: zero projection");
    }
    coeffs.push_back(std::conj(proj) / (sqrt_eta * p2));
  }
  return coeffs;
}

nlohmann::json beam_result_to_json(const BeamResult& result) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < result.m.coeffs.size(); ++i) {
    entries.push_back({result.m.coeffs(i).real(), result.m.coeffs(i).imag()});
  }
  return nlohmann::json{{"m", std::move(entries)},
                        {"tau_star", result.tau_star},
                        {"objective", result.objective},
                        {"dc_outer_iters", result.dc_outer_iters},
                        {"bisection_steps", result.bisection_steps},
                        {"rank1_ratio", result.rank1_ratio},
                        {"surrogate_monotone", result.surrogate_monotone}};
}

}  // namespace aircomp
