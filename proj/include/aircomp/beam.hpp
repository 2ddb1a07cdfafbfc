#pragma once

#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aircomp/channel.hpp"
#include "aircomp/sdp.hpp"
#include "aircomp/types.hpp"

namespace aircomp {

/// Unit-norm receive combining vector with canonical phase: the first entry
/// of magnitude > 1e-8 is real and nonnegative, which picks one
/// representative out of the infinitely many phase-rotated optima.
struct BeamVector {
  CVector coeffs;

  int dim() const { return static_cast<int>(coeffs.size()); }
};

/// Normalize to unit norm and rotate to canonical phase.
/// Throws ZeroVectorError on (near-)zero input.
BeamVector canonicalize_beam(const CVector& m);

/// 0 dBm -> 1.0 (dimensionless unit power in the simulation).
double power_from_dbm(double p_dbm);

struct BeamConfig {
  double dc_tol = 1e-6;        // iterate change threshold for the DC loop
  int dc_max_iters = 100;
  double rank1_threshold = 0.999;
  SdpSolverConfig sdp;
  double power = 1.0;          // P, linear scale
  double delta_rel = 1e-4;     // bisection gap: delta_abs = delta_rel * initial tau_up
  std::ostream* debug = nullptr;  // per-bisection-step: tau,feasible,dc_iters
};

struct BisectionState {
  double tau_low = 0.0;
  double tau_up = 0.0;
  double delta = 0.0;
};

struct DcRun {
  PsdMatrix lifted;                    // final M
  int iterations = 0;
  std::vector<double> surrogate_trace; // Tr(M) - Re<vv^H, M> per accepted step
  SdpStatus sdp_status = SdpStatus::IterLimit;
  bool converged = false;
};

/// DC iteration at a fixed tau: linearize the spectral norm at the current
/// iterate (principal eigenvector v), solve the convex subproblem, repeat
/// until the iterate change drops below dc_tol. A step that would raise the
/// surrogate is rejected and treated as convergence, so the recorded trace is
/// non-increasing.
DcRun dc_iterate(const ChannelSet& channels, const Schedule& subset, double tau,
                 const PsdMatrix& init, const BeamConfig& config);

/// True iff lambda_max(M) / Tr(M) >= threshold.
bool rank1_check(const PsdMatrix& m, double threshold);

/// Principal eigenvector of a (near-)rank-one lifted matrix, canonical phase.
/// Throws Error when the rank-one ratio is below min_ratio.
BeamVector extract_beam(const PsdMatrix& m, double min_ratio = 0.999);

struct BeamResult {
  BeamVector m;
  double tau_star = 0.0;       // last feasible bisection level
  double objective = 0.0;      // P * min_k |m^H h_k|^2, recomputed from m
  int dc_outer_iters = 0;      // DC iterations summed over bisection steps
  int bisection_steps = 0;
  double rank1_ratio = 0.0;    // of the final feasible lifted matrix
  bool surrogate_monotone = true;  // every DC trace non-increasing (1e-8 slack)
};

/// Algorithm: bisection over tau in [0, min_k ||h_k||^2]; a midpoint is
/// feasible when the DC loop converges to a rank-one matrix, in which case
/// tau_low rises, otherwise tau_up falls. The returned beam is the extraction
/// at the last feasible tau. Throws NoFeasibleTau when no midpoint ever
/// certifies feasible.
BeamResult solve_beam_steering(const ChannelSet& channels,
                               const Schedule& subset,
                               const BeamConfig& config);

struct MseReport {
  double objective = 0.0;        // P * min_k |m^H h_k|^2
  double mse_over_sigma2 = 0.0;  // eta (since ||m|| = 1)
  double eta = 0.0;              // max_k 1 / (P |m^H h_k|^2)
  std::vector<double> projections;  // |m^H h_k| per selected user
};

/// Throws InfiniteEtaError when any selected projection is exactly zero.
MseReport mse_report(const ChannelSet& channels, const Schedule& subset,
                     const BeamVector& m, double power, double sigma2);

/// Per-user transmit coefficients b_k = h_k^H m / (sqrt(eta) |m^H h_k|^2),
/// which satisfy sqrt(eta) * m^H h_k * b_k = 1.
std::vector<Complex> transmit_coefficients(const ChannelSet& channels,
                                           const Schedule& subset,
                                           const BeamVector& m, double eta);

nlohmann::json beam_result_to_json(const BeamResult& result);

}  // namespace aircomp
