#pragma once

#include <iosfwd>

#include "aircomp/types.hpp"

namespace aircomp {

/// Hermitian positive-semidefinite lifted variable M = m m^H.
struct PsdMatrix {
  CMatrix entries;

  int dim() const { return static_cast<int>(entries.rows()); }
  double trace() const { return entries.trace().real(); }

  /// Hermitian within 1e-10 (relative) and min eigenvalue >= -1e-8.
  bool satisfies_invariants() const;
};

enum class SdpStatus { Optimal, Infeasible, IterLimit };

const char* to_string(SdpStatus status);

struct SdpSolverConfig {
  double feas_tol = 1e-6;
  double obj_tol = 1e-7;
  int max_iters = 5000;
  double penalty = 1.0;          // ADMM step/penalty parameter rho
  std::ostream* trace = nullptr; // optional CSV dump: iteration,objective,violation
};

/// One linearized instance of the DC feasibility subproblem:
/// minimize Tr(M) - Re(v^H M v)  over  {M >= 0, Tr(M) = 1, h_k^H M h_k >= tau}.
/// Constraint matrices H_k = h_k h_k^H are kept in rank-one form (columns of
/// `constraints`); inner products are evaluated as h_k^H M h_k directly.
struct DcSubproblem {
  CMatrix constraints;   // n_r x S, column k = h_k
  double tau = 0.0;
  CVector linearization; // v, unit norm when set; empty => objective Tr(M)
};

struct SdpSolution {
  PsdMatrix matrix;
  double objective = 0.0;
  SdpStatus status = SdpStatus::IterLimit;
  int iterations = 0;
  double max_constraint_violation = 0.0;
};

/// Warm-start state carried across the DC loop's consecutive solves.
struct SdpWarmStart {
  CMatrix z;
  CMatrix u;
  bool valid = false;
};

/// First-order splitting solve of one subproblem instance: a gradient step on
/// the linear objective alternates with projection onto the PSD cone (by
/// eigendecomposition, clipping negative eigenvalues) and onto the affine
/// trace/half-space set (Dykstra corrections), with a scaled dual update.
/// Infeasible is declared when the projections stagnate at a gap above
/// feas_tol; IterLimit when max_iters runs out first.
SdpSolution solve_subproblem(const DcSubproblem& problem,
                             const SdpSolverConfig& config,
                             SdpWarmStart* warm = nullptr);

}  // namespace aircomp
