#include "aircomp/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "aircomp/eig.hpp"

namespace aircomp {

namespace {

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// Projection onto the PSD cone: eigendecompose and clip negative eigenvalues.
CMatrix project_psd(const CMatrix& a) {
  const HermitianEig eig = hermitian_eigendecomposition(hermitian_part(a), 1e-6);
  CMatrix out = CMatrix::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double lambda = eig.eigenvalues(i);
    if (lambda <= 0.0) continue;
    out.noalias() += lambda * (eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint());
  }
  return out;
}

/// Dykstra projection onto {Tr X = 1} intersected with the half-spaces
/// h_k^H X h_k >= tau. All sets are affine or half-spaces, so Dykstra
/// converges to the exact projection.
CMatrix project_affine_halfspaces(const CMatrix& input, const CMatrix& h,
                                  double tau) {
  const Eigen::Index n = input.rows();
  const int s = static_cast<int>(h.cols());

  CMatrix x = input;
  std::vector<CMatrix> corrections(static_cast<std::size_t>(s) + 1,
                                   CMatrix::Zero(n, n));
  std::vector<double> h_norm4(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) {
    const double n2 = h.col(k).squaredNorm();
    h_norm4[static_cast<std::size_t>(k)] = n2 * n2;
  }

  constexpr int kMaxCycles = 80;
  for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
    for (int k = 0; k < s; ++k) {
      CMatrix y = x + corrections[static_cast<std::size_t>(k)];
      const double val = (h.col(k).adjoint() * y * h.col(k)).value().real();
      if (val < tau && h_norm4[static_cast<std::size_t>(k)] > 0.0) {
        const double step = (tau - val) / h_norm4[static_cast<std::size_t>(k)];
        x = y + step * (h.col(k) * h.col(k).adjoint());
      } else {
        x = y;
      }
      corrections[static_cast<std::size_t>(k)] = y - x;
    }
    {
      CMatrix y = x + corrections[static_cast<std::size_t>(s)];
      const double shift = (y.trace().real() - 1.0) / static_cast<double>(n);
      x = y - shift * CMatrix::Identity(n, n);
      corrections[static_cast<std::size_t>(s)] = y - x;
    }

    double violation = std::abs(x.trace().real() - 1.0);
    for (int k = 0; k < s; ++k) {
      const double val = (h.col(k).adjoint() * x * h.col(k)).value().real();
      violation = std::max(violation, tau - val);
    }
    if (violation <= 1e-12 * std::max(1.0, x.norm())) break;
  }
  return hermitian_part(x);
}

double constraint_violation(const CMatrix& m, const CMatrix& h, double tau) {
  double violation = std::abs(m.trace().real() - 1.0);
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    const double val = (h.col(k).adjoint() * m * h.col(k)).value().real();
    violation = std::max(violation, tau - val);
  }
  return std::max(violation, 0.0);
}

double linear_objective(const CMatrix& m, const CVector& v) {
  const double trace = m.trace().real();
  if (v.size() == 0) return trace;
  return trace - (v.adjoint() * m * v).value().real();
}

}  // namespace

bool PsdMatrix::satisfies_invariants() const {
  const double scale = std::max(1.0, entries.norm());
  if ((entries - entries.adjoint()).norm() > 1e-10 * scale) return false;
  const HermitianEig eig = hermitian_eigendecomposition(entries, 1e-9);
  return eig.eigenvalues(eig.eigenvalues.size() - 1) >= -1e-8;
}

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::IterLimit: return "iter_limit";
  }
  return "unknown";
}

SdpSolution solve_subproblem(const DcSubproblem& problem,
                             const SdpSolverConfig& config,
                             SdpWarmStart* warm) {
  const Eigen::Index n = problem.constraints.rows();
  if (n < 1 || problem.constraints.cols() < 1) {
    throw DimensionError("solve_subproblem: empty constraint set");
  }
  if (problem.linearization.size() != 0 && problem.linearization.size() != n) {
    throw DimensionError("solve_subproblem: linearization dimension mismatch");
  }
  if (problem.tau < 0.0) {
    throw ConfigError("solve_subproblem: tau must be nonnegative");
  }

  double rho = config.penalty;
  CMatrix gradient = CMatrix::Identity(n, n);
  if (problem.linearization.size() != 0) {
    gradient -= problem.linearization * problem.linearization.adjoint();
  }

  CMatrix z = CMatrix::Identity(n, n) / static_cast<double>(n);
  CMatrix u = CMatrix::Zero(n, n);
  if (warm != nullptr && warm->valid && warm->z.rows() == n) {
    z = warm->z;
    u = warm->u;
  }

  constexpr double kRelaxation = 1.6;

  SdpSolution sol;
  CMatrix x = z;
  double residual_prev = -1.0;
  int stagnant = 0;
  int iter = 0;
  for (; iter < config.max_iters; ++iter) {
    x = project_affine_halfspaces(z - u - gradient / rho, problem.constraints,
                                  problem.tau);
    const CMatrix z_prev = z;
    const CMatrix x_relaxed = kRelaxation * x + (1.0 - kRelaxation) * z;
    z = project_psd(x_relaxed + u);
    u += x_relaxed - z;

    const double residual = (x - z).norm();
    const double dual_residual = rho * (z - z_prev).norm();
    const double violation = constraint_violation(z, problem.constraints, problem.tau);

    if (config.trace != nullptr) {
      *config.trace << iter << ',' << linear_objective(z, problem.linearization)
                    << ',' << std::max(violation, residual) << '\n';
    }

    if (residual <= 0.5 * config.feas_tol &&
        dual_residual <= 0.5 * config.feas_tol &&
        violation <= config.feas_tol) {
      sol.status = SdpStatus::Optimal;
      ++iter;
      break;
    }

    // Stagnation above the feasibility tolerance is the infeasibility proxy:
    // the alternating projections have converged to a positive gap.
    if (residual_prev >= 0.0 &&
        std::abs(residual - residual_prev) < 1e-9 * std::max(1.0, residual) &&
        residual > config.feas_tol && violation > config.feas_tol) {
      ++stagnant;
      if (stagnant >= 50) {
        sol.status = SdpStatus::Infeasible;
        ++iter;
        break;
      }
    } else {
      stagnant = 0;
    }
    residual_prev = residual;

    // Residual balancing keeps the penalty in a productive range.
    if ((iter + 1) % 25 == 0) {
      if (residual > 10.0 * dual_residual && rho < 1e3) {
        rho *= 2.0;
        u *= 0.5;
        stagnant = 0;
        residual_prev = -1.0;
      } else if (dual_residual > 10.0 * residual && rho > 1e-3) {
        rho *= 0.5;
        u *= 2.0;
        stagnant = 0;
        residual_prev = -1.0;
      }
    }
  }

  if (warm != nullptr) {
    warm->z = z;
    warm->u = u;
    warm->valid = true;
  }

  sol.matrix.entries = hermitian_part(z);
  sol.objective = linear_objective(sol.matrix.entries, problem.linearization);
  sol.iterations = iter;
  sol.max_constraint_violation =
      constraint_violation(sol.matrix.entries, problem.constraints, problem.tau);
  return sol;
}

}  // namespace aircomp
