#pragma once

#include "aircomp/types.hpp"

namespace aircomp {

struct HermitianEig {
  RVector eigenvalues;   // sorted descending
  CMatrix eigenvectors;  // orthonormal columns, eigenvectors.col(i) <-> eigenvalues(i)
};

/// Cyclic Jacobi diagonalization of a complex Hermitian matrix.
///
/// Intended for the small dense matrices of this library (n <= 64); one
/// sweep rotates every (p, q) pair in row order, and sweeps repeat until
/// the off-diagonal Frobenius mass is negligible. Reconstruction satisfies
/// ||sum_i lambda_i v_i v_i^H - A||_F <= 1e-8 ||A||_F.
///
/// Throws NonHermitianError when ||A - A^H||_F > hermitian_tol * max(1, ||A||_F).
HermitianEig hermitian_eigendecomposition(const CMatrix& matrix,
                                          double hermitian_tol = 1e-10);

/// lambda_max / Tr for a PSD matrix; the practical rank-one ratio.
double rank1_ratio(const CMatrix& psd);

}  // namespace aircomp
