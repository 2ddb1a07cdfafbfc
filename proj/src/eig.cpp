#include "aircomp/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aircomp {

namespace {

double off_diagonal_norm(const CMatrix& a) {
  double sum = 0.0;
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    for (Eigen::Index q = p + 1; q < a.cols(); ++q) {
      sum += std::norm(a(p, q));
    }
  }
  return std::sqrt(2.0 * sum);
}

}  // namespace

HermitianEig hermitian_eigendecomposition(const CMatrix& matrix,
                                          double hermitian_tol) {
  const Eigen::Index n = matrix.rows();
  if (n == 0 || matrix.cols() != n) {
    throw DimensionError("eigendecomposition needs a nonempty square matrix");
  }
  const double scale = std::max(1.0, matrix.norm());
  if ((matrix - matrix.adjoint()).norm() > hermitian_tol * scale) {
    throw NonHermitianError("matrix is not Hermitian within tolerance");
  }

  CMatrix a = 0.5 * (matrix + matrix.adjoint());
  CMatrix v = CMatrix::Identity(n, n);

  const double stop = 1e-15 * scale * static_cast<double>(n);
  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= stop) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;

        // Unitary 2x2 rotation J with J(p,p)=J(q,q)=c (real), J(p,q)=s,
        // J(q,p)=-conj(s) zeroing a(p,q) in J^H A J.
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (app - aqq) / (2.0 * mag);
        // Smaller-magnitude root of t^2 - 2*zeta*t - 1 = 0.
        const double t = (zeta > 0.0 ? -1.0 : 1.0) /
                         (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const Complex phase = apq / mag;
        const Complex s = phase * (t * c);

        for (Eigen::Index r = 0; r < n; ++r) {
          const Complex arp = a(r, p);
          const Complex arq = a(r, q);
          a(r, p) = c * arp - std::conj(s) * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const Complex apr = a(p, r);
          const Complex aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = std::conj(s) * apr + c * aqr;
        }
        a(p, q) = Complex(0.0, 0.0);
        a(q, p) = Complex(0.0, 0.0);
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);

        for (Eigen::Index r = 0; r < n; ++r) {
          const Complex vrp = v(r, p);
          const Complex vrq = v(r, q);
          v(r, p) = c * vrp - std::conj(s) * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() > a(j, j).real();
  });

  HermitianEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = a(order[static_cast<std::size_t>(i)],
                           order[static_cast<std::size_t>(i)])
                             .real();
    out.eigenvectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

double rank1_ratio(const CMatrix& psd) {
  const double trace = psd.trace().real();
  if (trace <= 0.0) return 0.0;
  const HermitianEig eig = hermitian_eigendecomposition(psd, 1e-8);
  return eig.eigenvalues(0) / trace;
}

}  // namespace aircomp
