#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "aircomp/eig.hpp"
#include "aircomp/rng.hpp"

using namespace aircomp;

namespace {

CMatrix random_hermitian(int n, RngSeed seed) {
  SplitMix64 rng(seed);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, j) = rng.standard_complex_gaussian();
    }
  }
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("identity eigenvalues are all one") {
  const HermitianEig eig = hermitian_eigendecomposition(CMatrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) {
    CHECK(eig.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rank-one matrix recovers the generating vector") {
  SplitMix64 rng(RngSeed{3});
  CVector h(5);
  for (int i = 0; i < 5; ++i) h(i) = rng.standard_complex_gaussian();
  h /= h.norm();
  const CMatrix m = h * h.adjoint();

  const HermitianEig eig = hermitian_eigendecomposition(m);
  CHECK(eig.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-9));
  for (int i = 1; i < 5; ++i) {
    CHECK(std::abs(eig.eigenvalues(i)) < 1e-9);
  }
  // collinear up to phase
  CHECK(std::abs(eig.eigenvectors.col(0).dot(h)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("eigenvalue sum equals the trace") {
  const CMatrix a = random_hermitian(6, RngSeed{21});
  const HermitianEig eig = hermitian_eigendecomposition(a);
  CHECK(eig.eigenvalues.sum() == doctest::Approx(a.trace().real()).epsilon(1e-9));
}

TEST_CASE("reconstruction error is tiny and eigenvalues are sorted") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 15);
    const CMatrix a = random_hermitian(n, RngSeed{1000 + seed});
    const HermitianEig eig = hermitian_eigendecomposition(a);

    CMatrix recon = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      recon += eig.eigenvalues(i) *
               (eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint());
      if (i > 0) CHECK(eig.eigenvalues(i) <= eig.eigenvalues(i - 1) + 1e-12);
    }
    CHECK((recon - a).norm() <= 1e-8 * std::max(1.0, a.norm()));

    // orthonormal columns
    CHECK((eig.eigenvectors.adjoint() * eig.eigenvectors - CMatrix::Identity(n, n))
              .norm() < 1e-9);
  }
}

TEST_CASE("matches Eigen's self-adjoint solver") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 3 + static_cast<int>(seed);
    const CMatrix a = random_hermitian(n, RngSeed{7000 + seed});
    const HermitianEig ours = hermitian_eigendecomposition(a);
    Eigen::SelfAdjointEigenSolver<CMatrix> reference(a);
    for (int i = 0; i < n; ++i) {
      // reference sorts ascending
      CHECK(ours.eigenvalues(i) ==
            doctest::Approx(reference.eigenvalues()(n - 1 - i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("non-Hermitian input is rejected") {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 1) = Complex(1.0, 0.0);
  a(1, 0) = Complex(0.5, 0.0);
  CHECK_THROWS_AS(hermitian_eigendecomposition(a), NonHermitianError);
}

TEST_CASE("rank1_ratio distinguishes pure from mixed matrices") {
  CVector h(4);
  h << Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1);
  h /= h.norm();
  CHECK(rank1_ratio(h * h.adjoint()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rank1_ratio(CMatrix::Identity(4, 4) / 4.0) == doctest::Approx(0.25).epsilon(1e-9));
}
