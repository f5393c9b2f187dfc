#include <gtest/gtest.h>

#include <random>

#include "agsp/linalg.hpp"
#include "oracle.hpp"

using namespace agsp;

namespace {

Matrix random_hermitian(int n, std::uint64_t seed, bool real) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = cplx(g(rng), real ? 0.0 : g(rng));
  return (m + m.adjoint()) / 2.0;
}

}  // namespace

TEST(Linalg, RealPathMatchesIndependentSolver) {
  for (int n : {1, 7, 64, 200}) {
    const Matrix m = random_hermitian(n, 11 + n, true);
    const auto ep = linalg::eigh(m);
    const auto ref = oracle::eig(m);
    EXPECT_LT((ep.values - ref.values).cwiseAbs().maxCoeff(), 1e-10) << n;
    const Matrix r = m * ep.vectors - ep.vectors * ep.values.cast<cplx>().asDiagonal();
    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-10) << n;
    EXPECT_LT((ep.vectors.adjoint() * ep.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Linalg, ComplexPathMatchesIndependentSolver) {
  const Matrix m = random_hermitian(90, 5, false);
  const auto ep = linalg::eigh(m);
  EXPECT_LT((ep.values - oracle::eig(m).values).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((m * ep.vectors - ep.vectors * ep.values.cast<cplx>().asDiagonal()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((linalg::eigvalsh(m) - ep.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linalg, ForcedComplexRouteAgreesWithRealRoute) {
  const Matrix m = random_hermitian(120, 9, true);
  EXPECT_LT((linalg::eigh_complex(m).values - linalg::eigh(m).values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linalg, ThinSvdReconstructs) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (auto [r, c] : {std::pair{40, 12}, std::pair{12, 40}, std::pair{33, 33}}) {
    Matrix m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = cplx(g(rng), g(rng));
    const auto f = linalg::svd(m);
    EXPECT_LT((f.u * f.s.cast<cplx>().asDiagonal() * f.v.adjoint() - m).norm(), 1e-11 * m.norm());
    Eigen::JacobiSVD<Matrix> ref(m);
    EXPECT_LT((linalg::singular_values(m) - ref.singularValues()).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_NEAR(linalg::spectral_norm(m), ref.singularValues()(0), 1e-11);
    for (Eigen::Index i = 1; i < f.s.size(); ++i) EXPECT_GE(f.s(i - 1), f.s(i));
  }
}

TEST(Linalg, SpectralNormOfVeryWideMatrix) {
  Matrix m = Matrix::Zero(2, 50);
  m(0, 3) = 3.0;
  m(1, 7) = cplx(0.0, 4.0);
  EXPECT_NEAR(linalg::spectral_norm(m), 4.0, 1e-12);
}

TEST(Linalg, ReconstructAppliesFunctionOfSpectrum) {
  const Matrix m = random_hermitian(30, 21, false);
  const auto ep = linalg::eigh(m);
  const Matrix sq = linalg::reconstruct(ep.vectors, ep.values.cwiseAbs2());
  EXPECT_LT((sq - m * m).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linalg, HermiticityDeviationAndRealness) {
  Matrix m = Matrix::Identity(3, 3);
  EXPECT_TRUE(linalg::is_real(m));
  EXPECT_EQ(linalg::hermiticity_deviation(m), 0.0);
  m(0, 1) = cplx(0.0, 1e-3);
  EXPECT_FALSE(linalg::is_real(m));
  EXPECT_NEAR(linalg::hermiticity_deviation(m), 1e-3, 1e-15);
  EXPECT_EQ(linalg::max_abs(Matrix()), 0.0);
}

TEST(Linalg, HilbertDimSaturates) {
  EXPECT_EQ(hilbert_dim(12, 2), 4096);
  EXPECT_EQ(hilbert_dim(0, 5), 1);
  EXPECT_EQ(hilbert_dim(200, 2), std::numeric_limits<std::int64_t>::max());
}
