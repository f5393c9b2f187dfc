#include <gtest/gtest.h>

#include <cmath>

#include "agsp/chain_model.hpp"
#include "agsp/chebyshev.hpp"
#include "agsp/linalg.hpp"
#include "oracle.hpp"

using namespace agsp;

TEST(Chebyshev, ClosedFormRecurrenceAndOracleAgree) {
  for (int l = 0; l <= 20; ++l)
    for (double x = -3.0; x <= 3.0; x += 0.125) {
      const double ref = oracle::chebyshev(l, x);
      const double scale = std::max(1.0, std::abs(ref));
      EXPECT_NEAR(chebyshev_T(l, x), ref, 1e-10 * scale) << l << " " << x;
      EXPECT_NEAR(chebyshev_T_recurrence(l, x), ref, 1e-9 * scale) << l << " " << x;
      if (std::abs(x) >= 1.0) {
        EXPECT_NEAR(log_abs_chebyshev_T(l, x), std::log(std::abs(ref)), 1e-10);
      }
    }
}

TEST(Chebyshev, LogDomainDoesNotOverflow) {
  const double v = log_abs_chebyshev_T(5000, 1.5);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 5000 * std::acosh(1.5) - std::log(2.0), 1e-8);
  EXPECT_THROW(log_abs_chebyshev_T(3, 0.5), InvalidArgument);
  EXPECT_THROW(chebyshev_T(-1, 0.5), InvalidArgument);
}

TEST(Chebyshev, FilterNormalizationAndWindowBound) {
  for (auto [e0, e1, u] : {std::tuple{0.0, 0.1, 1.0}, std::tuple{0.3, 0.31, 5.0}, std::tuple{-2.0, 1.0, 1.5}})
    for (int l : {1, 2, 5, 17, 40}) {
      const ChebyshevFilter c = build_filter(l, e0, e1, u);
      EXPECT_NEAR(eval_filter(c, e0), 1.0, 1e-12);
      const double inv_t = std::exp(-c.log_norm);
      EXPECT_NEAR(inv_t, 1.0 / oracle::chebyshev(l, c.x0()), 1e-12 * std::max(1.0, inv_t));
      EXPECT_LE(inv_t, shrink_bound(c) + 1e-15);
      for (int k = 0; k <= 400; ++k) {
        const double y = e1 + (u - e1) * k / 400.0;
        const double v = eval_filter(c, y);
        EXPECT_LE(std::abs(v), inv_t * (1.0 + 1e-9));
        EXPECT_NEAR(v, oracle::chebyshev(l, c.f(y)) * inv_t, 1e-10);
      }
    }
}

TEST(Chebyshev, DegreeZeroAndCollapsedWindow) {
  const ChebyshevFilter id = build_filter(0, 0.0, 0.5, 1.0);
  EXPECT_EQ(eval_filter(id, 0.7), 1.0);
  const ChebyshevFilter flat = build_filter(4, 0.0, 0.5, 0.5);
  EXPECT_NEAR(eval_filter(flat, 0.0), 1.0, 1e-12);
  EXPECT_LE(std::abs(eval_filter(flat, 0.5)), std::exp(-flat.log_norm) * (1 + 1e-9));
}

TEST(Chebyshev, DegreeForTargetIsMinimal) {
  for (double target : {0.5, 1e-2, 1e-6})
    for (auto [e0, e1, u] : {std::tuple{0.0, 0.05, 1.0}, std::tuple{0.1, 0.4, 9.0}}) {
      const int l = degree_for_target(target, e0, e1, u);
      EXPECT_GE(l, 1);
      EXPECT_LE(shrink_bound(l, e0, e1, u), std::sqrt(target) * (1.0 + 1e-12));
      if (l > 1) {
        EXPECT_GT(shrink_bound(l - 1, e0, e1, u), std::sqrt(target));
      }
    }
  EXPECT_THROW(degree_for_target(0.0, 0.0, 0.1, 1.0), InvalidArgument);
  EXPECT_THROW(degree_for_target(1.0, 0.0, 0.1, 1.0), InvalidArgument);
}

TEST(Chebyshev, WindowPreconditions) {
  EXPECT_THROW(build_filter(3, 0.5, 0.5, 1.0), InvalidArgument);
  EXPECT_THROW(build_filter(3, 0.0, 0.5, 0.4), InvalidArgument);
  EXPECT_THROW(build_filter(-1, 0.0, 0.5, 1.0), InvalidArgument);
  EXPECT_THROW(build_filter(3, 0.0, NAN, 1.0), InvalidArgument);
  EXPECT_THROW(shrink_bound(3, 0.5, 0.5, 1.0), InvalidArgument);
}

TEST(Chebyshev, DenseApplicationMatchesSpectralFunction) {
  RealVector lam(5);
  lam << 0.1, 0.4, 0.55, 0.9, 1.2;
  const HermitianOperator h(Matrix(lam.cast<cplx>().asDiagonal()));
  const ChebyshevFilter c = build_filter(6, 0.1, 0.4, 1.2);
  Vector v = Vector::Ones(5) / std::sqrt(5.0);
  const FilterApplication out = apply_filter_dense(c, h, v);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(out.result(i).real(), eval_filter(c, lam(i)) * v(i).real(), 1e-12);
  EXPECT_FALSE(out.amplification_warning);
  EXPECT_NEAR(out.gain, out.result.norm(), 1e-14);

  // A level below ε₀ is amplified.
  RealVector below = lam;
  below(0) = -0.5;
  const FilterApplication amp = apply_filter_dense(c, HermitianOperator(Matrix(below.cast<cplx>().asDiagonal())), v);
  EXPECT_TRUE(amp.amplification_warning);
  EXPECT_THROW(apply_filter_dense(c, h, 2.0 * v), InvalidArgument);
}

TEST(Chebyshev, MatrixFreePathsAgree) {
  const ChainSpec chain = build_standard_model("tfim", 6, 2, {{"h", 1.1}}, 0);
  const OperatorSum h = chain.as_sum();
  const HermitianOperator dense(h.dense());
  const RealVector ev = linalg::eigvalsh(dense.entries());
  const ChebyshevFilter c = build_filter(9, ev(0), ev(1), ev(ev.size() - 1));
  RealMatrix block(64, 3);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index i = 0; i < 64; ++i) block(i, j) = std::sin(1.0 + i * (j + 1) * 0.3);
  const Matrix y = apply_filter(c, h, block.cast<cplx>());
  EXPECT_LT((apply_filter_real(c, h, block).cast<cplx>() - y).cwiseAbs().maxCoeff(), 1e-12);
  const auto ep = linalg::eigh(dense.entries());
  RealVector cl(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) cl(i) = eval_filter(c, ep.values(i));
  const Matrix k = linalg::reconstruct(ep.vectors, cl);
  EXPECT_LT((k * block.cast<cplx>() - y).cwiseAbs().maxCoeff(), 1e-10);
  const Vector col = block.col(0).cast<cplx>().normalized();
  EXPECT_LT((apply_filter_dense(c, dense, col).result - k * col).norm(), 1e-10);
  EXPECT_EQ(filter_json(c).at("l").get<int>(), 9);
}
