#include <gtest/gtest.h>

#include <random>

#include "agsp/local_operator.hpp"
#include "oracle.hpp"

using namespace agsp;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

// 1 ⊗ … ⊗ op ⊗ … ⊗ 1 by explicit Kronecker products.
Matrix kron_embed(const Matrix& op, int first, int width, int n, int d) {
  Matrix left = Matrix::Identity(hilbert_dim(first, d), hilbert_dim(first, d));
  Matrix right = Matrix::Identity(hilbert_dim(n - first - width, d), hilbert_dim(n - first - width, d));
  return oracle::kron(oracle::kron(left, op), right);
}

}  // namespace

TEST(LocalOperator, EmbedMatchesKroneckerProducts) {
  std::mt19937_64 rng(1);
  for (int d : {2, 3})
    for (int first = 0; first < 3; ++first)
      for (int width = 1; width + first <= 4; ++width) {
        const Matrix op = random_matrix(hilbert_dim(width, d), hilbert_dim(width, d), rng);
        const Matrix got = embed({first, width, op}, 4, d);
        EXPECT_LT((got - kron_embed(op, first, width, 4, d)).norm(), 1e-12) << d << first << width;
      }
}

TEST(LocalOperator, ApplyAgreesWithDense) {
  std::mt19937_64 rng(2);
  OperatorSum h(5, 2);
  h.add(0, 2, random_matrix(4, 4, rng));
  h.add(2, 3, random_matrix(8, 8, rng));
  h.add(4, 1, random_matrix(2, 2, rng));
  h.add_constant(0.75);
  Matrix ref = 0.75 * Matrix::Identity(32, 32);
  for (const auto& t : h.terms()) ref += kron_embed(t.op, t.first_site, t.width, 5, 2);
  EXPECT_LT((h.dense() - ref).norm(), 1e-12);
  const Matrix block = random_matrix(32, 3, rng);
  EXPECT_LT((h.apply_block(block) - ref * block).norm(), 1e-11);
  EXPECT_LT((h.apply(block.col(1)) - ref * block.col(1)).norm(), 1e-11);
}

TEST(LocalOperator, RealBlockPathAgreesWithComplex) {
  OperatorSum h(4, 2);
  h.add(1, 2, oracle::kron(oracle::pauli('Z'), oracle::pauli('X')));
  h.add(0, 1, oracle::pauli('X'));
  ASSERT_TRUE(h.is_real());
  RealMatrix x = RealMatrix::Random(16, 4);
  const Matrix y = h.apply_block(x.cast<cplx>());
  EXPECT_LT((h.apply_block_real(x).cast<cplx>() - y).norm(), 1e-13);
}

TEST(LocalOperator, SumsAndBounds) {
  OperatorSum a(3, 2), b(3, 2);
  a.add(0, 2, Matrix::Identity(4, 4));
  b.add(1, 2, 2.0 * Matrix::Identity(4, 4));
  b.add_constant(1.0);
  a += b;
  EXPECT_EQ(a.terms().size(), 2u);
  EXPECT_EQ(a.max_width(), 2);
  EXPECT_NEAR(a.upper_bound(), 4.0, 1e-12);
  EXPECT_LT((a.dense() - 4.0 * Matrix::Identity(8, 8)).norm(), 1e-12);
}

TEST(LocalOperator, AssembleWindowIsLocalSum) {
  const Matrix zz = oracle::kron(oracle::pauli('Z'), oracle::pauli('Z'));
  const Matrix w = assemble_window({{2, 2, zz}, {3, 2, zz}}, 2, 3, 2);
  const Matrix ref = oracle::kron(zz, oracle::pauli('I')) + oracle::kron(oracle::pauli('I'), zz);
  EXPECT_LT((w - ref).norm(), 1e-13);
}

TEST(LocalOperator, RejectsMisplacedTerms) {
  OperatorSum h(3, 2);
  EXPECT_THROW(h.add(2, 2, Matrix::Identity(4, 4)), InvalidArgument);
  EXPECT_THROW(h.add(0, 2, Matrix::Identity(3, 3)), InvalidArgument);
  OperatorSum other(4, 2);
  EXPECT_THROW(h += other, InvalidArgument);
}

TEST(LocalOperator, DenseRespectsLimit) {
  OperatorSum h(16, 2);
  EXPECT_THROW(h.dense(), DimensionLimitError);
}
