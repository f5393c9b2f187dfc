#pragma once

#include <string>
#include <vector>

#include "agsp/types.hpp"

namespace agsp {

/// A dense operator acting on the contiguous sites [first_site, first_site + width).
/// Sites are 0-based; the basis index of a chain state puts site 0 in the most
/// significant digit, so an operator on sites (i, i+1) embeds as 1 ⊗ op ⊗ 1.
struct LocalTerm {
  int first_site = 0;
  int width = 1;
  Matrix op;

  int last_site() const { return first_site + width - 1; }
};

/// Hermitian operator presented as a sum of local terms plus a multiple of the
/// identity. This is the matrix-free form used by the iterative solvers and the
/// MPO builder; `dense()` realizes it as a full matrix.
class OperatorSum {
 public:
  OperatorSum() = default;
  OperatorSum(int n, int d);

  int sites() const { return n_; }
  int local_dim() const { return d_; }
  std::int64_t dim() const { return hilbert_dim(n_, d_); }

  const std::vector<LocalTerm>& terms() const { return terms_; }
  double constant() const { return constant_; }

  OperatorSum& add(LocalTerm term);
  OperatorSum& add(int first_site, int width, Matrix op);
  OperatorSum& add_constant(double c);
  OperatorSum& operator+=(const OperatorSum& other);

  /// Widest support among the terms, in sites.
  int max_width() const;

  /// Upper bound on the largest eigenvalue: Σ λ_max(term) + constant.
  double upper_bound() const;

  /// True when every term matrix has zero imaginary part.
  bool is_real() const;

  Vector apply(const Vector& v) const;
  /// Applies to each column of `block`.
  Matrix apply_block(const Matrix& block) const;
  /// Real arithmetic; requires is_real().
  RealMatrix apply_block_real(const RealMatrix& block) const;

  Matrix dense(std::int64_t limit = kDefaultDenseLimit) const;

 private:
  int n_ = 0;
  int d_ = 2;
  std::vector<LocalTerm> terms_;
  double constant_ = 0.0;
};

/// out += op acting on sites [first, first + width) of `in` (both length d^n).
/// `op_t` is the transposed local matrix.
template <typename Scalar>
void apply_local_add_t(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& op_t, int first_site, int width,
                       int n, int d, const Scalar* in, Scalar* out) {
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index loc = hilbert_dim(width, d);
  const Eigen::Index right = hilbert_dim(n - first_site - width, d);
  const Eigen::Index left = hilbert_dim(first_site, d);
  for (Eigen::Index l = 0; l < left; ++l) {
    Eigen::Map<const Block> x(in + l * loc * right, right, loc);
    Eigen::Map<Block> y(out + l * loc * right, right, loc);
    y.noalias() += x * op_t;
  }
}

void apply_local_add(const LocalTerm& term, int n, int d, const cplx* in, cplx* out);

/// 1 ⊗ ... ⊗ op ⊗ ... ⊗ 1 as a dense d^n × d^n matrix.
Matrix embed(const LocalTerm& term, int n, int d);

/// Dense sum of the given terms over the contiguous window of sites
/// [first_site, first_site + width); terms must lie inside the window.
Matrix assemble_window(const std::vector<LocalTerm>& terms, int first_site, int width, int d);

}  // namespace agsp
