#pragma once

#include <vector>

#include "agsp/local_operator.hpp"
#include "agsp/types.hpp"

namespace agsp {

/// Eigenbasis of a sum of commuting blocks with disjoint, contiguous supports
/// that tile the chain. Product eigenvectors are indexed digit-major like the
/// site basis, so index (a, b, …) has eigenvalue λ_a + λ_b + ….
class BlockSpectrum {
 public:
  BlockSpectrum(const std::vector<LocalTerm>& blocks, int n, int d);

  std::int64_t dim() const { return dim_; }
  /// Unsorted product eigenvalues, one per product index.
  const RealVector& eigenvalues() const { return values_; }

  /// Coefficients W^† v in the product eigenbasis.
  Vector to_eigenbasis(const Vector& v) const;
  /// W c.
  Vector from_eigenbasis(const Vector& c) const;

  /// W^† A W as a dense matrix.
  Matrix operator_in_eigenbasis(const OperatorSum& a) const;

  /// ‖(1 − P_t) state‖ with P_t projecting on product eigenvalues ≤ t.
  double tail_weight(const Vector& state, double t) const;
  /// ‖(1 − P_t) A P_u‖ given A in the product eigenbasis.
  double mixing_norm(const Matrix& a_eig, double t, double u) const;

 private:
  Vector transform(const Vector& v, bool adjoint) const;

  int n_;
  int d_;
  std::int64_t dim_;
  std::vector<LocalTerm> vectors_;  // per block: eigenvector matrix on the block support
  RealVector values_;
};

}  // namespace agsp
