#include "agsp/block_spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "agsp/linalg.hpp"
#include "agsp/spectral.hpp"

namespace agsp {

BlockSpectrum::BlockSpectrum(const std::vector<LocalTerm>& blocks, int n, int d) : n_(n), d_(d), dim_(hilbert_dim(n, d)) {
  if (blocks.empty()) throw InvalidArgument("BlockSpectrum: no blocks");
  int next = 0;
  values_ = RealVector::Zero(1);
  for (const auto& b : blocks) {
    if (b.first_site != next) throw InvalidArgument("BlockSpectrum: blocks must tile the chain in order");
    next = b.last_site() + 1;
    const linalg::EigenPairs ep = linalg::eigh(b.op);
    vectors_.push_back({b.first_site, b.width, ep.vectors});
    RealVector combined(values_.size() * ep.values.size());
    for (Eigen::Index i = 0; i < values_.size(); ++i)
      for (Eigen::Index j = 0; j < ep.values.size(); ++j) combined(i * ep.values.size() + j) = values_(i) + ep.values(j);
    values_ = std::move(combined);
  }
  if (next != n) throw InvalidArgument("BlockSpectrum: blocks do not cover the chain");
}

Vector BlockSpectrum::transform(const Vector& v, bool adjoint) const {
  if (v.size() != dim_) throw InvalidArgument("BlockSpectrum: dimension mismatch");
  Vector cur = v;
  Vector next(dim_);
  for (const auto& b : vectors_) {
    next.setZero();
    // apply_local_add_t expects the transpose of the local operator.
    const Matrix op_t = adjoint ? Matrix(b.op.conjugate()) : Matrix(b.op.transpose());
    apply_local_add_t<cplx>(op_t, b.first_site, b.width, n_, d_, cur.data(), next.data());
    std::swap(cur, next);
  }
  return cur;
}

Vector BlockSpectrum::to_eigenbasis(const Vector& v) const { return transform(v, true); }
Vector BlockSpectrum::from_eigenbasis(const Vector& c) const { return transform(c, false); }

Matrix BlockSpectrum::operator_in_eigenbasis(const OperatorSum& a) const {
  if (a.dim() != dim_) throw InvalidArgument("BlockSpectrum: operator dimension mismatch");
  Matrix out(dim_, dim_);
  Vector e = Vector::Zero(dim_);
  for (std::int64_t k = 0; k < dim_; ++k) {
    e(k) = 1.0;
    out.col(k) = to_eigenbasis(a.apply(from_eigenbasis(e)));
    e(k) = 0.0;
  }
  return out;
}

double BlockSpectrum::tail_weight(const Vector& state, double t) const {
  if (std::abs(state.norm() - 1.0) > 1e-10) throw InvalidArgument("tail_weight: state is not normalized");
  const Vector c = to_eigenbasis(state);
  double tail = 0.0;
  for (std::int64_t k = 0; k < dim_; ++k)
    if (values_(k) > t + kThresholdTie) tail += std::norm(c(k));
  return std::sqrt(std::clamp(tail, 0.0, 1.0));
}

double BlockSpectrum::mixing_norm(const Matrix& a_eig, double t, double u) const {
  if (t < u) throw InvalidArgument("mixing_norm: requires t >= u");
  std::vector<Eigen::Index> rows, cols;
  for (std::int64_t k = 0; k < dim_; ++k) {
    if (values_(k) > t + kThresholdTie) rows.push_back(k);
    if (values_(k) <= u + kThresholdTie) cols.push_back(k);
  }
  if (rows.empty() || cols.empty()) return 0.0;
  Matrix block(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i) block(i, j) = a_eig(rows[i], cols[j]);
  return linalg::spectral_norm(block);
}

}  // namespace agsp
