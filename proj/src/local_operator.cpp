#include "agsp/local_operator.hpp"

#include "agsp/linalg.hpp"

namespace agsp {

OperatorSum::OperatorSum(int n, int d) : n_(n), d_(d) {
  if (n < 1) throw InvalidArgument("OperatorSum: need at least one site");
  if (d < 2) throw InvalidArgument("OperatorSum: local dimension must be >= 2");
}

OperatorSum& OperatorSum::add(LocalTerm term) {
  if (term.first_site < 0 || term.width < 1 || term.first_site + term.width > n_)
    throw InvalidArgument("OperatorSum: term support outside the chain");
  const std::int64_t loc = hilbert_dim(term.width, d_);
  if (term.op.rows() != loc || term.op.cols() != loc)
    throw InvalidArgument("OperatorSum: term matrix does not match its support");
  terms_.push_back(std::move(term));
  return *this;
}

OperatorSum& OperatorSum::add(int first_site, int width, Matrix op) {
  return add(LocalTerm{first_site, width, std::move(op)});
}

OperatorSum& OperatorSum::add_constant(double c) {
  constant_ += c;
  return *this;
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
  if (other.n_ != n_ || other.d_ != d_) throw InvalidArgument("OperatorSum: shape mismatch in sum");
  for (const auto& t : other.terms_) terms_.push_back(t);
  constant_ += other.constant_;
  return *this;
}

int OperatorSum::max_width() const {
  int w = 0;
  for (const auto& t : terms_) w = std::max(w, t.width);
  return w;
}

double OperatorSum::upper_bound() const {
  double b = constant_;
  for (const auto& t : terms_) {
    const RealVector w = linalg::eigvalsh(t.op);
    b += w(w.size() - 1);
  }
  return b;
}

void apply_local_add(const LocalTerm& term, int n, int d, const cplx* in, cplx* out) {
  const Matrix op_t = term.op.transpose();
  apply_local_add_t<cplx>(op_t, term.first_site, term.width, n, d, in, out);
}

bool OperatorSum::is_real() const {
  for (const auto& t : terms_)
    if (!linalg::is_real(t.op)) return false;
  return true;
}

Vector OperatorSum::apply(const Vector& v) const {
  if (v.size() != dim()) throw InvalidArgument("OperatorSum::apply: vector length mismatch");
  Vector out = constant_ * v;
  for (const auto& t : terms_) apply_local_add(t, n_, d_, v.data(), out.data());
  return out;
}

Matrix OperatorSum::apply_block(const Matrix& block) const {
  if (block.rows() != dim()) throw InvalidArgument("OperatorSum::apply_block: row count mismatch");
  Matrix out = constant_ * block;
  for (const auto& t : terms_) {
    const Matrix op_t = t.op.transpose();
    for (Eigen::Index c = 0; c < block.cols(); ++c)
      apply_local_add_t<cplx>(op_t, t.first_site, t.width, n_, d_, block.col(c).data(), out.col(c).data());
  }
  return out;
}

RealMatrix OperatorSum::apply_block_real(const RealMatrix& block) const {
  if (block.rows() != dim()) throw InvalidArgument("OperatorSum::apply_block_real: row count mismatch");
  RealMatrix out = constant_ * block;
  for (const auto& t : terms_) {
    if (!linalg::is_real(t.op)) throw InvalidArgument("OperatorSum::apply_block_real: complex term");
    const RealMatrix op_t = t.op.real().transpose();
    for (Eigen::Index c = 0; c < block.cols(); ++c)
      apply_local_add_t<double>(op_t, t.first_site, t.width, n_, d_, block.col(c).data(), out.col(c).data());
  }
  return out;
}

Matrix embed(const LocalTerm& term, int n, int d) {
  const std::int64_t dim = hilbert_dim(n, d);
  Matrix out = Matrix::Zero(dim, dim);
  const Matrix id = Matrix::Identity(dim, dim);
  for (std::int64_t c = 0; c < dim; ++c) apply_local_add(term, n, d, id.col(c).data(), out.col(c).data());
  return out;
}

Matrix OperatorSum::dense(std::int64_t limit) const {
  const std::int64_t n = dim();
  if (n > limit)
    throw DimensionLimitError("dense operator of dimension " + std::to_string(n) + " exceeds limit " +
                              std::to_string(limit));
  Matrix out = Matrix::Zero(n, n);
  Vector e = Vector::Zero(n);
  for (std::int64_t c = 0; c < n; ++c) {
    e(c) = 1.0;
    out.col(c) = apply(e);
    e(c) = 0.0;
  }
  return out;
}

Matrix assemble_window(const std::vector<LocalTerm>& terms, int first_site, int width, int d) {
  OperatorSum window(width, d);
  for (const auto& t : terms) {
    if (t.first_site < first_site || t.last_site() >= first_site + width)
      throw InvalidArgument("assemble_window: term outside window");
    window.add(t.first_site - first_site, t.width, t.op);
  }
  return window.dense();
}

}  // namespace agsp
