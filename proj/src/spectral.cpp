#include "agsp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "agsp/linalg.hpp"

namespace agsp {

HermitianOperator::HermitianOperator(Matrix entries, std::vector<std::string> tags) : tags_(std::move(tags)) {
  if (entries.rows() != entries.cols()) throw InvalidArgument("HermitianOperator: matrix is not square");
  const double scale = std::max(1.0, linalg::max_abs(entries));
  const double dev = linalg::hermiticity_deviation(entries);
  if (dev > 1e-12 * scale) {
    std::ostringstream os;
    os << "HermitianOperator: Hermiticity deviation " << dev << " exceeds tolerance";
    throw InvalidArgument(os.str());
  }
  if (dev > 0.0) entries = 0.5 * (entries + entries.adjoint()).eval();
  entries_ = std::move(entries);
}

SpectralDecomposition eigendecompose(const HermitianOperator& h, const EigenOptions& opts) {
  const Eigen::Index dim = h.dim();
  if (dim < 1) throw InvalidArgument("eigendecompose: empty operator");
  if (dim > opts.limit)
    throw DimensionLimitError("eigendecompose: dimension " + std::to_string(dim) + " exceeds limit " +
                              std::to_string(opts.limit));
  SpectralDecomposition sd;
  if (linalg::is_real(h.entries())) {
    const RealMatrix hr = h.entries().real();
    linalg::RealEigenPairs ep = linalg::eigh_real(hr);
    if (opts.audit) {
      const RealMatrix r = hr * ep.vectors - ep.vectors * ep.values.asDiagonal();
      sd.residual_max = r.colwise().norm().maxCoeff();
      sd.orthonormality_deviation =
          (ep.vectors.transpose() * ep.vectors - RealMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    }
    sd.eigenvalues = std::move(ep.values);
    sd.eigenvectors = ep.vectors.cast<cplx>();
  } else {
    linalg::EigenPairs ep = linalg::eigh(h.entries());
    if (opts.audit) {
      const Matrix r = h.entries() * ep.vectors - ep.vectors * ep.values.cast<cplx>().asDiagonal();
      sd.residual_max = r.colwise().norm().maxCoeff();
      sd.orthonormality_deviation =
          (ep.vectors.adjoint() * ep.vectors - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    }
    sd.eigenvalues = std::move(ep.values);
    sd.eigenvectors = std::move(ep.vectors);
  }
  sd.epsilon0 = sd.eigenvalues(0);
  sd.u = sd.eigenvalues(dim - 1);
  sd.epsilon1 = dim > 1 ? sd.eigenvalues(1) : sd.epsilon0;
  sd.norm = std::max(std::abs(sd.epsilon0), std::abs(sd.u));
  sd.degenerate = dim > 1 && sd.gap() < opts.degeneracy_tol * std::max(sd.norm, std::numeric_limits<double>::min());
  return sd;
}

void require_unique_ground(const SpectralDecomposition& sd, const std::string& what) {
  if (sd.degenerate) {
    std::ostringstream os;
    os << what << ": ground state is degenerate (gap " << sd.gap() << ")";
    throw DegenerateGroundStateError(os.str());
  }
}

Matrix truncate_matrix(const Matrix& h, double t) {
  if (!std::isfinite(t)) {
    if (t > 0) return h;
    throw InvalidArgument("truncate: threshold must be finite or +inf");
  }
  const linalg::EigenPairs ep = linalg::eigh(h);
  if (ep.values.size() == 0 || ep.values.maxCoeff() <= t) return h;
  return linalg::reconstruct(ep.vectors, ep.values.cwiseMin(t));
}

HermitianOperator truncate_operator(const HermitianOperator& h, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("truncate_operator: threshold must be finite");
  HermitianOperator out(truncate_matrix(h.entries(), t), h.tags());
  std::ostringstream os;
  os << "truncated:" << t;
  out.tag(os.str());
  return out;
}

namespace {

double min_eig(const Matrix& m) { return m.size() == 0 ? 0.0 : linalg::eigvalsh(m)(0); }
double max_eig(const Matrix& m) { return m.size() == 0 ? 0.0 : linalg::eigvalsh(m).maxCoeff(); }

}  // namespace

TruncatedHamiltonian truncated_hamiltonian(const SegmentedHamiltonian& seg, double t) {
  if (std::isnan(t) || t < 0.0) throw InvalidArgument("truncated_hamiltonian: t must be >= 0");
  TruncatedHamiltonian out;
  out.t = t;
  out.sum = OperatorSum(seg.n, seg.d);

  const LocalTerm left = seg.left_with_first_bond();
  const LocalTerm right = seg.right_with_last_bond();
  const LocalTerm left_t{left.first_site, left.width, truncate_matrix(left.op, t)};
  const LocalTerm right_t{right.first_site, right.width, truncate_matrix(right.op, t)};
  out.order_certificate = std::min(min_eig(left.op - left_t.op), min_eig(right.op - right_t.op));

  out.sum.add(left_t);
  out.norm_bound = max_eig(left_t.op) + max_eig(right_t.op);
  for (int i = 2; i <= seg.s - 1; ++i) {
    out.sum.add(seg.bond(i));
    out.norm_bound += max_eig(seg.bond(i).op);
  }
  out.sum.add(right_t);
  return out;
}

HermitianOperator build_truncated_hamiltonian(const SegmentedHamiltonian& seg, double t, std::int64_t limit) {
  const TruncatedHamiltonian th = truncated_hamiltonian(seg, t);
  if (th.order_certificate < -1e-9)
    throw ConvergenceError("build_truncated_hamiltonian: H^(t) <= H certificate failed");
  if (th.norm_bound > 2.0 * t + seg.s + 1e-9)
    throw ConvergenceError("build_truncated_hamiltonian: norm bound 2t + s exceeded");
  std::ostringstream os;
  os << "H^(t):t=" << t << ",m=" << seg.m << ",s=" << seg.s;
  return HermitianOperator(th.sum.dense(limit), {os.str()});
}

SpectralProjector spectral_projector(const SpectralDecomposition& sd, double t, std::string source) {
  SpectralProjector p;
  p.threshold = t;
  p.source = std::move(source);
  Eigen::Index k = 0;
  while (k < sd.eigenvalues.size() && sd.eigenvalues(k) <= t + kThresholdTie) ++k;
  p.basis = sd.eigenvectors.leftCols(k);
  return p;
}

SpectralProjector spectral_projector(const HermitianOperator& h, double t) {
  EigenOptions opts;
  opts.audit = false;
  const std::string source = h.tags().empty() ? std::string("operator") : h.tags().back();
  return spectral_projector(eigendecompose(h, opts), t, source);
}

double tail_weight(const SpectralProjector& p, const Vector& state) {
  if (p.basis.rows() != state.size()) throw InvalidArgument("tail_weight: dimension mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-10) throw InvalidArgument("tail_weight: state is not normalized");
  // Direct residual; 1 − ‖Pv‖² cancels catastrophically for small tails.
  const Vector outside = state - p.basis * (p.basis.adjoint() * state);
  return std::min(outside.norm(), 1.0);
}

double offdiag_mixing_norm(const Matrix& a, const SpectralDecomposition& h_minus_a, double t, double u) {
  if (t < u) throw InvalidArgument("offdiag_mixing_norm: requires t >= u");
  const RealVector& w = h_minus_a.eigenvalues;
  Eigen::Index low = 0;
  while (low < w.size() && w(low) <= u + kThresholdTie) ++low;
  Eigen::Index high_start = 0;
  while (high_start < w.size() && w(high_start) <= t + kThresholdTie) ++high_start;
  const Eigen::Index high = w.size() - high_start;
  if (low == 0 || high == 0) return 0.0;
  const Matrix& v = h_minus_a.eigenvectors;
  const Matrix block = v.rightCols(high).adjoint() * (a * v.leftCols(low));
  return linalg::spectral_norm(block);
}

double offdiag_mixing_norm(const HermitianOperator& a, const HermitianOperator& h_minus_a, double t, double u) {
  if (a.dim() != h_minus_a.dim()) throw InvalidArgument("offdiag_mixing_norm: dimension mismatch");
  if (t < u) throw InvalidArgument("offdiag_mixing_norm: requires t >= u");
  EigenOptions opts;
  opts.audit = false;
  return offdiag_mixing_norm(a.entries(), eigendecompose(h_minus_a, opts), t, u);
}

double mixing_reference_bound(double t, double u) { return 2.0 * std::exp(-(t - u) / 8.0); }

double markov_closeness_bound(double delta, double gap) {
  if (!(gap > 0.0)) throw InvalidArgument("markov_closeness_bound: gap must be positive");
  if (delta < 0.0) throw InvalidArgument("markov_closeness_bound: delta must be >= 0");
  return 2.0 * delta / gap;
}

double phase_aligned_distance_sq(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidArgument("phase_aligned_distance_sq: dimension mismatch");
  return std::max(0.0, a.squaredNorm() + b.squaredNorm() - 2.0 * std::abs(a.dot(b)));
}

ASplit split_a(const SegmentedHamiltonian& seg) {
  if (seg.s < 4) throw InvalidArgument("split_a: requires s >= 4");
  ASplit out;
  out.a = OperatorSum(seg.n, seg.d);
  out.a.add(seg.bond(2));
  out.a.add(seg.bond(seg.s - 1));

  out.left = seg.left_with_first_bond();
  out.right = seg.right_with_last_bond();
  const int mid_first = out.left.last_site() + 1;
  const int mid_width = out.right.first_site - mid_first;
  std::vector<LocalTerm> mid_terms;
  for (int i = 3; i <= seg.s - 2; ++i) mid_terms.push_back(seg.bond(i));
  out.middle = {mid_first, mid_width, assemble_window(mid_terms, mid_first, mid_width, seg.d)};

  out.rest = OperatorSum(seg.n, seg.d);
  out.rest.add(out.left);
  out.rest.add(out.middle);
  out.rest.add(out.right);
  return out;
}

nlohmann::json spectral_report_json(const SpectralDecomposition& sd) {
  return {{"epsilon0", sd.epsilon0}, {"epsilon1", sd.epsilon1}, {"gap", sd.gap()},
          {"u", sd.u},               {"degenerate", sd.degenerate}, {"residual_max", sd.residual_max}};
}

}  // namespace agsp
