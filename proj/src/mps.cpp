#include "agsp/mps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/QR>

#include "agsp/linalg.hpp"

namespace agsp {

std::vector<int> MatrixProductState::bond_dims() const {
  std::vector<int> out;
  for (int k = 0; k + 1 < n; ++k) out.push_back(tensors[static_cast<std::size_t>(k)].right);
  return out;
}

int MatrixProductState::max_bond() const {
  int b = 1;
  for (int x : bond_dims()) b = std::max(b, x);
  return b;
}

int truncation_rank(const RealVector& s, const TruncationPolicy& policy) {
  const int len = static_cast<int>(s.size());
  if (len == 0) return 0;
  if (policy.max_bond < 1) throw InvalidArgument("truncation: max_bond must be >= 1");
  const double total = s.squaredNorm();
  if (total == 0.0) return 1;
  // Discarded weight of keeping the first k values.
  int keep = len;
  double tail = 0.0;
  while (keep > 1) {
    const double w = s(keep - 1) * s(keep - 1);
    if ((tail + w) / total > policy.cutoff) break;
    tail += w;
    --keep;
  }
  while (keep < len && keep < policy.max_bond && s(keep) >= s(keep - 1) * (1.0 - kMultipletTolerance)) ++keep;
  return std::min(keep, policy.max_bond);
}

MatrixProductState product_state(const std::vector<Vector>& sites) {
  if (sites.empty()) throw InvalidArgument("product_state: no sites");
  MatrixProductState psi;
  psi.n = static_cast<int>(sites.size());
  psi.d = static_cast<int>(sites.front().size());
  for (const auto& v : sites) {
    if (v.size() != psi.d) throw InvalidArgument("product_state: inconsistent local dimension");
    psi.tensors.push_back({1, 1, Matrix(v)});
  }
  psi.center = -1;
  return psi;
}

MatrixProductState random_product_state(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> sites;
  for (int k = 0; k < n; ++k) {
    Vector v(d);
    for (int s = 0; s < d; ++s) v(s) = normal(rng);
    sites.push_back(v.normalized());
  }
  return product_state(sites);
}

MatrixProductState from_dense(const Vector& v, int n, int d, const TruncationPolicy& policy) {
  if (n < 1 || d < 2) throw InvalidArgument("from_dense: invalid shape");
  if (v.size() != hilbert_dim(n, d)) throw InvalidArgument("from_dense: vector length is not d^n");
  if (std::abs(v.norm() - 1.0) > 1e-10) throw InvalidArgument("from_dense: vector is not normalized");
  MatrixProductState psi;
  psi.n = n;
  psi.d = d;
  // rest(l, j) holds the unprocessed amplitudes; j runs digit-major over the remaining sites.
  Matrix rest = v.transpose();
  int chi = 1;
  for (int k = 0; k + 1 < n; ++k) {
    const Eigen::Index tail = rest.cols() / d;
    Matrix m(static_cast<Eigen::Index>(chi) * d, tail);
    for (int s = 0; s < d; ++s) m.block(static_cast<Eigen::Index>(chi) * s, 0, chi, tail) = rest.middleCols(s * tail, tail);
    const linalg::ThinSvd f = linalg::svd(m);
    const int keep = truncation_rank(f.s, policy);
    const double total = f.s.squaredNorm();
    if (total > 0.0) psi.cumulative_truncation_error += (total - f.s.head(keep).squaredNorm()) / total;
    psi.tensors.push_back({chi, keep, f.u.leftCols(keep)});
    rest = f.s.head(keep).cast<cplx>().asDiagonal() * f.v.leftCols(keep).adjoint();
    chi = keep;
  }
  Matrix last(static_cast<Eigen::Index>(chi) * d, 1);
  for (int s = 0; s < d; ++s) last.block(static_cast<Eigen::Index>(chi) * s, 0, chi, 1) = rest.col(s);
  const double nrm = last.norm();
  if (nrm > 0.0) last /= nrm;
  psi.tensors.push_back({chi, 1, last});
  psi.center = n - 1;
  return psi;
}

Vector to_dense(const MatrixProductState& psi, std::int64_t limit) {
  const std::int64_t dim = hilbert_dim(psi.n, psi.d);
  if (dim > limit) throw DimensionLimitError("to_dense: dimension exceeds the dense limit");
  Matrix left = Matrix::Ones(1, 1);  // rows: prefix digits, cols: bond
  for (const auto& a : psi.tensors) {
    Matrix next(left.rows() * psi.d, a.right);
    for (int s = 0; s < psi.d; ++s) {
      const Matrix part = left * a.slice(s);
      for (Eigen::Index p = 0; p < left.rows(); ++p) next.row(p * psi.d + s) = part.row(p);
    }
    left = std::move(next);
  }
  return left.col(0);
}

cplx inner(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.n != b.n || a.d != b.d) throw InvalidArgument("inner: shape mismatch");
  Matrix e = Matrix::Ones(1, 1);
  for (int k = 0; k < a.n; ++k) {
    const auto& ta = a.tensors[static_cast<std::size_t>(k)];
    const auto& tb = b.tensors[static_cast<std::size_t>(k)];
    Matrix next = Matrix::Zero(ta.right, tb.right);
    for (int s = 0; s < a.d; ++s) next.noalias() += ta.slice(s).adjoint() * e * tb.slice(s);
    e = std::move(next);
  }
  return e(0, 0);
}

double norm(const MatrixProductState& psi) { return std::sqrt(std::max(0.0, inner(psi, psi).real())); }

MatrixProductState scaled(const MatrixProductState& psi, cplx factor) {
  MatrixProductState out = psi;
  const int site = psi.center >= 0 ? psi.center : 0;
  out.tensors[static_cast<std::size_t>(site)].data *= factor;
  return out;
}

MatrixProductState add(const MatrixProductState& a, cplx ca, const MatrixProductState& b, cplx cb) {
  if (a.n != b.n || a.d != b.d) throw InvalidArgument("add: shape mismatch");
  MatrixProductState out;
  out.n = a.n;
  out.d = a.d;
  out.cumulative_truncation_error = std::max(a.cumulative_truncation_error, b.cumulative_truncation_error);
  if (a.n == 1) {
    out.tensors.push_back({1, 1, ca * a.tensors[0].data + cb * b.tensors[0].data});
    return out;
  }
  for (int k = 0; k < a.n; ++k) {
    const auto& ta = a.tensors[static_cast<std::size_t>(k)];
    const auto& tb = b.tensors[static_cast<std::size_t>(k)];
    const bool first = k == 0, last = k == a.n - 1;
    const int l = first ? 1 : ta.left + tb.left;
    const int r = last ? 1 : ta.right + tb.right;
    SiteTensor t{l, r, Matrix::Zero(static_cast<Eigen::Index>(l) * a.d, r)};
    for (int s = 0; s < a.d; ++s) {
      auto blk = t.slice(s);
      const cplx fa = first ? ca : cplx(1.0), fb = first ? cb : cplx(1.0);
      blk.block(0, 0, ta.left, ta.right) = fa * ta.slice(s);
      blk.block(first ? 0 : ta.left, last ? 0 : ta.right, tb.left, tb.right) += fb * tb.slice(s);
    }
    out.tensors.push_back(std::move(t));
  }
  return out;
}

namespace {

// Moves the gauge of site k one step right; the R factor goes into site k+1.
void shift_right(MatrixProductState& psi, int k) {
  auto& a = psi.tensors[static_cast<std::size_t>(k)];
  auto& b = psi.tensors[static_cast<std::size_t>(k + 1)];
  Eigen::HouseholderQR<Matrix> qr(a.data);
  const Eigen::Index rows = a.data.rows();
  const Eigen::Index kk = std::min<Eigen::Index>(rows, a.right);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, kk);
  Matrix r = qr.matrixQR().topRows(kk).template triangularView<Eigen::Upper>();
  a.data = std::move(q);
  a.right = static_cast<int>(kk);
  // b: (χl·d × χr) with χl = old a.right. New b slice s = r · b_s.
  Matrix nb(kk * psi.d, b.right);
  for (int s = 0; s < psi.d; ++s) nb.block(kk * s, 0, kk, b.right) = r * b.slice(s);
  b.data = std::move(nb);
  b.left = static_cast<int>(kk);
}

// Moves the gauge of site k one step left; the L factor goes into site k-1.
void shift_left(MatrixProductState& psi, int k) {
  auto& a = psi.tensors[static_cast<std::size_t>(k)];
  auto& b = psi.tensors[static_cast<std::size_t>(k - 1)];
  // View a as χl × (d·χr); QR of its adjoint gives a = R^† Q^†.
  const Eigen::Map<const Matrix> wide(a.data.data(), a.left, static_cast<Eigen::Index>(psi.d) * a.right);
  const Matrix adj = wide.adjoint();
  Eigen::HouseholderQR<Matrix> qr(adj);
  const Eigen::Index cols = adj.rows();
  const Eigen::Index kk = std::min<Eigen::Index>(cols, a.left);
  Matrix q = qr.householderQ() * Matrix::Identity(cols, kk);
  Matrix r = qr.matrixQR().topRows(kk).template triangularView<Eigen::Upper>();
  const Matrix new_wide = q.adjoint();  // kk × (d·χr)
  a.data = Eigen::Map<const Matrix>(new_wide.data(), kk * psi.d, a.right);
  a.left = static_cast<int>(kk);
  const Matrix rd = r.adjoint();  // χl_old × kk
  Matrix nb(static_cast<Eigen::Index>(b.left) * psi.d, kk);
  nb = b.data * rd;
  b.data = std::move(nb);
  b.right = static_cast<int>(kk);
}

}  // namespace

MatrixProductState canonicalize(const MatrixProductState& psi, int center) {
  if (center < 0 || center >= psi.n) throw InvalidArgument("canonicalize: center out of range");
  MatrixProductState out = psi;
  for (int k = 0; k < center; ++k) shift_right(out, k);
  for (int k = out.n - 1; k > center; --k) shift_left(out, k);
  out.center = center;
  return out;
}

double canonical_deviation(const MatrixProductState& psi) {
  if (psi.center < 0) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (int k = 0; k < psi.n; ++k) {
    const auto& a = psi.tensors[static_cast<std::size_t>(k)];
    if (k < psi.center) {
      dev = std::max(dev, (a.data.adjoint() * a.data - Matrix::Identity(a.right, a.right)).cwiseAbs().maxCoeff());
    } else if (k > psi.center) {
      const Eigen::Map<const Matrix> wide(a.data.data(), a.left, static_cast<Eigen::Index>(psi.d) * a.right);
      dev = std::max(dev, (wide * wide.adjoint() - Matrix::Identity(a.left, a.left)).cwiseAbs().maxCoeff());
    }
  }
  return dev;
}

MatrixProductState compress_unnormalized(const MatrixProductState& psi, const TruncationPolicy& policy) {
  MatrixProductState out = canonicalize(psi, 0);
  for (int k = 0; k + 1 < out.n; ++k) {
    auto& a = out.tensors[static_cast<std::size_t>(k)];
    auto& b = out.tensors[static_cast<std::size_t>(k + 1)];
    const linalg::ThinSvd f = linalg::svd(a.data);
    const int keep = truncation_rank(f.s, policy);
    const double total = f.s.squaredNorm();
    if (total > 0.0) out.cumulative_truncation_error += (total - f.s.head(keep).squaredNorm()) / total;
    a.data = f.u.leftCols(keep);
    a.right = keep;
    const Matrix carry = f.s.head(keep).cast<cplx>().asDiagonal() * f.v.leftCols(keep).adjoint();
    Matrix nb(static_cast<Eigen::Index>(keep) * out.d, b.right);
    for (int s = 0; s < out.d; ++s) nb.block(static_cast<Eigen::Index>(keep) * s, 0, keep, b.right) = carry * b.slice(s);
    b.data = std::move(nb);
    b.left = keep;
  }
  out.center = out.n - 1;
  return out;
}

MatrixProductState compress(const MatrixProductState& psi, const TruncationPolicy& policy) {
  MatrixProductState out = compress_unnormalized(psi, policy);
  auto& last = out.tensors.back().data;
  const double nrm = last.norm();
  if (nrm > 0.0) last /= nrm;
  return out;
}

MatrixProductState compress(const MatrixProductState& psi, int max_bond, double cutoff) {
  return compress(psi, TruncationPolicy{max_bond, cutoff});
}

nlohmann::json mps_to_json(const MatrixProductState& psi) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : psi.tensors) {
    // Nested as [left][physical][right] of [re, im].
    nlohmann::json a = nlohmann::json::array();
    for (int l = 0; l < t.left; ++l) {
      nlohmann::json bs = nlohmann::json::array();
      for (int s = 0; s < psi.d; ++s) {
        nlohmann::json rs = nlohmann::json::array();
        for (int r = 0; r < t.right; ++r) {
          const cplx z = t.data(l + static_cast<Eigen::Index>(t.left) * s, r);
          rs.push_back({z.real(), z.imag()});
        }
        bs.push_back(std::move(rs));
      }
      a.push_back(std::move(bs));
    }
    tensors.push_back(std::move(a));
  }
  return {{"n", psi.n}, {"d", psi.d}, {"bond_dims", psi.bond_dims()}, {"center", psi.center},
          {"cumulative_truncation_error", psi.cumulative_truncation_error}, {"tensors", std::move(tensors)}};
}

MatrixProductState mps_from_json(const nlohmann::json& j) {
  MatrixProductState psi;
  try {
    psi.n = j.at("n").get<int>();
    psi.d = j.at("d").get<int>();
    psi.center = j.value("center", -1);
    psi.cumulative_truncation_error = j.value("cumulative_truncation_error", 0.0);
    for (const auto& a : j.at("tensors")) {
      const int l = static_cast<int>(a.size());
      const int r = static_cast<int>(a.at(0).at(0).size());
      SiteTensor t{l, r, Matrix(static_cast<Eigen::Index>(l) * psi.d, r)};
      for (int x = 0; x < l; ++x)
        for (int s = 0; s < psi.d; ++s)
          for (int y = 0; y < r; ++y) {
            const auto& z = a.at(x).at(s).at(y);
            t.data(x + static_cast<Eigen::Index>(l) * s, y) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
          }
      psi.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("MPS JSON: ") + e.what());
  }
  if (static_cast<int>(psi.tensors.size()) != psi.n) throw InvalidArgument("MPS JSON: tensor count differs from n");
  for (int k = 0; k + 1 < psi.n; ++k)
    if (psi.tensors[static_cast<std::size_t>(k)].right != psi.tensors[static_cast<std::size_t>(k + 1)].left)
      throw InvalidArgument("MPS JSON: bond dimensions do not match");
  return psi;
}

}  // namespace agsp
