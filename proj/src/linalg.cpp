#include "agsp/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <string>

namespace agsp {

std::int64_t hilbert_dim(int n, int d) {
  std::int64_t dim = 1;
  for (int i = 0; i < n; ++i) {
    if (dim > std::numeric_limits<std::int64_t>::max() / d) return std::numeric_limits<std::int64_t>::max();
    dim *= d;
  }
  return dim;
}

namespace linalg {

bool is_real(const Matrix& m) {
  const cplx* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (p[i].imag() != 0.0) return false;
  return true;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_deviation(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j; i < m.rows(); ++i) dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
  return dev;
}

namespace {

// Weak so that any LAPACK provider links; only OpenBLAS defines them.
extern "C" {
void gotoblas_dynamic_init() __attribute__((weak));
void gotoblas_dynamic_quit() __attribute__((weak));
}

double eigensolver_probe() {
  const lapack_int n = 128;
  RealMatrix a(n, n);
  for (lapack_int j = 0; j < n; ++j)
    for (lapack_int i = 0; i < n; ++i) a(i, j) = std::sin(0.37 * (i + 1) * (j + 1)) + std::sin(0.37 * (j + 1) * (i + 1));
  RealMatrix v = a;
  RealVector w(n);
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, v.data(), n, w.data()) != 0) return 1.0;
  return (a * v - v * w.asDiagonal()).norm() / a.norm();
}

// Some virtualized hosts advertise AVX-512 but OpenBLAS's kernels for it
// return wrong eigenvectors there. A failed probe reselects the Haswell kernel
// unless OPENBLAS_CORETYPE was chosen explicitly.
void ensure_sound_blas() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (eigensolver_probe() < 1e-10) return;
    if (std::getenv("OPENBLAS_CORETYPE") == nullptr && gotoblas_dynamic_init && gotoblas_dynamic_quit) {
      setenv("OPENBLAS_CORETYPE", "Haswell", 1);
      gotoblas_dynamic_quit();
      gotoblas_dynamic_init();
      if (eigensolver_probe() < 1e-10) return;
    }
    throw ConvergenceError("LAPACK self-check failed: dsyevd returns inaccurate eigenvectors");
  });
}

void check_info(lapack_int info, const char* routine) {
  if (info != 0) throw ConvergenceError(std::string(routine) + " failed with info=" + std::to_string(info));
}

}  // namespace

RealEigenPairs eigh_real(const RealMatrix& m) {
  ensure_sound_blas();
  if (m.rows() != m.cols()) throw InvalidArgument("eigh_real: matrix is not square");
  const auto n = static_cast<lapack_int>(m.rows());
  RealMatrix a = m;
  RealVector w(n);
  if (n > 0) check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data()), "dsyevd");
  return {std::move(w), std::move(a)};
}

EigenPairs eigh_complex(const Matrix& m) {
  ensure_sound_blas();
  const auto n = static_cast<lapack_int>(m.rows());
  Matrix a = m;
  RealVector w(n);
  if (n > 0)
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                              w.data()),
               "zheevd");
  return {std::move(w), std::move(a)};
}

EigenPairs eigh(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("eigh: matrix is not square");
  if (!is_real(m)) return eigh_complex(m);
  RealEigenPairs r = eigh_real(RealMatrix(m.real()));
  return {std::move(r.values), r.vectors.cast<cplx>()};
}

RealVector eigvalsh(const Matrix& m) {
  ensure_sound_blas();
  if (m.rows() != m.cols()) throw InvalidArgument("eigvalsh: matrix is not square");
  const auto n = static_cast<lapack_int>(m.rows());
  RealVector w(n);
  if (n == 0) return w;
  if (is_real(m)) {
    RealMatrix a = m.real();
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data()), "dsyevd");
  } else {
    Matrix a = m;
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                              w.data()),
               "zheevd");
  }
  return w;
}

RealVector singular_values(const Matrix& m) {
  ensure_sound_blas();
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  RealVector s(std::min(rows, cols));
  if (s.size() == 0) return s;
  if (is_real(m)) {
    RealMatrix a = m.real();
    check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.data(), nullptr, 1, nullptr, 1),
               "dgesdd");
  } else {
    Matrix a = m;
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, reinterpret_cast<lapack_complex_double*>(a.data()),
                              rows, s.data(), nullptr, 1, nullptr, 1),
               "zgesdd");
  }
  return s;
}

ThinSvd svd(const Matrix& m) {
  ensure_sound_blas();
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  const lapack_int k = std::min(rows, cols);
  ThinSvd out;
  out.s.resize(k);
  if (k == 0) {
    out.u.resize(rows, 0);
    out.v.resize(cols, 0);
    return out;
  }
  if (is_real(m)) {
    RealMatrix a = m.real();
    RealMatrix u(rows, k), vt(k, cols);
    check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, a.data(), rows, out.s.data(), u.data(), rows,
                              vt.data(), k),
               "dgesdd");
    out.u = u.cast<cplx>();
    out.v = vt.transpose().cast<cplx>();
  } else {
    Matrix a = m;
    Matrix u(rows, k), vt(k, cols);
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, reinterpret_cast<lapack_complex_double*>(a.data()),
                              rows, out.s.data(), reinterpret_cast<lapack_complex_double*>(u.data()), rows,
                              reinterpret_cast<lapack_complex_double*>(vt.data()), k),
               "zgesdd");
    out.u = std::move(u);
    out.v = vt.adjoint();
  }
  return out;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  // The Gram matrix of the short side is much cheaper than a full SVD for
  // the tall submatrices produced by the mixing-norm scans.
  if (m.rows() > 4 * m.cols() || m.cols() > 4 * m.rows()) {
    Matrix gram = m.rows() > m.cols() ? Matrix(m.adjoint() * m) : Matrix(m * m.adjoint());
    const RealVector w = eigvalsh(gram);
    return std::sqrt(std::max(0.0, w(w.size() - 1)));
  }
  return singular_values(m)(0);
}

Matrix reconstruct(const Matrix& vectors, const RealVector& values) {
  if (is_real(vectors)) {
    const RealMatrix v = vectors.real();
    RealMatrix scaled = v * values.asDiagonal();
    return (scaled * v.transpose()).cast<cplx>();
  }
  Matrix scaled = vectors * values.asDiagonal();
  return scaled * vectors.adjoint();
}

}  // namespace linalg
}  // namespace agsp
