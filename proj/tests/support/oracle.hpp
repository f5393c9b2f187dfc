#pragma once

// Reference constructions that share no code with the library: physical
// Hamiltonians from explicit Kronecker products and Eigen's own dense
// solvers.

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli(char which) {
  Mat p(2, 2);
  switch (which) {
    case 'X': p << 0, 1, 1, 0; break;
    case 'Y': p << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': p << 1, 0, 0, -1; break;
    default: p.setIdentity();
  }
  return p;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// op on site k of n qubits, site 0 the most significant factor.
inline Mat site_op(const Mat& op, int k, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int j = 0; j < n; ++j) out = kron(out, j == k ? op : pauli('I'));
  return out;
}

/// Kronecker string: `ops` on sites k and k+1 (the second may be the identity).
inline Mat bond_op(const Mat& a, const Mat& b, int k, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int j = 0; j < n; ++j) out = kron(out, j == k ? a : j == k + 1 ? b : pauli('I'));
  return out;
}

/// H = -J Σ Z_i Z_{i+1} - h Σ X_i - g Σ Z_i with open ends.
inline Mat tfim(int n, double J, double h, double g = 0.0) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  Mat H = Mat::Zero(dim, dim);
  for (int i = 0; i + 1 < n; ++i) H -= J * bond_op(pauli('Z'), pauli('Z'), i, n);
  for (int i = 0; i < n; ++i) H -= h * site_op(pauli('X'), i, n) + g * site_op(pauli('Z'), i, n);
  return H;
}

/// H = J Σ σ_i·σ_{i+1} - hz Σ Z_i with open ends.
inline Mat heisenberg(int n, double J, double hz = 0.0) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  Mat H = Mat::Zero(dim, dim);
  for (int i = 0; i + 1 < n; ++i)
    for (char p : {'X', 'Y', 'Z'}) H += J * bond_op(pauli(p), pauli(p), i, n);
  for (int i = 0; i < n; ++i) H -= hz * site_op(pauli('Z'), i, n);
  return H;
}

struct Eig {
  Eigen::VectorXd values;
  Mat vectors;
};

inline Eig eig(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Real-symmetric route for real Hamiltonians; much faster than the complex solver.
inline Eig eig_real(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
  return {es.eigenvalues(), es.eigenvectors().cast<cplx>()};
}

/// Operator Schmidt rank of an n-qubit operator across `cut`: O(iL iR, jL jR)
/// regrouped as (iL jL) x (iR jR), singular values above tol * sigma_max.
template <typename M>
int operator_rank(const M& op, int n, int cut, double tol) {
  const Eigen::Index dl = Eigen::Index(1) << cut, dr = Eigen::Index(1) << (n - cut);
  M r(dl * dl, dr * dr);
  for (Eigen::Index il = 0; il < dl; ++il)
    for (Eigen::Index jl = 0; jl < dl; ++jl)
      for (Eigen::Index ir = 0; ir < dr; ++ir)
        for (Eigen::Index jr = 0; jr < dr; ++jr) r(il * dl + jl, ir * dr + jr) = op(il * dr + ir, jl * dr + jr);
  Eigen::BDCSVD<M> svd(r);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > tol * sv(0);
  return rank;
}

/// Von Neumann entropy in bits of the first `cut` sites.
inline double entropy_bits(const Vec& psi, int n, int cut) {
  const Eigen::Index left = Eigen::Index(1) << cut, right = Eigen::Index(1) << (n - cut);
  Mat m(left, right);
  for (Eigen::Index l = 0; l < left; ++l)
    for (Eigen::Index r = 0; r < right; ++r) m(l, r) = psi(l * right + r);
  Eigen::JacobiSVD<Mat> svd(m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double p = svd.singularValues()(i) * svd.singularValues()(i);
    if (p > 0) s -= p * std::log2(p);
  }
  return s;
}

/// Chebyshev polynomial from the trigonometric / hyperbolic definition.
inline double chebyshev(int l, double x) {
  if (std::abs(x) <= 1.0) return std::cos(l * std::acos(x));
  const double v = std::cosh(l * std::acosh(std::abs(x)));
  return (x < 0 && l % 2 == 1) ? -v : v;
}

}  // namespace oracle
