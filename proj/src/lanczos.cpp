#include "agsp/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace agsp {

namespace {

void project_out(Vector& v, const std::vector<Vector>& basis) {
  for (const auto& b : basis) v -= b * b.dot(v);
}

Vector random_start(std::int64_t dim, std::uint64_t seed, const std::vector<Vector>& deflate) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (std::int64_t i = 0; i < dim; ++i) v(i) = normal(rng);
  project_out(v, deflate);
  project_out(v, deflate);
  const double nrm = v.norm();
  if (nrm == 0.0) throw ConvergenceError("lanczos: starting vector vanished after deflation");
  return v / nrm;
}

}  // namespace

LanczosResult lanczos_lowest(const LinearMap& apply, std::int64_t dim, const LanczosOptions& opts,
                             const std::vector<Vector>& deflate) {
  if (dim < 1) throw InvalidArgument("lanczos: empty space");
  const std::int64_t free_dim = dim - static_cast<std::int64_t>(deflate.size());
  if (free_dim < 1) throw InvalidArgument("lanczos: deflation exhausts the space");
  const int max_k = static_cast<int>(std::min<std::int64_t>(opts.max_iterations, free_dim));

  std::vector<Vector> q;
  std::vector<double> alpha, beta;
  q.push_back(random_start(dim, opts.seed, deflate));

  LanczosResult res;
  Eigen::SelfAdjointEigenSolver<RealMatrix> tri;
  for (int k = 0; k < max_k; ++k) {
    Vector w = apply(q[static_cast<std::size_t>(k)]);
    project_out(w, deflate);
    const double a = q[static_cast<std::size_t>(k)].dot(w).real();
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& qi : q) w -= qi * qi.dot(w);
      project_out(w, deflate);
    }
    const double b = w.norm();

    const int m = k + 1;
    const bool invariant = b <= 1e-13 * std::max(1.0, std::abs(a));
    if (m > 40 && m % 4 != 0 && !invariant && m != max_k) {
      beta.push_back(b);
      q.push_back(w / b);
      continue;
    }
    RealVector diag(m), sub(std::max(0, m - 1));
    for (int i = 0; i < m; ++i) diag(i) = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
    tri.computeFromTridiagonal(diag, sub);
    const double theta = tri.eigenvalues()(0);
    const double ritz_residual = b * std::abs(tri.eigenvectors()(m - 1, 0));
    res.iterations = m;
    if (ritz_residual <= opts.tolerance * std::max(1.0, std::abs(theta)) || invariant || m == max_k) {
      Vector x = Vector::Zero(dim);
      for (int i = 0; i < m; ++i) x += tri.eigenvectors()(i, 0) * q[static_cast<std::size_t>(i)];
      project_out(x, deflate);
      x.normalize();
      Vector hx = apply(x);
      project_out(hx, deflate);
      res.value = x.dot(hx).real();
      res.residual = (hx - res.value * x).norm();
      res.vector = std::move(x);
      res.converged = res.residual <= 1e3 * opts.tolerance * std::max(1.0, std::abs(res.value)) || invariant;
      if (res.converged || m == max_k) return res;
    }
    beta.push_back(b);
    q.push_back(w / b);
  }
  return res;
}

ExtremalSpectrum extremal_spectrum(const OperatorSum& h, const LanczosOptions& opts, double degeneracy_tol) {
  const std::int64_t dim = h.dim();
  ExtremalSpectrum out;
  const LinearMap fwd = [&h](const Vector& v) { return h.apply(v); };
  const LinearMap neg = [&h](const Vector& v) -> Vector { return -h.apply(v); };

  const LanczosResult g = lanczos_lowest(fwd, dim, opts);
  out.epsilon0 = g.value;
  out.ground = g.vector;
  out.residual_max = g.residual;
  if (!g.converged) throw ConvergenceError("lanczos: ground state did not converge");

  if (dim > 1) {
    LanczosOptions second = opts;
    second.seed = opts.seed + 1;
    const LanczosResult e = lanczos_lowest(fwd, dim, second, {g.vector});
    if (!e.converged) throw ConvergenceError("lanczos: first excited state did not converge");
    out.epsilon1 = e.value;
    out.residual_max = std::max(out.residual_max, e.residual);
  } else {
    out.epsilon1 = out.epsilon0;
  }

  LanczosOptions top = opts;
  top.seed = opts.seed + 2;
  const LanczosResult t = lanczos_lowest(neg, dim, top);
  out.u = -t.value;
  out.residual_max = std::max(out.residual_max, t.residual);
  out.degenerate = dim > 1 && out.epsilon1 - out.epsilon0 < degeneracy_tol * std::max(1.0, std::abs(out.u));
  return out;
}

}  // namespace agsp
