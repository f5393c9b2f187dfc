#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "agsp/linalg.hpp"
#include "agsp/mps.hpp"

namespace agsp {

namespace {

SchmidtSpectrum spectrum_from_values(int cut, RealVector values, double threshold) {
  SchmidtSpectrum out;
  out.cut = cut;
  const double total = values.squaredNorm();
  if (total > 0.0) values /= std::sqrt(total);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double p = values(i) * values(i);
    if (p > 0.0) out.entropy -= p * std::log2(p);
    if (p > threshold) ++out.epsilon_rank;
  }
  out.values = std::move(values);
  return out;
}

}  // namespace

SchmidtSpectrum entanglement_entropy(const Vector& state, int n, int d, int cut, double threshold) {
  if (cut < 1 || cut > n - 1) throw InvalidArgument("entanglement_entropy: cut must lie in 1..n-1");
  if (state.size() != hilbert_dim(n, d)) throw InvalidArgument("entanglement_entropy: state length is not d^n");
  const Eigen::Index left = hilbert_dim(cut, d), right = hilbert_dim(n - cut, d);
  // Column-major (right × left) view: element (r, l) is amplitude l·right + r.
  const Eigen::Map<const Matrix> m(state.data(), right, left);
  return spectrum_from_values(cut, linalg::singular_values(m), threshold);
}

SchmidtSpectrum entanglement_entropy(const MatrixProductState& psi, int cut, double threshold) {
  if (cut < 1 || cut > psi.n - 1) throw InvalidArgument("entanglement_entropy: cut must lie in 1..n-1");
  const MatrixProductState c = canonicalize(psi, cut - 1);
  return spectrum_from_values(cut, linalg::singular_values(c.tensors[static_cast<std::size_t>(cut - 1)].data),
                              threshold);
}

std::string schmidt_csv(const std::vector<SchmidtSpectrum>& spectra) {
  std::ostringstream os;
  os.precision(17);
  os << "cut,index,lambda,lambda_sq_cum\n";
  for (const auto& sp : spectra) {
    double cum = 0.0;
    for (Eigen::Index i = 0; i < sp.values.size(); ++i) {
      cum += sp.values(i) * sp.values(i);
      os << sp.cut << ',' << i << ',' << sp.values(i) << ',' << cum << '\n';
    }
  }
  return os.str();
}

int operator_entanglement_rank(const Matrix& op, int n, int d, int cut, double tol, std::int64_t limit) {
  if (cut < 1 || cut > n - 1) throw InvalidArgument("operator_entanglement_rank: cut must lie in 1..n-1");
  const std::int64_t dim = hilbert_dim(n, d);
  if (op.rows() != dim || op.cols() != dim) throw InvalidArgument("operator_entanglement_rank: operator is not d^n square");
  if (dim > limit) throw DimensionLimitError("operator_entanglement_rank: dimension exceeds limit");
  const Eigen::Index dl = hilbert_dim(cut, d), dr = hilbert_dim(n - cut, d);
  Matrix m(dl * dl, dr * dr);
  for (Eigen::Index jl = 0; jl < dl; ++jl)
    for (Eigen::Index jr = 0; jr < dr; ++jr)
      for (Eigen::Index il = 0; il < dl; ++il)
        for (Eigen::Index ir = 0; ir < dr; ++ir) m(il * dl + jl, ir * dr + jr) = op(il * dr + ir, jl * dr + jr);
  const RealVector s = linalg::singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return rank;
}

int operator_entanglement_rank(const HermitianOperator& op, int n, int d, int cut, double tol, std::int64_t limit) {
  return operator_entanglement_rank(op.entries(), n, d, cut, tol, limit);
}

namespace {

// c(s) = Σ over all other sites of conj(φ_j) ψ, for the environment of site k.
Vector site_environment(const Vector& state, const std::vector<Vector>& phi, int k, int d) {
  const int n = static_cast<int>(phi.size());
  // Contract the sites to the right of k, then those to the left.
  Matrix cur = Eigen::Map<const Matrix>(state.data(), 1, state.size());
  Eigen::Index len = state.size();
  for (int j = n - 1; j > k; --j) {
    // Last digit is site j: view as (d × len/d) with column-major rows = digit.
    const Eigen::Map<const Matrix> view(cur.data(), d, len / d);
    cur = phi[static_cast<std::size_t>(j)].adjoint() * view;
    len /= d;
  }
  // Now cur holds indices (s_0 … s_k) digit-major; contract the leading sites.
  for (int j = 0; j < k; ++j) {
    const Eigen::Index rest = len / d;
    const Eigen::Map<const Matrix> view(cur.data(), rest, d);
    cur = (view * phi[static_cast<std::size_t>(j)].conjugate()).transpose();
    len = rest;
  }
  return Eigen::Map<const Vector>(cur.data(), len);
}

}  // namespace

ProductOverlap best_product_overlap(const Vector& state, int n, int d, int restarts, std::uint64_t seed) {
  if (state.size() != hilbert_dim(n, d)) throw InvalidArgument("best_product_overlap: state length is not d^n");
  if (restarts < 1) throw InvalidArgument("best_product_overlap: need at least one restart");
  const double scale = state.norm();
  if (scale == 0.0) throw InvalidArgument("best_product_overlap: zero state");
  const Vector psi = state / scale;
  const bool real = psi.imag().cwiseAbs().maxCoeff() == 0.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ProductOverlap best;
  best.restarts = restarts;
  for (int r = 0; r < restarts; ++r) {
    std::vector<Vector> phi;
    for (int k = 0; k < n; ++k) {
      Vector v(d);
      for (int s = 0; s < d; ++s) v(s) = real ? cplx(normal(rng), 0.0) : cplx(normal(rng), normal(rng));
      phi.push_back(v.normalized());
    }
    double mu = 0.0;
    for (int sweep = 0; sweep < 500; ++sweep) {
      double sweep_mu = 0.0;
      for (int k = 0; k < n; ++k) {
        // ⟨φ|ψ⟩ = φ_k^† c, maximized by φ_k ∝ c.
        const Vector c = site_environment(psi, phi, k, d);
        const double nc = c.norm();
        if (nc == 0.0) continue;
        phi[static_cast<std::size_t>(k)] = c / nc;
        sweep_mu = nc;
      }
      const bool done = sweep_mu - mu <= 1e-14;
      mu = std::max(mu, sweep_mu);
      if (done) break;
    }
    if (mu > best.mu) {
      best.mu = mu;
      best.witness = phi;
    }
  }
  return best;
}

}  // namespace agsp
