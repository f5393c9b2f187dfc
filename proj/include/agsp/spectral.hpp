#pragma once

#include <json.hpp>

#include "agsp/chain_model.hpp"
#include "agsp/hermitian_operator.hpp"
#include "agsp/local_operator.hpp"
#include "agsp/types.hpp"

namespace agsp {

/// Eigenvalues at or below threshold + kThresholdTie count as "≤ threshold".
inline constexpr double kThresholdTie = 1e-10;

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns
  double epsilon0 = 0.0;
  double epsilon1 = 0.0;
  double u = 0.0;
  double norm = 0.0;
  bool degenerate = false;
  double residual_max = 0.0;
  double orthonormality_deviation = 0.0;

  double gap() const { return epsilon1 - epsilon0; }
  Vector ground_state() const { return eigenvectors.col(0); }
};

struct EigenOptions {
  std::int64_t limit = kDefaultEigenLimit;
  /// Relative to ‖H‖; the ground state is flagged when ε₁ − ε₀ falls below it.
  double degeneracy_tol = 1e-8;
  /// Skip the O(dim³) residual and orthonormality audit.
  bool audit = true;
};

SpectralDecomposition eigendecompose(const HermitianOperator& h, const EigenOptions& opts = {});

/// Throws DegenerateGroundStateError when the decomposition is flagged.
void require_unique_ground(const SpectralDecomposition& sd, const std::string& what);

/// H^{≤t}: same eigenvectors, eigenvalues min(λ, t).
HermitianOperator truncate_operator(const HermitianOperator& h, double t);
Matrix truncate_matrix(const Matrix& h, double t);

/// Matrix-free H^(t) = (H_L+H_1)^{≤t} + H_2 + … + H_{s-1} + (H_s+H_R)^{≤t}.
struct TruncatedHamiltonian {
  OperatorSum sum;
  double t = 0.0;
  /// Smallest eigenvalue of the local differences (H_L+H_1) − (H_L+H_1)^{≤t}
  /// and its right counterpart; H^(t) ≤ H follows when both are ≥ −1e−9.
  double order_certificate = 0.0;
  /// Σ λ_max over the parts; an upper bound on ‖H^(t)‖.
  double norm_bound = 0.0;
};

TruncatedHamiltonian truncated_hamiltonian(const SegmentedHamiltonian& seg, double t);

/// Dense H^(t). Checks H^(t) ≤ H and ‖H^(t)‖ ≤ 2t + s (slack 1e−9) and
/// throws ConvergenceError if either certificate fails.
HermitianOperator build_truncated_hamiltonian(const SegmentedHamiltonian& seg, double t,
                                              std::int64_t limit = kDefaultEigenLimit);

struct SpectralProjector {
  double threshold = 0.0;
  Matrix basis;  // orthonormal columns spanning eigenvalues ≤ threshold
  std::string source;

  Eigen::Index rank() const { return basis.cols(); }
  Vector apply(const Vector& v) const { return basis * (basis.adjoint() * v); }
  Matrix dense() const { return basis * basis.adjoint(); }
};

SpectralProjector spectral_projector(const HermitianOperator& h, double t);
SpectralProjector spectral_projector(const SpectralDecomposition& sd, double t, std::string source = {});

/// ‖(1 − P) state‖ for a unit state.
double tail_weight(const SpectralProjector& p, const Vector& state);

/// ‖(1 − P_t) A P_u‖ with both projectors taken for H − A. Requires t ≥ u.
double offdiag_mixing_norm(const HermitianOperator& a, const HermitianOperator& h_minus_a, double t, double u);
/// Same, reusing a decomposition of H − A.
double offdiag_mixing_norm(const Matrix& a, const SpectralDecomposition& h_minus_a, double t, double u);

/// The reference bound 2e^{−(t−u)/8}.
double mixing_reference_bound(double t, double u);

/// 2·delta/gap.
double markov_closeness_bound(double delta, double gap);

/// min over phases φ of ‖a − e^{iφ} b‖² for unit vectors.
double phase_aligned_distance_sq(const Vector& a, const Vector& b);

/// A = H_2 + H_{s-1} and H − A for a segmented Hamiltonian with s ≥ 4.
struct ASplit {
  OperatorSum a;
  OperatorSum rest;
  /// Disjoint blocks whose sum is H − A: left, middle, right.
  LocalTerm left;
  LocalTerm middle;
  LocalTerm right;
};

ASplit split_a(const SegmentedHamiltonian& seg);

nlohmann::json spectral_report_json(const SpectralDecomposition& sd);

}  // namespace agsp
