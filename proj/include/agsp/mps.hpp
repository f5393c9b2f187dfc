#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "agsp/chain_model.hpp"
#include "agsp/hermitian_operator.hpp"
#include "agsp/local_operator.hpp"
#include "agsp/types.hpp"

namespace agsp {

/// Site tensor A[l, s, r] stored as a (χl·d) × χr matrix with row l + χl·s.
/// The same buffer read column-major as χl × (d·χr) has column s + d·r.
struct SiteTensor {
  int left = 1;
  int right = 1;
  Matrix data;

  /// The χl × χr matrix A[·, s, ·].
  auto slice(int s) const { return data.block(static_cast<Eigen::Index>(left) * s, 0, left, right); }
  auto slice(int s) { return data.block(static_cast<Eigen::Index>(left) * s, 0, left, right); }
};

struct MatrixProductState {
  int n = 0;
  int d = 2;
  std::vector<SiteTensor> tensors;
  /// Orthogonality center, or -1 when the gauge is unknown.
  int center = -1;
  /// Σ of relative discarded weights over every truncation applied so far.
  double cumulative_truncation_error = 0.0;

  /// Bond dimensions across the n−1 internal cuts.
  std::vector<int> bond_dims() const;
  int max_bond() const;
};

struct TruncationPolicy {
  int max_bond = 1 << 20;
  /// Largest relative discarded weight Σλ²_dropped / Σλ² allowed per cut.
  double cutoff = 0.0;
};

/// Relative gap below which neighbouring singular values form one multiplet.
inline constexpr double kMultipletTolerance = 1e-10;
/// Default largest gate support, in sites, for operator application.
inline constexpr int kDefaultGateWidthLimit = 8;

/// Number of singular values to keep. The cutoff count is widened to the end
/// of a degenerate multiplet while that stays within max_bond; max_bond is a
/// hard cap either way.
int truncation_rank(const RealVector& s, const TruncationPolicy& policy);

MatrixProductState product_state(const std::vector<Vector>& sites);
/// Seeded random product state with real entries.
MatrixProductState random_product_state(int n, int d, std::uint64_t seed);

MatrixProductState from_dense(const Vector& v, int n, int d, const TruncationPolicy& policy = {});
Vector to_dense(const MatrixProductState& psi, std::int64_t limit = kDefaultDenseLimit);

double norm(const MatrixProductState& psi);
cplx inner(const MatrixProductState& a, const MatrixProductState& b);
MatrixProductState scaled(const MatrixProductState& psi, cplx factor);
/// ca·a + cb·b with bond dimensions adding.
MatrixProductState add(const MatrixProductState& a, cplx ca, const MatrixProductState& b, cplx cb);

/// Moves the orthogonality center to `center` by QR sweeps; the state is unchanged.
MatrixProductState canonicalize(const MatrixProductState& psi, int center);
/// Max deviation from isometry for tensors left and right of the center.
double canonical_deviation(const MatrixProductState& psi);

/// Right-canonicalizes, then truncates left to right. The output is normalized.
MatrixProductState compress(const MatrixProductState& psi, const TruncationPolicy& policy);
MatrixProductState compress(const MatrixProductState& psi, int max_bond, double cutoff);
/// Same truncation, keeping the norm of the truncated state.
MatrixProductState compress_unnormalized(const MatrixProductState& psi, const TruncationPolicy& policy);

/// One entry of an MPO site: channel wl to channel wr carries `op`.
struct MpoEntry {
  int wl = 0;
  int wr = 0;
  Matrix op;  // d × d
};

struct MpoSite {
  int left = 1;
  int right = 1;
  std::vector<MpoEntry> entries;
};

/// Finite-state MPO of a sum of local terms.
struct Mpo {
  int n = 0;
  int d = 2;
  std::vector<MpoSite> sites;

  std::vector<int> bond_dims() const;
};

/// Each term is split by an operator Schmidt decomposition; terms wider than
/// gate_width_limit are rejected.
Mpo build_mpo(const OperatorSum& h, int gate_width_limit = kDefaultGateWidthLimit);

/// Exact MPO × MPS; bond dimensions multiply.
MatrixProductState apply_mpo(const Mpo& w, const MatrixProductState& psi);
/// ⟨ψ|W|ψ⟩.
cplx expectation(const Mpo& w, const MatrixProductState& psi);

/// Compressed H|ψ⟩; norm kept.
MatrixProductState apply_hamiltonian(const OperatorSum& h, const MatrixProductState& psi, int max_bond, double cutoff,
                                     int gate_width_limit = kDefaultGateWidthLimit);
MatrixProductState apply_hamiltonian(const ChainSpec& chain, const MatrixProductState& psi, int max_bond,
                                     double cutoff);
MatrixProductState apply_hamiltonian(const SegmentedHamiltonian& seg, const MatrixProductState& psi, int max_bond,
                                     double cutoff, int gate_width_limit = kDefaultGateWidthLimit);

nlohmann::json mps_to_json(const MatrixProductState& psi);
MatrixProductState mps_from_json(const nlohmann::json& j);

/// Schmidt decomposition across one cut.
struct SchmidtSpectrum {
  int cut = 0;
  RealVector values;  // descending
  double entropy = 0.0;  // bits
  int epsilon_rank = 0;
};

inline constexpr double kEpsilonRankThreshold = 1e-12;

/// `cut` counts the sites on the left, 1 ≤ cut ≤ n−1.
SchmidtSpectrum entanglement_entropy(const MatrixProductState& psi, int cut, double threshold = kEpsilonRankThreshold);
SchmidtSpectrum entanglement_entropy(const Vector& state, int n, int d, int cut,
                                     double threshold = kEpsilonRankThreshold);

/// CSV rows (cut, index, lambda, lambda_sq_cum) including the header.
std::string schmidt_csv(const std::vector<SchmidtSpectrum>& spectra);

inline constexpr double kOperatorRankTolerance = 1e-10;

/// Rank of O rearranged as (i_L j_L) × (i_R j_R) across the cut; singular
/// values above tol · σ_max count.
int operator_entanglement_rank(const Matrix& op, int n, int d, int cut, double tol = kOperatorRankTolerance,
                               std::int64_t limit = kDefaultEigenLimit);
int operator_entanglement_rank(const HermitianOperator& op, int n, int d, int cut,
                               double tol = kOperatorRankTolerance, std::int64_t limit = kDefaultEigenLimit);

struct ProductOverlap {
  double mu = 0.0;
  std::vector<Vector> witness;  // unit site vectors
  int restarts = 0;
};

/// Heuristic max over product states of |⟨φ|ψ⟩| by alternating exact
/// single-site updates; a lower bound on the true maximum.
ProductOverlap best_product_overlap(const Vector& state, int n, int d, int restarts = 32, std::uint64_t seed = 0);

}  // namespace agsp
