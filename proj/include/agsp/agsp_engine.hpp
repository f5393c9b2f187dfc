#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agsp/chain_model.hpp"
#include "agsp/chebyshev.hpp"
#include "agsp/fit.hpp"
#include "agsp/lanczos.hpp"
#include "agsp/mps.hpp"
#include "agsp/spectral.hpp"

namespace agsp {

/// Spectral window (ε₀, ε₁, u) of the operator a filter is built for.
struct Window {
  double eps0 = 0.0;
  double eps1 = 1.0;
  double u = 1.0;
};

/// Window of a matrix-free operator from the Lanczos oracle. Throws
/// DegenerateGroundStateError when ε₁ − ε₀ is below the degeneracy tolerance.
Window oracle_window(const OperatorSum& h, const LanczosOptions& opts = {});

/// K = C_ℓ(H^(t)) for a segmented Hamiltonian.
struct AGSP {
  ChebyshevFilter filter;
  TruncatedHamiltonian target;
  double t = 0.0;
  int n = 0;
  int d = 2;
  int cut_sites = 0;

  double delta() const { return shrink_bound(filter) * shrink_bound(filter); }
};

/// Reads the window of H^(t) from the oracle.
AGSP make_agsp(const SegmentedHamiltonian& seg, double t, int l, const LanczosOptions& opts = {});
/// Uses the supplied window instead.
AGSP make_agsp(const SegmentedHamiltonian& seg, double t, int l, const Window& window);

struct AGSPReport {
  double invariance_residual = 0.0;
  double measured_shrink = 0.0;
  double bound_shrink = 0.0;
  int excited_checked = 0;
  /// Excited vectors whose shrink exceeded bound·(1 + 1e−6).
  int shrink_violations = 0;
  std::optional<int> measured_D;
  std::optional<double> D_Delta_product;
  std::optional<double> product_overlap;

  bool contract_holds() const { return invariance_residual <= 1e-8 && shrink_violations == 0; }
};

struct VerifyOptions {
  /// Largest dimension at which K is formed densely for measured_D.
  std::int64_t k_dense_limit = 1024;
  bool product_overlap = false;
  int restarts = 32;
  std::uint64_t seed = 0;
  /// Columns per recurrence block.
  Eigen::Index chunk = 512;
};

/// `oracle` must decompose the AGSP target H^(t).
AGSPReport verify_agsp(const AGSP& agsp, const SpectralDecomposition& oracle, const VerifyOptions& opts = {});

nlohmann::json agsp_report_json(const AGSPReport& r);

struct BondPolicy {
  int max_bond = 64;
  double cutoff = 1e-14;
};

struct Schedule {
  double t0 = 4.0;
  double c = 2.0;
  int steps = 5;
  std::vector<int> degrees;  // ℓ_i for step i = 1..steps
  std::vector<BondPolicy> bonds;

  /// t_i = t0 + i·c for step i ≥ 1.
  double t(int step) const { return t0 + step * c; }
};

inline constexpr double kScheduleDelta = 1.0 / 32.0;

/// Fills ℓ_i by degree_for_target(delta, window of H^(t_i)) and a uniform bond policy.
Schedule default_schedule(const SegmentedHamiltonian& seg, int steps, const BondPolicy& bonds = {},
                          double t0 = 4.0, double c = 2.0, double delta = kScheduleDelta);

struct ApproachStep {
  MatrixProductState psi;
  double overlap = 0.0;
  int bond = 1;
  double t = 0.0;
  int degree = 0;
};

struct ApproachTrace {
  /// Entry 0 is the initial state.
  std::vector<ApproachStep> steps;
  bool complete = true;
  std::string error;
};

/// ψ_i = K_i ψ_{i−1}/‖K_i ψ_{i−1}‖ in the MPS backend. Overlaps are taken
/// against `ground` when given, else against the Lanczos ground state.
ApproachTrace iterate_ground_approach(const SegmentedHamiltonian& seg, const Schedule& schedule,
                                      const MatrixProductState& initial, const std::optional<Vector>& ground = {});

/// log2 bond_i ≤ log2 bond_0 + Σ_{j≤i} ℓ_j log2 d + slack for every step.
bool bond_envelope_holds(const ApproachTrace& trace, int d, double slack = 1.0);

/// MPO of f(H) = (u + ε₁ − 2H)/(u − ε₁), the affine map inside the filter.
Mpo filter_map_mpo(const ChebyshevFilter& c, const OperatorSum& h, int gate_width_limit = kDefaultGateWidthLimit);

/// K applied to an MPS by the normalized Chebyshev recurrence; every step is
/// one MPO application fused with the three-term update, then compressed.
MatrixProductState apply_filter_mps(const ChebyshevFilter& c, const Mpo& f_of_h, const MatrixProductState& psi,
                                    const BondPolicy& policy);

/// Fit ranges of the experiment layer: tails in [low, high] and deficits in
/// [floor, 1] enter the log-linear fits.
inline constexpr double kTailFitLow = 1e-12;
inline constexpr double kTailFitHigh = 1e-1;
inline constexpr double kRobustnessFitFloor = 1e-12;

struct RobustnessRow {
  double t = 0.0;
  double eps0 = 0.0;
  double eps1 = 0.0;
  double gap = 0.0;
  double deficit = 0.0;
  bool degenerate = false;
};

struct RobustnessScan {
  std::vector<RobustnessRow> rows;
  double gap = 0.0;  // gap of H
  double eps0 = 0.0;
};

RobustnessScan robustness_scan(const SegmentedHamiltonian& seg, const std::vector<double>& t_values,
                               const LanczosOptions& opts = {});

/// Smallest grid t beyond which every non-degenerate deficit is ≤ threshold.
std::optional<double> robustness_knee(const RobustnessScan& scan, double threshold = 1e-2);

struct TailRow {
  double t = 0.0;
  double tail = 0.0;
};

std::vector<TailRow> truncation_decay_scan(const SegmentedHamiltonian& seg, const std::vector<double>& t_values,
                                           const LanczosOptions& opts = {});

struct MixingRow {
  double t = 0.0;
  double u = 0.0;
  double value = 0.0;
  double bound = 0.0;
};

/// ‖(1−P_t) A P_u‖ for each (t, u) pair, with P for H − A and A = H_2 + H_{s−1}.
std::vector<MixingRow> mixing_scan(const SegmentedHamiltonian& seg, const std::vector<std::pair<double, double>>& tu);

struct ErGrowthRow {
  int l = 0;
  int rank = 0;
  /// log rank / (√ℓ · log(dℓ)).
  double normalized = 0.0;
};

/// Operator entanglement rank of H^ℓ across `cut` for each ℓ ≥ 1, with
/// H^ℓ formed densely (dimension ≤ limit).
std::vector<ErGrowthRow> er_growth_scan(const OperatorSum& h, int cut, const std::vector<int>& l_values,
                                        std::int64_t limit = 1 << 12);

struct GroundEnergyConfig {
  /// Truncation threshold; +inf filters the full H. Finite t needs m and s.
  double t = std::numeric_limits<double>::infinity();
  int m = 0;
  int s = 0;
  /// Filter degree; 0 picks degree_for_target(delta).
  int l = 0;
  double delta = 1e-2;
  int max_bond = 16;
  double cutoff = 1e-14;
  int max_iters = 200;
  /// Relative change of successive energies that ends the iteration.
  double energy_tol = 1e-12;
  std::uint64_t seed = 1;
  std::optional<Window> window;
};

struct GroundEnergyResult {
  double energy = 0.0;             // physical units
  double energy_normalized = 0.0;  // in the 0 ≤ H_i ≤ 1 normalization
  MatrixProductState psi;
  int iterations = 0;
  bool converged = false;
  int degree = 0;
  Window window;
  std::vector<double> history;  // normalized energies per iteration
};

GroundEnergyResult estimate_ground_energy(const ChainSpec& chain, const GroundEnergyConfig& config = {});

}  // namespace agsp
