#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "agsp/hermitian_operator.hpp"
#include "agsp/local_operator.hpp"
#include "agsp/types.hpp"

namespace agsp {

/// Affine map back to physical units: E_phys = scale * E + offset.
struct ShiftRecord {
  double scale = 1.0;
  double offset = 0.0;

  double to_physical(double e) const { return scale * e + offset; }
  double from_physical(double e) const { return (e - offset) / scale; }
};

/// A 1D nearest-neighbour Hamiltonian. terms[i] is a d²×d² matrix acting on
/// sites (i, i+1), 0-based.
struct ChainSpec {
  int n = 0;
  int d = 2;
  std::vector<Matrix> terms;
  std::string label;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  ShiftRecord shift_record;

  OperatorSum as_sum() const;
};

struct TermCheck {
  int index = 0;
  double hermiticity_deviation = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool ok = true;
};

struct ValidationReport {
  bool ok = true;
  std::vector<TermCheck> terms;
  std::vector<std::string> problems;
};

inline constexpr double kTermTolerance = 1e-12;

ValidationReport validate_terms(const ChainSpec& chain);
/// Throws InvalidArgument listing every problem when validation fails.
void require_valid(const ChainSpec& chain);

/// Builds a normalized model. Known names: "tfim" (params J, h, g),
/// "heisenberg" (params J, hz) and "random_bond" (param scale). Every term is
/// shifted and uniformly rescaled so that 0 <= H_i <= 1.
ChainSpec build_standard_model(const std::string& name, int n, int d, const std::map<std::string, double>& params,
                               std::uint64_t seed);

/// Σ_i 1⊗…⊗H_i⊗…⊗1 as a dense matrix.
HermitianOperator assemble_dense(const ChainSpec& chain, std::int64_t limit = kDefaultDenseLimit);

/// Ground energies subtracted by frustrated_shift.
struct FrustrationShift {
  double left = 0.0;
  double right = 0.0;
  double interior = 0.0;
  bool applied = false;

  double total() const { return left + right + interior; }
};

/// H = H_L + H_1 + … + H_s + H_R around a distinguished cut.
///
/// With the 1-based segment offset m, H_L holds bonds 1..m (sites 1..m+1),
/// H_i is bond m+i on sites (m+i, m+i+1), and H_R holds the remaining bonds
/// on sites m+s+1..n. Stored supports are 0-based.
struct SegmentedHamiltonian {
  int n = 0;
  int d = 2;
  int m = 0;
  int s = 0;
  LocalTerm left;
  std::vector<LocalTerm> bonds;  // bonds[i-1] is H_i
  LocalTerm right;
  /// Σ(parts) = Σ(chain terms) - identity_shift · 1.
  double identity_shift = 0.0;
  FrustrationShift frustration;
  ShiftRecord physical;

  /// The middle cut, counted in segment bonds.
  int cut() const { return s / 2; }
  /// Number of sites to the left of the middle cut.
  int cut_sites() const { return m + s / 2; }

  const LocalTerm& bond(int i) const { return bonds.at(static_cast<std::size_t>(i - 1)); }

  /// H_L + H_1 + … + H_s + H_R.
  OperatorSum full() const;
  /// H_L + H_1 as a single term on its support.
  LocalTerm left_with_first_bond() const;
  /// H_s + H_R as a single term on its support.
  LocalTerm right_with_last_bond() const;
};

SegmentedHamiltonian segment(const ChainSpec& chain, int m, int s);

/// Shifts H_L, H_R and the interior terms H_4..H_{s-3} by their ground
/// energies so that each reaches zero. Requires s >= 8.
SegmentedHamiltonian frustrated_shift(const SegmentedHamiltonian& seg);

/// Smallest eigenvalue of a small dense Hermitian matrix.
double ground_energy_of(const Matrix& m);

nlohmann::json chain_to_json(const ChainSpec& chain);
ChainSpec chain_from_json(const nlohmann::json& j);

}  // namespace agsp
