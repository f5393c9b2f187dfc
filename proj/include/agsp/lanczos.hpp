#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "agsp/local_operator.hpp"
#include "agsp/types.hpp"

namespace agsp {

using LinearMap = std::function<Vector(const Vector&)>;

struct LanczosOptions {
  int max_iterations = 300;
  /// Converged when the Ritz residual is below tol · max(1, |θ|).
  double tolerance = 1e-11;
  std::uint64_t seed = 0x5eed;
};

struct LanczosResult {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lowest eigenpair of a Hermitian map on the orthogonal complement of
/// `deflate` (orthonormal columns). Full reorthogonalization.
LanczosResult lanczos_lowest(const LinearMap& apply, std::int64_t dim, const LanczosOptions& opts = {},
                             const std::vector<Vector>& deflate = {});

/// Spectrum edges of a matrix-free Hermitian operator.
struct ExtremalSpectrum {
  double epsilon0 = 0.0;
  double epsilon1 = 0.0;
  double u = 0.0;
  Vector ground;
  bool degenerate = false;
  double residual_max = 0.0;

  double gap() const { return epsilon1 - epsilon0; }
};

/// ε₀ and ε₁ by a plain and a deflated run, u from a run on −H. The ground
/// state is flagged degenerate when ε₁ − ε₀ < degeneracy_tol · max(1, |u|).
ExtremalSpectrum extremal_spectrum(const OperatorSum& h, const LanczosOptions& opts = {},
                                   double degeneracy_tol = 1e-8);

}  // namespace agsp
