#pragma once

#include <json.hpp>

#include "agsp/hermitian_operator.hpp"
#include "agsp/local_operator.hpp"
#include "agsp/types.hpp"

namespace agsp {

/// C_ℓ(y) = T_ℓ(f(y)) / T_ℓ(f(ε₀)) with f(y) = (u + ε₁ − 2y)/(u − ε₁).
///
/// f maps [ε₁, u] onto [−1, 1] and ε₀ to x₀ > 1, so C_ℓ(ε₀) = 1 and
/// |C_ℓ| ≤ 1/T_ℓ(x₀) on the window. Degree 0 is the identity filter.
struct ChebyshevFilter {
  int degree = 0;
  double eps0 = 0.0;
  double eps1 = 1.0;
  double u = 1.0;
  /// u used inside f; differs from u only when u == ε₁.
  double u_map = 1.0;
  /// log T_ℓ(f(ε₀)).
  double log_norm = 0.0;

  double f(double y) const { return 1.0 + 2.0 * (eps1 - y) / (u_map - eps1); }
  double x0() const { return f(eps0); }
};

/// Exact T_l(x): trigonometric on [−1, 1], hyperbolic outside.
double chebyshev_T(int l, double x);
/// T_l(x) by the three-term recurrence.
double chebyshev_T_recurrence(int l, double x);
/// log |T_l(x)| for |x| ≥ 1 without overflow.
double log_abs_chebyshev_T(int l, double x);

ChebyshevFilter build_filter(int l, double eps0, double eps1, double u);

/// Log-domain evaluation; results are clamped to ±DBL_MAX.
double eval_filter(const ChebyshevFilter& c, double y);

/// √Δ = 2 exp(−2ℓ √((ε₁ − ε₀)/(u − ε₀))).
double shrink_bound(int l, double eps0, double eps1, double u);
double shrink_bound(const ChebyshevFilter& c);

/// Smallest ℓ ≥ 1 with shrink_bound ≤ √delta_target.
int degree_for_target(double delta_target, double eps0, double eps1, double u);

/// Gain above which a filter application is reported as amplifying.
inline constexpr double kAmplificationTolerance = 1e-6;

struct FilterApplication {
  Vector result;
  /// ‖Kv‖/‖v‖.
  double gain = 0.0;
  /// The gain exceeded 1 + kAmplificationTolerance, so the spectrum leaks
  /// outside the window.
  bool amplification_warning = false;
};

/// K v by the three-term recurrence on f(H); the matrix polynomial is never formed.
FilterApplication apply_filter_dense(const ChebyshevFilter& c, const HermitianOperator& h, const Vector& v);

/// Column-wise K·block for a matrix-free operator.
Matrix apply_filter(const ChebyshevFilter& c, const OperatorSum& h, const Matrix& block);
/// Real arithmetic; requires h.is_real().
RealMatrix apply_filter_real(const ChebyshevFilter& c, const OperatorSum& h, const RealMatrix& block);

/// Normalized recurrence Y_j = T_j(f(H)) v / T_j(x₀) for any block type with
/// the usual vector-space operations.
template <typename Block, typename ApplyH>
Block chebyshev_recurrence(const ChebyshevFilter& c, const ApplyH& apply_h, const Block& v) {
  if (c.degree == 0) return v;
  const double alpha = (c.u_map + c.eps1) / (c.u_map - c.eps1);
  const double beta = -2.0 / (c.u_map - c.eps1);
  const double x0 = c.x0();
  Block prev = v;
  Block cur = (alpha * v + beta * apply_h(v)) / x0;
  double r = 1.0 / x0;  // T_{j-1}(x₀)/T_j(x₀)
  for (int j = 1; j < c.degree; ++j) {
    const double rho = 2.0 * x0 - r;
    Block next = (2.0 * (alpha * cur + beta * apply_h(cur)) - r * prev) / rho;
    prev = std::move(cur);
    cur = std::move(next);
    r = 1.0 / rho;
  }
  return cur;
}

nlohmann::json filter_json(const ChebyshevFilter& c);

}  // namespace agsp
