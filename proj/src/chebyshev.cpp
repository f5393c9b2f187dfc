#include "agsp/chebyshev.hpp"

#include <cfloat>
#include <cmath>

namespace agsp {

namespace {

// acosh(1 + delta) accurate for small delta.
double acosh1p(double delta) { return std::log1p(delta + std::sqrt(delta * (2.0 + delta))); }

// log cosh(a) for a ≥ 0.
double log_cosh(double a) { return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0); }

}  // namespace

double chebyshev_T(int l, double x) {
  if (l < 0) throw InvalidArgument("chebyshev_T: degree must be >= 0");
  if (std::abs(x) <= 1.0) return std::cos(l * std::acos(x));
  const double mag = std::cosh(l * std::acosh(std::abs(x)));
  return (x < 0.0 && l % 2 == 1) ? -mag : mag;
}

double chebyshev_T_recurrence(int l, double x) {
  if (l < 0) throw InvalidArgument("chebyshev_T_recurrence: degree must be >= 0");
  if (l == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 1; j < l; ++j) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double log_abs_chebyshev_T(int l, double x) {
  if (std::abs(x) < 1.0) throw InvalidArgument("log_abs_chebyshev_T: requires |x| >= 1");
  return log_cosh(l * acosh1p(std::abs(x) - 1.0));
}

ChebyshevFilter build_filter(int l, double eps0, double eps1, double u) {
  if (l < 0) throw InvalidArgument("build_filter: degree must be >= 0");
  if (!std::isfinite(eps0) || !std::isfinite(eps1) || !std::isfinite(u))
    throw InvalidArgument("build_filter: window must be finite");
  if (!(eps1 > eps0)) throw InvalidArgument("build_filter: degenerate window, need eps0 < eps1");
  if (u < eps1) throw InvalidArgument("build_filter: degenerate window, need eps1 <= u");
  ChebyshevFilter c;
  c.degree = l;
  c.eps0 = eps0;
  c.eps1 = eps1;
  c.u = u;
  // A collapsed window [ε₁, ε₁] still needs an invertible affine map.
  c.u_map = u > eps1 ? u : eps1 + 1e-6 * (eps1 - eps0);
  c.log_norm = l == 0 ? 0.0 : log_cosh(l * acosh1p(2.0 * (eps1 - eps0) / (c.u_map - eps1)));
  return c;
}

double eval_filter(const ChebyshevFilter& c, double y) {
  if (c.degree == 0) return 1.0;
  if (y == c.eps0) return 1.0;
  const double z = c.f(y);
  if (std::abs(z) <= 1.0) return std::cos(c.degree * std::acos(z)) * std::exp(-c.log_norm);
  const double log_ratio = log_abs_chebyshev_T(c.degree, z) - c.log_norm;
  const double mag = log_ratio >= std::log(DBL_MAX) ? DBL_MAX : std::exp(log_ratio);
  return (z < 0.0 && c.degree % 2 == 1) ? -mag : mag;
}

double shrink_bound(int l, double eps0, double eps1, double u) {
  if (!(eps1 > eps0) || u < eps1) throw InvalidArgument("shrink_bound: degenerate window");
  return 2.0 * std::exp(-2.0 * l * std::sqrt((eps1 - eps0) / (u - eps0)));
}

double shrink_bound(const ChebyshevFilter& c) {
  if (c.degree == 0) return 1.0;
  return shrink_bound(c.degree, c.eps0, c.eps1, c.u);
}

int degree_for_target(double delta_target, double eps0, double eps1, double u) {
  if (!(delta_target > 0.0) || !(delta_target < 1.0))
    throw InvalidArgument("degree_for_target: target must lie in (0, 1)");
  if (!(eps1 > eps0) || u < eps1) throw InvalidArgument("degree_for_target: degenerate window");
  const double target = std::sqrt(delta_target);
  const double rate = 2.0 * std::sqrt((eps1 - eps0) / (u - eps0));
  const double exact = std::log(2.0 / target) / rate;
  int l = std::max(1, static_cast<int>(std::ceil(exact - 1e-12 * std::abs(exact))));
  auto meets = [&](int k) { return shrink_bound(k, eps0, eps1, u) <= target * (1.0 + 1e-12); };
  while (!meets(l)) ++l;
  while (l > 1 && meets(l - 1)) --l;
  return l;
}

FilterApplication apply_filter_dense(const ChebyshevFilter& c, const HermitianOperator& h, const Vector& v) {
  if (v.size() != h.dim()) throw InvalidArgument("apply_filter_dense: dimension mismatch");
  const double nv = v.norm();
  if (std::abs(nv - 1.0) > 1e-10) throw InvalidArgument("apply_filter_dense: input is not normalized");
  FilterApplication out;
  out.result = chebyshev_recurrence<Vector>(c, [&h](const Vector& x) { return h.apply(x); }, v);
  out.gain = out.result.norm() / nv;
  out.amplification_warning = out.gain > 1.0 + kAmplificationTolerance;
  return out;
}

Matrix apply_filter(const ChebyshevFilter& c, const OperatorSum& h, const Matrix& block) {
  return chebyshev_recurrence<Matrix>(c, [&h](const Matrix& x) { return h.apply_block(x); }, block);
}

RealMatrix apply_filter_real(const ChebyshevFilter& c, const OperatorSum& h, const RealMatrix& block) {
  return chebyshev_recurrence<RealMatrix>(c, [&h](const RealMatrix& x) { return h.apply_block_real(x); }, block);
}

nlohmann::json filter_json(const ChebyshevFilter& c) {
  return {{"l", c.degree}, {"eps0", c.eps0}, {"eps1", c.eps1}, {"u", c.u}, {"shrink_bound", shrink_bound(c)}};
}

}  // namespace agsp
