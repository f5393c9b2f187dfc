#include "agsp/agsp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "agsp/block_spectrum.hpp"
#include "agsp/linalg.hpp"
#include "agsp/parallel.hpp"

namespace agsp {

namespace {

constexpr std::int64_t kDenseWindowLimit = 512;

void require_window(const Window& w, const std::string& what) {
  if (!(w.eps1 > w.eps0) || w.u < w.eps1) throw InvalidArgument(what + ": invalid spectral window");
}

}  // namespace

Window oracle_window(const OperatorSum& h, const LanczosOptions& opts) {
  Window w;
  if (h.dim() <= kDenseWindowLimit) {
    const RealVector ev = linalg::eigvalsh(h.dense(kDenseWindowLimit));
    w.eps0 = ev(0);
    w.eps1 = ev.size() > 1 ? ev(1) : ev(0);
    w.u = ev(ev.size() - 1);
  } else {
    const ExtremalSpectrum ex = extremal_spectrum(h, opts);
    w = {ex.epsilon0, ex.epsilon1, ex.u};
  }
  if (w.eps1 - w.eps0 < 1e-8 * std::max(1.0, std::abs(w.u))) {
    std::ostringstream os;
    os << "oracle window: degenerate ground state (gap " << (w.eps1 - w.eps0) << ")";
    throw DegenerateGroundStateError(os.str());
  }
  return w;
}

AGSP make_agsp(const SegmentedHamiltonian& seg, double t, int l, const Window& window) {
  require_window(window, "make_agsp");
  AGSP k;
  k.target = truncated_hamiltonian(seg, t);
  k.t = t;
  k.n = seg.n;
  k.d = seg.d;
  k.cut_sites = seg.cut_sites();
  k.filter = build_filter(l, window.eps0, window.eps1, window.u);
  return k;
}

AGSP make_agsp(const SegmentedHamiltonian& seg, double t, int l, const LanczosOptions& opts) {
  const TruncatedHamiltonian target = truncated_hamiltonian(seg, t);
  return make_agsp(seg, t, l, oracle_window(target.sum, opts));
}

AGSPReport verify_agsp(const AGSP& agsp, const SpectralDecomposition& oracle, const VerifyOptions& opts) {
  const OperatorSum& h = agsp.target.sum;
  const Eigen::Index dim = oracle.eigenvectors.rows();
  if (dim != h.dim()) throw InvalidArgument("verify_agsp: oracle does not match the AGSP target");
  require_unique_ground(oracle, "verify_agsp");
  const ChebyshevFilter& f = agsp.filter;
  const double slack = 1e-6 * (f.u - f.eps0);
  if (std::abs(oracle.epsilon0 - f.eps0) > slack || oracle.u > f.u + slack)
    throw InvalidArgument("verify_agsp: oracle spectrum lies outside the filter window");

  AGSPReport r;
  r.bound_shrink = shrink_bound(f);
  const double limit = r.bound_shrink * (1.0 + 1e-6);
  const bool real = h.is_real() && linalg::is_real(oracle.eigenvectors);
  const Eigen::Index chunk = std::max<Eigen::Index>(1, opts.chunk);
  for (Eigen::Index start = 0; start < dim; start += chunk) {
    const Eigen::Index cols = std::min(chunk, dim - start);
    Matrix in, out;
    if (real) {
      const RealMatrix block = oracle.eigenvectors.middleCols(start, cols).real();
      const RealMatrix res = apply_filter_real(f, h, block);
      in = block.cast<cplx>();
      out = res.cast<cplx>();
    } else {
      in = oracle.eigenvectors.middleCols(start, cols);
      out = apply_filter(f, h, in);
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (start + c == 0) {
        r.invariance_residual = (out.col(0) - in.col(0)).norm();
        continue;
      }
      const double shrink = out.col(c).norm();
      r.measured_shrink = std::max(r.measured_shrink, shrink);
      ++r.excited_checked;
      if (shrink > limit) ++r.shrink_violations;
    }
  }

  if (dim <= opts.k_dense_limit) {
    RealVector values(dim);
    for (Eigen::Index k = 0; k < dim; ++k) values(k) = eval_filter(f, oracle.eigenvalues(k));
    const Matrix k_dense = linalg::reconstruct(oracle.eigenvectors, values);
    const int d_measured = operator_entanglement_rank(k_dense, agsp.n, agsp.d, agsp.cut_sites);
    r.measured_D = d_measured;
    r.D_Delta_product = d_measured * agsp.delta();
  }
  if (opts.product_overlap)
    r.product_overlap = best_product_overlap(oracle.ground_state(), agsp.n, agsp.d, opts.restarts, opts.seed).mu;
  return r;
}

nlohmann::json agsp_report_json(const AGSPReport& r) {
  nlohmann::json j = {{"invariance_residual", r.invariance_residual},
                      {"measured_shrink", r.measured_shrink},
                      {"bound_shrink", r.bound_shrink},
                      {"excited_checked", r.excited_checked},
                      {"shrink_violations", r.shrink_violations}};
  j["measured_D"] = r.measured_D ? nlohmann::json(*r.measured_D) : nlohmann::json(nullptr);
  j["D_Delta_product"] = r.D_Delta_product ? nlohmann::json(*r.D_Delta_product) : nlohmann::json(nullptr);
  j["product_overlap"] = r.product_overlap ? nlohmann::json(*r.product_overlap) : nlohmann::json(nullptr);
  return j;
}

Schedule default_schedule(const SegmentedHamiltonian& seg, int steps, const BondPolicy& bonds, double t0, double c,
                          double delta) {
  if (steps < 0) throw InvalidArgument("schedule: steps must be >= 0");
  if (!(c > 0.0)) throw InvalidArgument("schedule: increment must be positive");
  Schedule s;
  s.t0 = t0;
  s.c = c;
  s.steps = steps;
  for (int i = 1; i <= steps; ++i) {
    const Window w = oracle_window(truncated_hamiltonian(seg, s.t(i)).sum);
    s.degrees.push_back(degree_for_target(delta, w.eps0, w.eps1, w.u));
    s.bonds.push_back(bonds);
  }
  return s;
}

Mpo filter_map_mpo(const ChebyshevFilter& c, const OperatorSum& h, int gate_width_limit) {
  const double alpha = (c.u_map + c.eps1) / (c.u_map - c.eps1);
  const double beta = -2.0 / (c.u_map - c.eps1);
  OperatorSum f(h.sites(), h.local_dim());
  for (const auto& t : h.terms()) f.add(t.first_site, t.width, beta * t.op);
  f.add_constant(alpha + beta * h.constant());
  return build_mpo(f, gate_width_limit);
}

MatrixProductState apply_filter_mps(const ChebyshevFilter& c, const Mpo& f_of_h, const MatrixProductState& psi,
                                    const BondPolicy& policy) {
  if (c.degree == 0) return psi;
  const TruncationPolicy tp{policy.max_bond, policy.cutoff};
  const double x0 = c.x0();
  MatrixProductState prev = psi;
  MatrixProductState cur = compress_unnormalized(scaled(apply_mpo(f_of_h, psi), 1.0 / x0), tp);
  double r = 1.0 / x0;
  for (int j = 1; j < c.degree; ++j) {
    const double rho = 2.0 * x0 - r;
    MatrixProductState next = compress_unnormalized(add(apply_mpo(f_of_h, cur), 2.0 / rho, prev, -r / rho), tp);
    prev = std::move(cur);
    cur = std::move(next);
    r = 1.0 / rho;
  }
  return cur;
}

namespace {

MatrixProductState normalized(const MatrixProductState& psi) {
  const double nrm = norm(psi);
  if (nrm == 0.0) throw ConvergenceError("state vanished under the filter");
  return scaled(psi, 1.0 / nrm);
}

double overlap_with(const Vector& ground, const MatrixProductState& psi) {
  const Vector v = to_dense(psi);
  return std::abs(ground.dot(v)) / v.norm();
}

}  // namespace

ApproachTrace iterate_ground_approach(const SegmentedHamiltonian& seg, const Schedule& schedule,
                                      const MatrixProductState& initial, const std::optional<Vector>& ground) {
  if (initial.n != seg.n || initial.d != seg.d) throw InvalidArgument("iterate_ground_approach: initial state shape");
  if (schedule.steps < 0) throw InvalidArgument("iterate_ground_approach: negative step count");
  if (static_cast<int>(schedule.degrees.size()) < schedule.steps)
    throw InvalidArgument("iterate_ground_approach: schedule lists fewer degrees than steps");
  const Vector gamma = ground ? *ground : extremal_spectrum(seg.full()).ground;

  ApproachTrace trace;
  MatrixProductState psi = normalized(initial);
  trace.steps.push_back({psi, overlap_with(gamma, psi), psi.max_bond(), 0.0, 0});
  for (int i = 1; i <= schedule.steps; ++i) {
    try {
      const double t = schedule.t(i);
      const int l = schedule.degrees[static_cast<std::size_t>(i - 1)];
      const BondPolicy policy =
          i - 1 < static_cast<int>(schedule.bonds.size()) ? schedule.bonds[static_cast<std::size_t>(i - 1)] : BondPolicy{};
      const AGSP k = make_agsp(seg, t, l);
      psi = normalized(apply_filter_mps(k.filter, filter_map_mpo(k.filter, k.target.sum), psi, policy));
      trace.steps.push_back({psi, overlap_with(gamma, psi), psi.max_bond(), t, l});
    } catch (const std::exception& e) {
      trace.complete = false;
      trace.error = "step " + std::to_string(i) + ": " + e.what();
      break;
    }
  }
  return trace;
}

bool bond_envelope_holds(const ApproachTrace& trace, int d, double slack) {
  if (trace.steps.empty()) return true;
  const double base = std::log2(trace.steps.front().bond);
  double budget = 0.0;
  for (std::size_t i = 1; i < trace.steps.size(); ++i) {
    budget += trace.steps[i].degree * std::log2(d);
    if (std::log2(trace.steps[i].bond) > base + budget + slack) return false;
  }
  return true;
}

RobustnessScan robustness_scan(const SegmentedHamiltonian& seg, const std::vector<double>& t_values,
                               const LanczosOptions& opts) {
  const ExtremalSpectrum full = extremal_spectrum(seg.full(), opts);
  if (full.degenerate) throw DegenerateGroundStateError("robustness_scan: H has a degenerate ground state");
  RobustnessScan scan;
  scan.gap = full.gap();
  scan.eps0 = full.epsilon0;
  scan.rows = parallel_map(t_values.size(), [&](std::size_t i) {
    RobustnessRow row;
    row.t = t_values[i];
    const ExtremalSpectrum ex = extremal_spectrum(truncated_hamiltonian(seg, row.t).sum, opts);
    row.eps0 = ex.epsilon0;
    row.eps1 = ex.epsilon1;
    row.gap = ex.gap();
    row.degenerate = ex.degenerate;
    row.deficit = phase_aligned_distance_sq(ex.ground, full.ground);
    return row;
  });
  std::stable_sort(scan.rows.begin(), scan.rows.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return scan;
}

std::optional<double> robustness_knee(const RobustnessScan& scan, double threshold) {
  std::optional<double> knee;
  for (auto it = scan.rows.rbegin(); it != scan.rows.rend(); ++it) {
    if (it->degenerate) continue;
    if (it->deficit > threshold) break;
    knee = it->t;
  }
  return knee;
}

std::vector<TailRow> truncation_decay_scan(const SegmentedHamiltonian& seg, const std::vector<double>& t_values,
                                           const LanczosOptions& opts) {
  const ASplit split = split_a(seg);
  const BlockSpectrum blocks({split.left, split.middle, split.right}, seg.n, seg.d);
  const ExtremalSpectrum full = extremal_spectrum(seg.full(), opts);
  std::vector<TailRow> rows;
  for (double t : t_values) rows.push_back({t, blocks.tail_weight(full.ground, t)});
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return rows;
}

std::vector<MixingRow> mixing_scan(const SegmentedHamiltonian& seg, const std::vector<std::pair<double, double>>& tu) {
  const ASplit split = split_a(seg);
  const BlockSpectrum blocks({split.left, split.middle, split.right}, seg.n, seg.d);
  const Matrix a_eig = blocks.operator_in_eigenbasis(split.a);
  std::vector<MixingRow> rows;
  for (const auto& [t, u] : tu)
    rows.push_back({t, u, blocks.mixing_norm(a_eig, t, u), mixing_reference_bound(t, u)});
  return rows;
}

std::vector<ErGrowthRow> er_growth_scan(const OperatorSum& h, int cut, const std::vector<int>& l_values,
                                        std::int64_t limit) {
  std::vector<int> ls = l_values;
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  if (ls.empty() || ls.front() < 1) throw InvalidArgument("er_growth_scan: powers must be >= 1");
  const Matrix hd = h.dense(limit);
  Matrix power = hd;
  int reached = 1;
  std::vector<ErGrowthRow> rows;
  for (int l : ls) {
    for (; reached < l; ++reached) power = power * hd;
    ErGrowthRow row;
    row.l = l;
    row.rank = operator_entanglement_rank(power, h.sites(), h.local_dim(), cut, kOperatorRankTolerance, limit);
    row.normalized = std::log(static_cast<double>(row.rank)) / (std::sqrt(static_cast<double>(l)) *
                                                                 std::log(static_cast<double>(h.local_dim()) * l));
    rows.push_back(row);
  }
  return rows;
}

GroundEnergyResult estimate_ground_energy(const ChainSpec& chain, const GroundEnergyConfig& config) {
  require_valid(chain);
  if (config.max_iters < 1) throw InvalidArgument("estimate_ground_energy: max_iters must be >= 1");
  const OperatorSum h = chain.as_sum();
  OperatorSum target = h;
  if (std::isfinite(config.t)) {
    if (config.m < 1 || config.s < 2)
      throw InvalidArgument("estimate_ground_energy: a finite t needs a segmentation (m, s)");
    target = truncated_hamiltonian(segment(chain, config.m, config.s), config.t).sum;
  }
  GroundEnergyResult res;
  res.window = config.window ? *config.window : oracle_window(target);
  require_window(res.window, "estimate_ground_energy");
  res.degree = config.l > 0 ? config.l : degree_for_target(config.delta, res.window.eps0, res.window.eps1, res.window.u);
  const ChebyshevFilter filter = build_filter(res.degree, res.window.eps0, res.window.eps1, res.window.u);
  const Mpo f_of_h = filter_map_mpo(filter, target);
  const Mpo h_mpo = build_mpo(h);
  const BondPolicy policy{config.max_bond, config.cutoff};

  MatrixProductState psi = random_product_state(chain.n, chain.d, config.seed);
  double previous = expectation(h_mpo, psi).real();
  double best = previous;
  MatrixProductState best_psi = psi;
  for (int it = 1; it <= config.max_iters; ++it) {
    psi = compress(apply_filter_mps(filter, f_of_h, psi, policy), TruncationPolicy{config.max_bond, config.cutoff});
    const double e = expectation(h_mpo, psi).real();
    res.history.push_back(e);
    res.iterations = it;
    if (e <= best) {
      best = e;
      best_psi = psi;
    }
    if (std::abs(e - previous) < config.energy_tol * std::max(1.0, std::abs(e))) {
      res.converged = true;
      break;
    }
    previous = e;
  }
  res.energy_normalized = best;
  res.energy = chain.shift_record.to_physical(best);
  res.psi = std::move(best_psi);
  return res;
}

}  // namespace agsp
