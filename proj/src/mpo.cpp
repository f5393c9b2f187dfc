#include <algorithm>
#include <map>

#include "agsp/linalg.hpp"
#include "agsp/mps.hpp"

namespace agsp {

std::vector<int> Mpo::bond_dims() const {
  std::vector<int> out;
  for (int k = 0; k + 1 < n; ++k) out.push_back(sites[static_cast<std::size_t>(k)].right);
  return out;
}

namespace {

constexpr int kInit = 0;
constexpr int kFinal = 1;

// Cores of an operator Schmidt chain: core k is (r_{k-1}·d² × r_k) with row
// l + r_{k-1}·(i·d + j) for the matrix element (i, j) on site k.
std::vector<Matrix> operator_chain(const LocalTerm& term, int d) {
  const int w = term.width;
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  const Eigen::Index loc = hilbert_dim(w, d);
  Vector v(hilbert_dim(w, static_cast<int>(dd)));
  for (Eigen::Index i = 0; i < loc; ++i)
    for (Eigen::Index j = 0; j < loc; ++j) {
      Eigen::Index idx = 0, ri = i, rj = j, place = 1;
      for (int k = w - 1; k >= 0; --k) {
        idx += ((ri % d) * d + (rj % d)) * place;
        ri /= d;
        rj /= d;
        place *= dd;
      }
      v(idx) = term.op(i, j);
    }
  std::vector<Matrix> cores;
  Matrix rest = v.transpose();
  Eigen::Index chi = 1;
  for (int k = 0; k + 1 < w; ++k) {
    const Eigen::Index tail = rest.cols() / dd;
    Matrix m(chi * dd, tail);
    for (Eigen::Index s = 0; s < dd; ++s) m.block(chi * s, 0, chi, tail) = rest.middleCols(s * tail, tail);
    const linalg::ThinSvd f = linalg::svd(m);
    Eigen::Index keep = 0;
    while (keep < f.s.size() && f.s(keep) > 1e-13 * std::max(f.s(0), 1e-300)) ++keep;
    keep = std::max<Eigen::Index>(keep, 1);
    cores.push_back(f.u.leftCols(keep));
    rest = f.s.head(keep).cast<cplx>().asDiagonal() * f.v.leftCols(keep).adjoint();
    chi = keep;
  }
  Matrix last(chi * dd, 1);
  for (Eigen::Index s = 0; s < dd; ++s) last.block(chi * s, 0, chi, 1) = rest.col(s);
  cores.push_back(std::move(last));
  return cores;
}

Matrix site_operator(const Matrix& core, Eigen::Index chi_left, Eigen::Index l, Eigen::Index r, int d) {
  Matrix op(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) op(i, j) = core(l + chi_left * (i * d + j), r);
  return op;
}

}  // namespace

Mpo build_mpo(const OperatorSum& h, int gate_width_limit) {
  const int n = h.sites();
  const int d = h.local_dim();
  for (const auto& t : h.terms())
    if (t.width > gate_width_limit)
      throw InvalidArgument("build_mpo: term on " + std::to_string(t.width) + " sites exceeds the gate-width limit " +
                            std::to_string(gate_width_limit));

  // channels[b + 1] counts the channels on bond b (between sites b and b+1).
  std::vector<int> channels(static_cast<std::size_t>(n + 1), 2);
  struct Placed {
    const LocalTerm* term;
    std::vector<Matrix> cores;
    std::vector<int> offset;  // offset[j]: first channel of internal bond j
  };
  std::vector<Placed> placed;
  for (const auto& t : h.terms()) {
    Placed p{&t, {}, {}};
    if (t.width > 1) {
      p.cores = operator_chain(t, d);
      for (int j = 0; j + 1 < t.width; ++j) {
        int& c = channels[static_cast<std::size_t>(t.first_site + j + 1)];
        p.offset.push_back(c);
        c += static_cast<int>(p.cores[static_cast<std::size_t>(j)].cols());
      }
    }
    placed.push_back(std::move(p));
  }

  std::vector<std::map<std::pair<int, int>, Matrix>> acc(static_cast<std::size_t>(n));
  auto add_entry = [&](int site, int wl, int wr, const Matrix& op) {
    auto& slot = acc[static_cast<std::size_t>(site)][{wl, wr}];
    if (slot.size() == 0) slot = op;
    else slot += op;
  };
  const Matrix id = Matrix::Identity(d, d);
  for (int k = 0; k < n; ++k) {
    add_entry(k, kInit, kInit, id);
    add_entry(k, kFinal, kFinal, id);
  }
  if (h.constant() != 0.0) add_entry(0, kInit, kFinal, h.constant() * id);

  for (const auto& p : placed) {
    const LocalTerm& t = *p.term;
    if (t.width == 1) {
      add_entry(t.first_site, kInit, kFinal, t.op);
      continue;
    }
    for (int j = 0; j < t.width; ++j) {
      const Matrix& core = p.cores[static_cast<std::size_t>(j)];
      const Eigen::Index chi_left = j == 0 ? 1 : p.cores[static_cast<std::size_t>(j - 1)].cols();
      for (Eigen::Index l = 0; l < chi_left; ++l)
        for (Eigen::Index r = 0; r < core.cols(); ++r) {
          const int wl = j == 0 ? kInit : p.offset[static_cast<std::size_t>(j - 1)] + static_cast<int>(l);
          const int wr = j == t.width - 1 ? kFinal : p.offset[static_cast<std::size_t>(j)] + static_cast<int>(r);
          add_entry(t.first_site + j, wl, wr, site_operator(core, chi_left, l, r, d));
        }
    }
  }

  Mpo mpo;
  mpo.n = n;
  mpo.d = d;
  for (int k = 0; k < n; ++k) {
    MpoSite site;
    site.left = k == 0 ? 1 : channels[static_cast<std::size_t>(k)];
    site.right = k == n - 1 ? 1 : channels[static_cast<std::size_t>(k + 1)];
    for (auto& [key, op] : acc[static_cast<std::size_t>(k)]) {
      int wl = key.first, wr = key.second;
      // The boundary vectors select init on the left and final on the right.
      if (k == 0) {
        if (wl != kInit) continue;
        wl = 0;
      }
      if (k == n - 1) {
        if (wr != kFinal) continue;
        wr = 0;
      }
      if (linalg::max_abs(op) == 0.0) continue;
      site.entries.push_back({wl, wr, std::move(op)});
    }
    mpo.sites.push_back(std::move(site));
  }
  return mpo;
}

MatrixProductState apply_mpo(const Mpo& w, const MatrixProductState& psi) {
  if (w.n != psi.n || w.d != psi.d) throw InvalidArgument("apply_mpo: shape mismatch");
  MatrixProductState out;
  out.n = psi.n;
  out.d = psi.d;
  out.cumulative_truncation_error = psi.cumulative_truncation_error;
  for (int k = 0; k < psi.n; ++k) {
    const auto& a = psi.tensors[static_cast<std::size_t>(k)];
    const auto& site = w.sites[static_cast<std::size_t>(k)];
    const Eigen::Index cl = a.left, cr = a.right;
    const Eigen::Index nl = cl * site.left, nr = cr * site.right;
    SiteTensor t{static_cast<int>(nl), static_cast<int>(nr), Matrix::Zero(nl * psi.d, nr)};
    for (const auto& e : site.entries)
      for (int sp = 0; sp < psi.d; ++sp)
        for (int s = 0; s < psi.d; ++s) {
          const cplx c = e.op(sp, s);
          if (c == cplx(0.0)) continue;
          t.data.block(cl * e.wl + nl * sp, cr * e.wr, cl, cr) += c * a.slice(s);
        }
    out.tensors.push_back(std::move(t));
  }
  return out;
}

cplx expectation(const Mpo& w, const MatrixProductState& psi) { return inner(psi, apply_mpo(w, psi)); }

MatrixProductState apply_hamiltonian(const OperatorSum& h, const MatrixProductState& psi, int max_bond, double cutoff,
                                     int gate_width_limit) {
  return compress_unnormalized(apply_mpo(build_mpo(h, gate_width_limit), psi), TruncationPolicy{max_bond, cutoff});
}

MatrixProductState apply_hamiltonian(const ChainSpec& chain, const MatrixProductState& psi, int max_bond,
                                     double cutoff) {
  return apply_hamiltonian(chain.as_sum(), psi, max_bond, cutoff);
}

MatrixProductState apply_hamiltonian(const SegmentedHamiltonian& seg, const MatrixProductState& psi, int max_bond,
                                     double cutoff, int gate_width_limit) {
  return apply_hamiltonian(seg.full(), psi, max_bond, cutoff, gate_width_limit);
}

}  // namespace agsp
