#include "agsp/chain_model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "agsp/linalg.hpp"

namespace agsp {

namespace {

Matrix pauli(char which) {
  Matrix p = Matrix::Zero(2, 2);
  switch (which) {
    case 'I':
      p << 1, 0, 0, 1;
      break;
    case 'X':
      p << 0, 1, 1, 0;
      break;
    case 'Y':
      p << 0, cplx(0, -1), cplx(0, 1), 0;
      break;
    case 'Z':
      p << 1, 0, 0, -1;
      break;
    default:
      throw InvalidArgument("unknown Pauli");
  }
  return p;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  const double v = it == params.end() ? fallback : it->second;
  if (!std::isfinite(v)) throw InvalidArgument("parameter '" + key + "' is not finite");
  return v;
}

void check_known_params(const std::map<std::string, double>& params, std::initializer_list<const char*> known,
                        const std::string& model) {
  for (const auto& [k, v] : params) {
    bool found = false;
    for (const char* name : known) found = found || k == name;
    if (!found) throw InvalidArgument("model '" + model + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw InvalidArgument("parameter '" + k + "' is not finite");
  }
}

// Weight of a single-site field assigned to one bond: boundary sites belong to
// one bond only, interior sites are split evenly between their two bonds.
std::pair<double, double> field_weights(int bond, int n) {
  const double wl = bond == 0 ? 1.0 : 0.5;
  const double wr = bond == n - 2 ? 1.0 : 0.5;
  return {wl, wr};
}

std::vector<Matrix> tfim_terms(int n, double J, double h, double g) {
  const Matrix X = pauli('X'), Z = pauli('Z'), I = pauli('I');
  std::vector<Matrix> terms;
  for (int b = 0; b < n - 1; ++b) {
    const auto [wl, wr] = field_weights(b, n);
    terms.push_back(-J * kron(Z, Z) - h * (wl * kron(X, I) + wr * kron(I, X)) - g * (wl * kron(Z, I) + wr * kron(I, Z)));
  }
  return terms;
}

std::vector<Matrix> heisenberg_terms(int n, double J, double hz) {
  const Matrix X = pauli('X'), Y = pauli('Y'), Z = pauli('Z'), I = pauli('I');
  const Matrix exchange = kron(X, X) + kron(Y, Y) + kron(Z, Z);
  std::vector<Matrix> terms;
  for (int b = 0; b < n - 1; ++b) {
    const auto [wl, wr] = field_weights(b, n);
    terms.push_back(J * exchange - hz * (wl * kron(Z, I) + wr * kron(I, Z)));
  }
  return terms;
}

std::vector<Matrix> random_bond_terms(int n, int d, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int dd = d * d;
  std::vector<Matrix> terms;
  for (int b = 0; b < n - 1; ++b) {
    RealMatrix g(dd, dd);
    for (int j = 0; j < dd; ++j)
      for (int i = 0; i < dd; ++i) g(i, j) = normal(rng);
    terms.push_back((scale * 0.5 * (g + g.transpose())).cast<cplx>());
  }
  return terms;
}

// Shifts every term to λ_min = 0 and divides by the common widest range.
ShiftRecord normalize(std::vector<Matrix>& terms) {
  double widest = 0.0;
  std::vector<double> lows;
  for (auto& t : terms) {
    t = 0.5 * (t + t.adjoint()).eval();
    const RealVector w = linalg::eigvalsh(t);
    lows.push_back(w(0));
    widest = std::max(widest, w(w.size() - 1) - w(0));
  }
  ShiftRecord rec;
  rec.scale = widest > 0.0 ? widest : 1.0;
  rec.offset = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = (terms[i] - lows[i] * Matrix::Identity(terms[i].rows(), terms[i].cols())) / rec.scale;
    rec.offset += lows[i];
  }
  return rec;
}

}  // namespace

OperatorSum ChainSpec::as_sum() const {
  OperatorSum sum(n, d);
  for (int i = 0; i < static_cast<int>(terms.size()); ++i) sum.add(i, 2, terms[static_cast<std::size_t>(i)]);
  return sum;
}

ValidationReport validate_terms(const ChainSpec& chain) {
  ValidationReport report;
  auto problem = [&](const std::string& p) {
    report.ok = false;
    report.problems.push_back(p);
  };
  if (chain.n < 2) problem("n must be >= 2");
  if (chain.d < 2) problem("d must be >= 2");
  if (static_cast<int>(chain.terms.size()) != chain.n - 1)
    problem("expected " + std::to_string(chain.n - 1) + " terms, found " + std::to_string(chain.terms.size()));
  const Eigen::Index dd = static_cast<Eigen::Index>(chain.d) * chain.d;
  for (std::size_t i = 0; i < chain.terms.size(); ++i) {
    const Matrix& t = chain.terms[i];
    TermCheck check;
    check.index = static_cast<int>(i);
    if (t.rows() != dd || t.cols() != dd) {
      check.ok = false;
      problem("term " + std::to_string(i) + " is not d²×d²");
      report.terms.push_back(check);
      continue;
    }
    check.hermiticity_deviation = linalg::hermiticity_deviation(t);
    const RealVector w = linalg::eigvalsh(0.5 * (t + t.adjoint()));
    check.min_eigenvalue = w(0);
    check.max_eigenvalue = w(w.size() - 1);
    if (check.hermiticity_deviation > kTermTolerance) {
      check.ok = false;
      problem("term " + std::to_string(i) + " is not Hermitian");
    }
    if (check.min_eigenvalue < -kTermTolerance || check.max_eigenvalue > 1.0 + kTermTolerance) {
      check.ok = false;
      std::ostringstream os;
      os << "term " << i << " eigenvalues [" << check.min_eigenvalue << ", " << check.max_eigenvalue
         << "] outside [0, 1]";
      problem(os.str());
    }
    report.terms.push_back(check);
  }
  return report;
}

void require_valid(const ChainSpec& chain) {
  const auto report = validate_terms(chain);
  if (report.ok) return;
  std::string msg = "invalid chain:";
  for (const auto& p : report.problems) msg += " " + p + ";";
  throw InvalidArgument(msg);
}

ChainSpec build_standard_model(const std::string& name, int n, int d, const std::map<std::string, double>& params,
                               std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("n must be >= 2");
  if (d < 2) throw InvalidArgument("d must be >= 2");
  ChainSpec chain;
  chain.n = n;
  chain.d = d;
  chain.label = name;
  chain.params = params;
  chain.seed = seed;
  if (name == "tfim") {
    if (d != 2) throw InvalidArgument("tfim requires d = 2");
    check_known_params(params, {"J", "h", "g"}, name);
    chain.terms = tfim_terms(n, param(params, "J", 1.0), param(params, "h", 1.0), param(params, "g", 0.0));
  } else if (name == "heisenberg") {
    if (d != 2) throw InvalidArgument("heisenberg requires d = 2");
    check_known_params(params, {"J", "hz"}, name);
    chain.terms = heisenberg_terms(n, param(params, "J", 1.0), param(params, "hz", 0.0));
  } else if (name == "random_bond") {
    check_known_params(params, {"scale"}, name);
    chain.terms = random_bond_terms(n, d, param(params, "scale", 1.0), seed);
  } else {
    throw InvalidArgument("unknown model '" + name + "' (expected tfim, heisenberg or random_bond)");
  }
  chain.shift_record = normalize(chain.terms);
  require_valid(chain);
  return chain;
}

HermitianOperator assemble_dense(const ChainSpec& chain, std::int64_t limit) {
  return HermitianOperator(chain.as_sum().dense(limit), {"chain:" + chain.label});
}

double ground_energy_of(const Matrix& m) { return linalg::eigvalsh(m)(0); }

OperatorSum SegmentedHamiltonian::full() const {
  OperatorSum sum(n, d);
  sum.add(left);
  for (const auto& b : bonds) sum.add(b);
  sum.add(right);
  return sum;
}

LocalTerm SegmentedHamiltonian::left_with_first_bond() const {
  const int width = bond(1).last_site() + 1;
  return {0, width, assemble_window({left, bond(1)}, 0, width, d)};
}

LocalTerm SegmentedHamiltonian::right_with_last_bond() const {
  const int first = bond(s).first_site;
  const int width = n - first;
  return {first, width, assemble_window({bond(s), right}, first, width, d)};
}

SegmentedHamiltonian segment(const ChainSpec& chain, int m, int s) {
  if (m < 1) throw InvalidArgument("segment: m must be >= 1");
  if (s < 2) throw InvalidArgument("segment: s must be >= 2");
  if (s % 2 != 0) throw InvalidArgument("segment: s must be even");
  if (m + s + 1 > chain.n) throw InvalidArgument("segment: m + s + 1 exceeds n");
  if (static_cast<int>(chain.terms.size()) != chain.n - 1) throw InvalidArgument("segment: malformed chain");

  SegmentedHamiltonian seg;
  seg.n = chain.n;
  seg.d = chain.d;
  seg.m = m;
  seg.s = s;
  seg.physical = chain.shift_record;

  std::vector<LocalTerm> left_terms;
  for (int b = 0; b < m; ++b) left_terms.push_back({b, 2, chain.terms[static_cast<std::size_t>(b)]});
  seg.left = {0, m + 1, assemble_window(left_terms, 0, m + 1, chain.d)};

  for (int i = 1; i <= s; ++i) {
    const int b = m + i - 1;
    seg.bonds.push_back({b, 2, chain.terms[static_cast<std::size_t>(b)]});
  }

  const int right_first = m + s;
  const int right_width = chain.n - right_first;
  std::vector<LocalTerm> right_terms;
  for (int b = right_first; b < chain.n - 1; ++b) right_terms.push_back({b, 2, chain.terms[static_cast<std::size_t>(b)]});
  seg.right = {right_first, right_width, assemble_window(right_terms, right_first, right_width, chain.d)};
  return seg;
}

SegmentedHamiltonian frustrated_shift(const SegmentedHamiltonian& seg) {
  if (seg.s < 8) throw InvalidArgument("frustrated_shift: requires s >= 8");
  auto snap = [](double c) { return std::abs(c) <= kTermTolerance ? 0.0 : c; };

  SegmentedHamiltonian out = seg;
  const double c_left = snap(ground_energy_of(seg.left.op));
  const double c_right = snap(ground_energy_of(seg.right.op));

  std::vector<LocalTerm> interior(seg.bonds.begin() + 3, seg.bonds.begin() + (seg.s - 3));
  const int first = interior.front().first_site;
  const int width = interior.back().last_site() - first + 1;
  const double c_mid = snap(ground_energy_of(assemble_window(interior, first, width, seg.d)));
  const int interior_count = seg.s - 6;

  if (c_left != 0.0) out.left.op -= c_left * Matrix::Identity(out.left.op.rows(), out.left.op.cols());
  if (c_right != 0.0) out.right.op -= c_right * Matrix::Identity(out.right.op.rows(), out.right.op.cols());
  if (c_mid != 0.0) {
    const double per_term = c_mid / interior_count;
    for (int i = 4; i <= seg.s - 3; ++i) {
      Matrix& op = out.bonds[static_cast<std::size_t>(i - 1)].op;
      op -= per_term * Matrix::Identity(op.rows(), op.cols());
    }
  }
  out.frustration = {seg.frustration.left + c_left, seg.frustration.right + c_right,
                     seg.frustration.interior + c_mid, true};
  out.identity_shift = seg.identity_shift + c_left + c_right + c_mid;
  return out;
}

nlohmann::json chain_to_json(const ChainSpec& chain) {
  nlohmann::json j;
  j["format"] = 1;
  j["label"] = chain.label;
  j["n"] = chain.n;
  j["d"] = chain.d;
  j["params"] = chain.params;
  j["seed"] = chain.seed;
  j["shift_record"] = {{"scale", chain.shift_record.scale}, {"offset", chain.shift_record.offset}};
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : chain.terms) {
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) entries.push_back({t(r, c).real(), t(r, c).imag()});
    terms.push_back(std::move(entries));
  }
  j["terms"] = std::move(terms);
  return j;
}

ChainSpec chain_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("chain JSON must be an object");
  if (j.value("format", 0) != 1) throw InvalidArgument("chain JSON: unsupported or missing format (expected 1)");
  ChainSpec chain;
  try {
    chain.label = j.at("label").get<std::string>();
    chain.n = j.at("n").get<int>();
    chain.d = j.at("d").get<int>();
    chain.params = j.value("params", std::map<std::string, double>{});
    chain.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("shift_record")) {
      chain.shift_record.scale = j["shift_record"].at("scale").get<double>();
      chain.shift_record.offset = j["shift_record"].at("offset").get<double>();
    }
    if (j.contains("terms")) {
      const Eigen::Index dd = static_cast<Eigen::Index>(chain.d) * chain.d;
      for (const auto& entries : j.at("terms")) {
        if (static_cast<Eigen::Index>(entries.size()) != dd * dd) throw InvalidArgument("chain JSON: term has wrong size");
        Matrix t(dd, dd);
        std::size_t k = 0;
        for (Eigen::Index r = 0; r < dd; ++r)
          for (Eigen::Index c = 0; c < dd; ++c, ++k) t(r, c) = cplx(entries[k].at(0).get<double>(), entries[k].at(1).get<double>());
        chain.terms.push_back(std::move(t));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("chain JSON: ") + e.what());
  }
  if (chain.terms.empty()) {
    // A document without terms names a standard model to rebuild.
    return build_standard_model(chain.label, chain.n, chain.d, chain.params, chain.seed);
  }
  require_valid(chain);
  return chain;
}

}  // namespace agsp
