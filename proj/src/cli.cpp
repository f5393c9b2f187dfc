#include "agsp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "agsp/agsp_engine.hpp"
#include "agsp/linalg.hpp"
#include "agsp/report.hpp"

namespace agsp::cli {

namespace {

enum class Kind { number, integer, grid, integer_grid, flag };

struct ParamSpec {
  std::string key;
  Kind kind;
  std::string help;
  bool required = false;
};

const std::vector<std::pair<Command, std::string>>& command_table() {
  static const std::vector<std::pair<Command, std::string>> table = {
      {Command::spectrum, "spectrum"},         {Command::agsp_verify, "agsp-verify"},
      {Command::robustness, "robustness"},     {Command::truncation_decay, "truncation-decay"},
      {Command::area_law, "area-law"},         {Command::mps_approx, "mps-approx"},
      {Command::ground_energy, "ground-energy"}, {Command::er_growth, "er-growth"}};
  return table;
}

std::string command_help(Command c) {
  switch (c) {
    case Command::spectrum: return "Extremal spectrum (epsilon0, epsilon1, gap, u) of the chain";
    case Command::agsp_verify: return "Build K = C_l(H^(t)) and verify invariance, shrinking and entanglement rank";
    case Command::robustness: return "Ground state and gap of H^(t) against H over a t-grid";
    case Command::truncation_decay: return "Tail of the ground state beyond P_t of H - A, and the mixing norm";
    case Command::area_law: return "Middle-cut entanglement entropy of the ground state over an n-grid";
    case Command::mps_approx: return "Fidelity of the ground state compressed to a bond dimension";
    case Command::ground_energy: return "Ground energy by filtered MPS power iteration";
    case Command::er_growth: return "Operator entanglement rank of H^l over an l-grid";
  }
  return {};
}

const std::vector<ParamSpec>& schema(Command c) {
  static const std::map<Command, std::vector<ParamSpec>> table = {
      {Command::spectrum, {}},
      {Command::agsp_verify,
       {{"m", Kind::integer, "sites left of the frustrated section, minus one", true},
        {"s", Kind::integer, "bonds in the frustrated section (even)", true},
        {"t", Kind::number, "truncation threshold (default: no truncation)"},
        {"l", Kind::integer, "filter degree", true},
        {"product-overlap", Kind::flag, "also estimate the best product overlap"},
        {"restarts", Kind::integer, "restarts of the product-overlap search (default 32)"}}},
      {Command::robustness,
       {{"m", Kind::integer, "segment offset", true},
        {"s", Kind::integer, "frustrated section length", true},
        {"t-grid", Kind::grid, "thresholds, start:stop:step or a comma list", true}}},
      {Command::truncation_decay,
       {{"m", Kind::integer, "segment offset", true},
        {"s", Kind::integer, "frustrated section length (>= 4)", true},
        {"t-grid", Kind::grid, "thresholds for the tail scan", true},
        {"u-grid", Kind::grid, "values of u for the mixing scan (default 0:8:0.5)"},
        {"gaps", Kind::grid, "values of t - u for the mixing scan (default 4,8,16)"}}},
      {Command::area_law,
       {{"n-grid", Kind::integer_grid, "chain lengths", true},
        {"tolerance", Kind::number, "allowed relative entropy change between the two largest n (default 0.05)"}}},
      {Command::mps_approx,
       {{"max-bond", Kind::integer, "bond dimension B (default 8)"},
        {"fidelity-floor", Kind::number, "required fidelity (default 1 - 1e-6)"}}},
      {Command::ground_energy,
       {{"t", Kind::number, "truncation threshold (default: full H)"},
        {"m", Kind::integer, "segment offset (needed with --t)"},
        {"s", Kind::integer, "frustrated section length (needed with --t)"},
        {"l", Kind::integer, "filter degree (default: from --delta)"},
        {"delta", Kind::number, "target shrink factor used to pick l (default 1e-2)"},
        {"max-bond", Kind::integer, "bond dimension cap (default 16)"},
        {"cutoff", Kind::number, "discarded-weight cutoff (default 1e-14)"},
        {"max-iters", Kind::integer, "iteration cap (default 200)"},
        {"energy-tol", Kind::number, "relative change that ends the iteration (default 1e-12)"},
        {"rel-tol", Kind::number, "allowed relative error against the oracle (default 1e-6)"}}},
      {Command::er_growth,
       {{"l-grid", Kind::integer_grid, "powers of H", true},
        {"cut", Kind::integer, "sites left of the cut (default n/2)"},
        {"ratio-max", Kind::number, "allowed max/min of the normalized rank (default 3)"}}},
  };
  return table.at(c);
}

const ParamSpec* find_spec(Command c, const std::string& key) {
  for (const auto& p : schema(c))
    if (p.key == key) return &p;
  return nullptr;
}

double parse_number(const std::string& text, const std::string& flag) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": expected a finite number, got '" + text + "'");
  }
}

long long parse_integer(const std::string& text, const std::string& flag) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": expected an integer, got '" + text + "'");
  }
}

bool is_integral(double v) { return std::floor(v) == v && std::abs(v) < 1e15; }

void validate_value(const ParamSpec& spec, const nlohmann::json& v) {
  const std::string flag = "--" + spec.key;
  switch (spec.kind) {
    case Kind::flag:
      if (!v.is_boolean()) throw UsageError(flag + ": expected a boolean");
      return;
    case Kind::number:
      if (!v.is_number()) throw UsageError(flag + ": expected a number");
      return;
    case Kind::integer:
      if (!v.is_number_integer()) throw UsageError(flag + ": expected an integer");
      return;
    case Kind::grid:
    case Kind::integer_grid:
      if (!v.is_array() || v.empty()) throw UsageError(flag + ": expected a non-empty grid");
      for (const auto& x : v) {
        if (!x.is_number()) throw UsageError(flag + ": grid entries must be numbers");
        if (spec.kind == Kind::integer_grid && !is_integral(x.get<double>()))
          throw UsageError(flag + ": grid entries must be integers");
      }
      return;
  }
}

template <typename T>
T param_or(const nlohmann::json& params, const std::string& key, T fallback) {
  return params.contains(key) ? params.at(key).get<T>() : fallback;
}

std::vector<double> grid_of(const nlohmann::json& params, const std::string& key, const std::string& fallback) {
  return params.contains(key) ? params.at(key).get<std::vector<double>>() : parse_grid(fallback);
}

std::vector<int> int_grid_of(const nlohmann::json& params, const std::string& key) {
  std::vector<int> out;
  for (double v : params.at(key).get<std::vector<double>>()) out.push_back(static_cast<int>(v));
  return out;
}

nlohmann::json read_chain_argument(const std::string& text) {
  std::string body = text;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    std::ifstream in(text, std::ios::binary);
    if (!in) throw UsageError("--chain: cannot read chain file '" + text + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("--chain: invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string command_name(Command c) {
  for (const auto& [cmd, name] : command_table())
    if (cmd == c) return name;
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [cmd, n] : command_table())
    if (n == name) return cmd;
  return std::nullopt;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : command_table()) out.push_back(entry.second);
    return out;
  }();
  return names;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("grid '" + text + "': expected start:stop:step");
    const double a = parse_number(parts[0], "grid"), b = parse_number(parts[1], "grid"),
                 c = parse_number(parts[2], "grid");
    if (!(c > 0.0)) throw UsageError("grid '" + text + "': step must be positive");
    if (b < a) throw UsageError("grid '" + text + "': stop is below start");
    const double slack = 1e-9 * c;
    for (long long k = 0;; ++k) {
      const double v = a + static_cast<double>(k) * c;
      if (v > b + slack) break;
      out.push_back(std::round(v * 1e12) / 1e12);
      if (out.size() > 1000000) throw UsageError("grid '" + text + "': too many points");
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_number(p, "grid"));
  }
  if (out.empty()) throw UsageError("grid '" + text + "' is empty");
  return out;
}

void validate_params(Command command, const nlohmann::json& params) {
  if (!params.is_object()) throw UsageError("parameters must be a JSON object");
  for (const auto& [key, value] : params.items()) {
    const ParamSpec* spec = find_spec(command, key);
    if (!spec) throw UsageError("--" + key + " is not a parameter of " + command_name(command));
    validate_value(*spec, value);
  }
  for (const auto& spec : schema(command))
    if (spec.required && !params.contains(spec.key))
      throw UsageError("missing required --" + spec.key + " for " + command_name(command));
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"command", command_name(command)}, {"chain", chain}, {"params", params}, {"output", output}, {"seed", seed}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  ExperimentConfig c;
  try {
    const auto cmd = parse_command(j.at("command").get<std::string>());
    if (!cmd) throw UsageError("unknown command '" + j.at("command").get<std::string>() + "'");
    c.command = *cmd;
    c.chain = j.at("chain");
    c.params = j.value("params", nlohmann::json::object());
    c.output = j.value("output", std::string("reports"));
    c.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  validate_params(c.command, c.params);
  try {
    (void)chain_from_json(c.chain);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::string usage() {
  std::ostringstream os;
  os << "usage: agsp_lab <command> [options]\n\ncommands:\n";
  for (const auto& [cmd, name] : command_table()) os << "  " << name << std::string(18 - name.size(), ' ')
                                                     << command_help(cmd) << "\n";
  os << "\nRun 'agsp_lab <command> --help' for the options of a command.\n"
        "Grids use start:stop:step (stop inclusive) or a comma list.\n"
        "AGSP_LAB_THREADS caps the number of worker threads.\n";
  return os.str();
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  if (args.empty()) throw UsageError("missing command\n" + usage());
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") throw HelpRequested(usage());
  const auto cmd = parse_command(args[0]);
  if (!cmd) throw UsageError("unknown command '" + args[0] + "'");

  CLI::App app(command_help(*cmd), "agsp_lab " + args[0]);
  // --h is the transverse field, so help has no short form.
  app.set_help_flag("--help", "print the options of this command");
  std::string model, chain_arg, output = "reports";
  int n = 0, d = 2;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> model_params;
  std::vector<std::string> extra_params;
  app.add_option("--model", model, "standard model: tfim, heisenberg or random_bond");
  app.add_option("--chain", chain_arg, "chain JSON, inline or a file path");
  app.add_option("--n", n, "number of sites (with --model)");
  app.add_option("--d", d, "local dimension (with --model, default 2)");
  for (const char* p : {"J", "h", "g", "hz", "scale"})
    app.add_option(std::string("--") + p, model_params[p], std::string("model parameter ") + p);
  app.add_option("--param", extra_params, "extra model parameter key=value (repeatable)");
  app.add_option("--seed", seed, "seed for every randomized step (default 0)");
  app.add_option("--output", output, "report directory (default ./reports)");

  std::map<std::string, std::string> raw;
  std::map<std::string, bool> flags;
  for (const auto& spec : schema(*cmd)) {
    if (spec.kind == Kind::flag)
      app.add_flag("--" + spec.key, flags[spec.key], spec.help);
    else
      app.add_option("--" + spec.key, raw[spec.key], spec.help);
  }

  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(args[0]) + ": " + e.what());
  }

  ExperimentConfig config;
  config.command = *cmd;
  config.output = output;
  config.seed = seed;
  for (const auto& spec : schema(*cmd)) {
    if (spec.kind == Kind::flag) {
      if (flags[spec.key]) config.params[spec.key] = true;
      continue;
    }
    if (app.count("--" + spec.key) == 0) continue;
    const std::string& text = raw[spec.key];
    switch (spec.kind) {
      case Kind::number: config.params[spec.key] = parse_number(text, spec.key); break;
      case Kind::integer: config.params[spec.key] = parse_integer(text, spec.key); break;
      case Kind::grid:
      case Kind::integer_grid: {
        const std::vector<double> g = parse_grid(text);
        if (spec.kind == Kind::integer_grid)
          for (double v : g)
            if (!is_integral(v)) throw UsageError("--" + spec.key + ": grid entries must be integers");
        config.params[spec.key] = g;
        break;
      }
      case Kind::flag: break;
    }
  }
  const bool has_model = app.count("--model") > 0, has_chain = app.count("--chain") > 0;
  if (!has_model && !has_chain) throw UsageError("missing chain: pass --model or --chain");
  if (has_model && has_chain) throw UsageError("--model and --chain are mutually exclusive");
  validate_params(*cmd, config.params);
  std::map<std::string, double> params;
  for (const auto& [k, v] : model_params)
    if (app.count("--" + k) > 0) params[k] = parse_number(v, k);
  for (const auto& kv : extra_params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param: expected key=value, got '" + kv + "'");
    params[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), "param");
  }
  if (has_model) {
    if (app.count("--n") == 0) {
      if (*cmd != Command::area_law) throw UsageError("--n is required with --model");
      const auto grid = config.params.at("n-grid").get<std::vector<double>>();
      n = static_cast<int>(*std::max_element(grid.begin(), grid.end()));
    }
    config.chain = {{"format", 1}, {"label", model}, {"n", n}, {"d", d}, {"params", params}, {"seed", seed}};
  } else {
    if (!params.empty() || app.count("--n") || app.count("--d"))
      throw UsageError("model flags (--n, --d, --J, --h, --g, --hz, --scale, --param) need --model");
    if (*cmd == Command::area_law) throw UsageError("area-law rebuilds the chain per n and needs --model");
    config.chain = read_chain_argument(chain_arg);
  }
  try {
    (void)chain_from_json(config.chain);
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string(has_model ? "--model: " : "--chain: ") + e.what());
  }
  return config;
}

ChainSpec resolve_chain(const ExperimentConfig& config) { return chain_from_json(config.chain); }

namespace {

struct Outcome {
  std::vector<ReportFile> files;
  bool pass = true;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
};

std::string fixture_name(const ChainSpec& chain) {
  std::ostringstream os;
  os << (chain.label.empty() ? "chain" : chain.label) << "(n=" << chain.n << ",d=" << chain.d;
  for (const auto& [k, v] : chain.params) os << "," << k << "=" << format_number(v);
  os << ")";
  return os.str();
}

Vector oracle_ground(const ChainSpec& chain) {
  const ExtremalSpectrum ex = extremal_spectrum(chain.as_sum());
  if (ex.degenerate) throw DegenerateGroundStateError("ground state of " + fixture_name(chain) + " is degenerate");
  return ex.ground;
}

Outcome run_spectrum(const ExperimentConfig&, const ChainSpec& chain) {
  Outcome o;
  nlohmann::json report;
  const OperatorSum h = chain.as_sum();
  if (h.dim() <= 1024) {
    const SpectralDecomposition sd = eigendecompose(HermitianOperator(h.dense(1024)));
    report = spectral_report_json(sd);
    CsvTable csv({"index", "value"});
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) csv.add_row({static_cast<double>(i), sd.eigenvalues(i)});
    o.files.push_back({"eigenvalues.csv", csv.str()});
    report["method"] = "dense";
  } else {
    const ExtremalSpectrum ex = extremal_spectrum(h);
    report = {{"epsilon0", ex.epsilon0}, {"epsilon1", ex.epsilon1}, {"gap", ex.gap()},
              {"u", ex.u},               {"degenerate", ex.degenerate}, {"residual_max", ex.residual_max}};
    report["method"] = "lanczos";
  }
  report["fixture"] = fixture_name(chain);
  report["epsilon0_physical"] = chain.shift_record.to_physical(report["epsilon0"].get<double>());
  o.pass = report["residual_max"].get<double>() <= 1e-8;
  o.files.push_back(json_report("spectrum.json", report));
  o.summary = {{"epsilon0", report["epsilon0"]}, {"epsilon1", report["epsilon1"]}, {"gap", report["gap"]}};
  return o;
}

Outcome run_agsp_verify(const ExperimentConfig& cfg, const ChainSpec& chain) {
  Outcome o;
  const auto& p = cfg.params;
  const SegmentedHamiltonian seg = segment(chain, p.at("m").get<int>(), p.at("s").get<int>());
  const double t = param_or(p, "t", std::numeric_limits<double>::infinity());
  const AGSP k = make_agsp(seg, t, p.at("l").get<int>());
  const SpectralDecomposition sd = eigendecompose(HermitianOperator(k.target.sum.dense(kDefaultEigenLimit)));
  VerifyOptions vo;
  vo.product_overlap = param_or(p, "product-overlap", false);
  vo.restarts = param_or(p, "restarts", 32);
  vo.seed = cfg.seed;
  const AGSPReport r = verify_agsp(k, sd, vo);
  bool mu_ok = true;
  if (r.product_overlap && r.D_Delta_product && *r.D_Delta_product <= 0.5)
    mu_ok = *r.product_overlap >= 1.0 / std::sqrt(2.0 * *r.measured_D);
  o.pass = r.contract_holds() && mu_ok;
  nlohmann::json j = {{"fixture", fixture_name(chain)},
                      {"filter", filter_json(k.filter)},
                      {"report", agsp_report_json(r)},
                      {"m", seg.m},
                      {"s", seg.s},
                      {"cut_sites", k.cut_sites},
                      {"pass", o.pass},
                      {"seeds", {cfg.seed}}};
  j["t"] = std::isfinite(t) ? nlohmann::json(t) : nlohmann::json(nullptr);
  o.files.push_back(json_report("agsp.json", j));
  o.seeds = {cfg.seed};
  o.summary = {{"invariance_residual", r.invariance_residual},
               {"measured_shrink", r.measured_shrink},
               {"bound_shrink", r.bound_shrink}};
  return o;
}

Outcome run_robustness(const ExperimentConfig& cfg, const ChainSpec& chain) {
  Outcome o;
  const auto& p = cfg.params;
  const SegmentedHamiltonian seg = segment(chain, p.at("m").get<int>(), p.at("s").get<int>());
  const RobustnessScan scan = robustness_scan(seg, p.at("t-grid").get<std::vector<double>>());
  CsvTable csv({"t", "eps0", "eps1", "gap", "deficit", "degenerate"});
  std::vector<double> ts, defs, excluded;
  for (const auto& r : scan.rows) {
    csv.add_row({r.t, r.eps0, r.eps1, r.gap, r.deficit, r.degenerate ? 1.0 : 0.0});
    if (r.degenerate) {
      excluded.push_back(r.t);
      continue;
    }
    ts.push_back(r.t);
    defs.push_back(r.deficit);
  }
  ScanSidecar side;
  side.fixture = fixture_name(chain);
  side.seeds = {cfg.seed};
  std::optional<LinearFit> fit;
  try {
    fit = log2_fit(ts, defs, kRobustnessFitFloor, 1.0);
  } catch (const InvalidArgument&) {
  }
  const std::optional<double> knee = robustness_knee(scan);
  bool gap_ok = knee.has_value();
  if (knee)
    for (const auto& r : scan.rows)
      if (!r.degenerate && r.t >= *knee && r.gap < 0.5 * scan.gap) gap_ok = false;
  side.fit = fit;
  side.pass = fit && fit->slope < 0.0 && fit->r2 >= 0.9 && gap_ok;
  side.extra = {{"excluded_degenerate_t", excluded},
                {"gap", scan.gap},
                {"knee", knee ? nlohmann::json(*knee) : nlohmann::json(nullptr)},
                {"gap_ratio_ok", gap_ok}};
  o.pass = side.pass;
  o.files.push_back({"robustness.csv", csv.str()});
  o.files.push_back(json_report("robustness.json", side.to_json()));
  o.summary = {{"slope", fit ? nlohmann::json(fit->slope) : nlohmann::json(nullptr)},
               {"knee", side.extra["knee"]}};
  return o;
}

Outcome run_truncation_decay(const ExperimentConfig& cfg, const ChainSpec& chain) {
  Outcome o;
  const auto& p = cfg.params;
  const SegmentedHamiltonian seg = segment(chain, p.at("m").get<int>(), p.at("s").get<int>());
  const std::vector<TailRow> tails = truncation_decay_scan(seg, p.at("t-grid").get<std::vector<double>>());
  std::vector<double> ts, vs;
  for (const auto& r : tails) {
    ts.push_back(r.t);
    vs.push_back(r.tail);
  }
  std::optional<LinearFit> fit;
  try {
    fit = log2_fit(ts, vs, kTailFitLow, kTailFitHigh);
  } catch (const InvalidArgument&) {
  }
  CsvTable tail_csv({"t", "value", "bound"});
  for (const auto& r : tails)
    tail_csv.add_row({r.t, r.tail, fit ? std::exp2(fit->intercept + fit->slope * r.t) : 0.0});
  ScanSidecar tail_side;
  tail_side.fixture = fixture_name(chain);
  tail_side.seeds = {cfg.seed};
  tail_side.fit = fit;
  tail_side.pass = fit && fit->slope < 0.0 && fit->r2 >= 0.9;
  tail_side.extra = {{"fit_range", {kTailFitLow, kTailFitHigh}}};

  std::vector<std::pair<double, double>> tu;
  for (double u : grid_of(p, "u-grid", "0:8:0.5"))
    for (double g : grid_of(p, "gaps", "4,8,16")) tu.emplace_back(u + g, u);
  const std::vector<MixingRow> mix = mixing_scan(seg, tu);
  CsvTable mix_csv({"t", "u", "value", "bound"});
  int violations = 0;
  for (const auto& r : mix) {
    mix_csv.add_row({r.t, r.u, r.value, r.bound});
    if (r.value > r.bound) ++violations;
  }
  ScanSidecar mix_side;
  mix_side.fixture = tail_side.fixture;
  mix_side.seeds = {cfg.seed};
  mix_side.pass = violations == 0;
  mix_side.extra = {{"violations", violations}, {"points", mix.size()}};

  o.pass = tail_side.pass && mix_side.pass;
  o.files.push_back({"truncation_decay.csv", tail_csv.str()});
  o.files.push_back(json_report("truncation_decay.json", tail_side.to_json()));
  o.files.push_back({"mixing.csv", mix_csv.str()});
  o.files.push_back(json_report("mixing.json", mix_side.to_json()));
  o.summary = {{"slope", fit ? nlohmann::json(fit->slope) : nlohmann::json(nullptr)},
               {"r2", fit ? nlohmann::json(fit->r2) : nlohmann::json(nullptr)},
               {"mixing_violations", violations}};
  return o;
}

Outcome run_area_law(const ExperimentConfig& cfg, const ChainSpec& base) {
  Outcome o;
  const auto& p = cfg.params;
  std::vector<int> ns = int_grid_of(p, "n-grid");
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  CsvTable csv({"n", "entropy", "epsilon_rank"});
  std::vector<SchmidtSpectrum> spectra;
  std::vector<double> entropies;
  for (int n : ns) {
    const ChainSpec chain = build_standard_model(base.label, n, base.d, base.params, base.seed);
    const SchmidtSpectrum sp = entanglement_entropy(oracle_ground(chain), n, chain.d, n / 2);
    csv.add_row({static_cast<double>(n), sp.entropy, static_cast<double>(sp.epsilon_rank)});
    entropies.push_back(sp.entropy);
    o.files.push_back({"schmidt_n" + std::to_string(n) + ".csv", schmidt_csv({sp})});
  }
  const double tol = param_or(p, "tolerance", 0.05);
  std::optional<double> change;
  if (entropies.size() >= 2) {
    const double a = entropies[entropies.size() - 2], b = entropies.back();
    change = std::abs(b - a) / std::max(std::abs(a), 1e-300);
  }
  ScanSidecar side;
  side.fixture = base.label;
  side.seeds = {cfg.seed};
  side.pass = change && *change <= tol;
  side.extra = {{"relative_change", change ? nlohmann::json(*change) : nlohmann::json(nullptr)}, {"tolerance", tol}};
  o.pass = side.pass;
  o.files.push_back({"area_law.csv", csv.str()});
  o.files.push_back(json_report("area_law.json", side.to_json()));
  o.summary = {{"relative_change", side.extra["relative_change"]}};
  return o;
}

Outcome run_mps_approx(const ExperimentConfig& cfg, const ChainSpec& chain) {
  Outcome o;
  const auto& p = cfg.params;
  const int max_bond = param_or(p, "max-bond", 8);
  if (max_bond < 1) throw UsageError("--max-bond must be >= 1");
  const double floor = param_or(p, "fidelity-floor", 1.0 - 1e-6);
  const Vector ground = oracle_ground(chain);
  const MatrixProductState exact = from_dense(ground, chain.n, chain.d);
  CsvTable csv({"bond", "fidelity", "discarded_weight"});
  std::vector<int> bonds;
  for (int b = 1; b < max_bond; b *= 2) bonds.push_back(b);
  bonds.push_back(max_bond);
  double fidelity = 0.0;
  MatrixProductState kept;
  for (int b : bonds) {
    MatrixProductState c = compress(exact, b, 0.0);
    const double f = std::norm(ground.dot(to_dense(c)));
    csv.add_row({static_cast<double>(b), f, c.cumulative_truncation_error});
    fidelity = f;
    kept = std::move(c);
  }
  ScanSidecar side;
  side.fixture = fixture_name(chain);
  side.seeds = {cfg.seed};
  side.pass = fidelity >= floor;
  side.extra = {{"fidelity", fidelity}, {"fidelity_floor", floor}, {"max_bond", max_bond}};
  o.pass = side.pass;
  o.files.push_back({"mps_approx.csv", csv.str()});
  o.files.push_back(json_report("mps_approx.json", side.to_json()));
  o.files.push_back(json_report("mps_state.json", mps_to_json(kept)));
  o.summary = {{"fidelity", fidelity}};
  return o;
}

Outcome run_ground_energy(const ExperimentConfig& cfg, const ChainSpec& chain) {
  Outcome o;
  const auto& p = cfg.params;
  GroundEnergyConfig gc;
  gc.t = param_or(p, "t", gc.t);
  gc.m = param_or(p, "m", gc.m);
  gc.s = param_or(p, "s", gc.s);
  gc.l = param_or(p, "l", gc.l);
  gc.delta = param_or(p, "delta", gc.delta);
  gc.max_bond = param_or(p, "max-bond", gc.max_bond);
  gc.cutoff = param_or(p, "cutoff", gc.cutoff);
  gc.max_iters = param_or(p, "max-iters", gc.max_iters);
  gc.energy_tol = param_or(p, "energy-tol", gc.energy_tol);
  gc.seed = cfg.seed;
  const double rel_tol = param_or(p, "rel-tol", 1e-6);
  const GroundEnergyResult res = estimate_ground_energy(chain, gc);
  CsvTable csv({"iteration", "energy_normalized", "energy_physical"});
  for (std::size_t i = 0; i < res.history.size(); ++i)
    csv.add_row({static_cast<double>(i + 1), res.history[i], chain.shift_record.to_physical(res.history[i])});
  nlohmann::json j = {{"fixture", fixture_name(chain)},
                      {"energy", res.energy},
                      {"energy_normalized", res.energy_normalized},
                      {"iterations", res.iterations},
                      {"converged", res.converged},
                      {"degree", res.degree},
                      {"window", {{"eps0", res.window.eps0}, {"eps1", res.window.eps1}, {"u", res.window.u}}},
                      {"max_bond", res.psi.max_bond()},
                      {"seeds", {cfg.seed}}};
  bool ok = res.converged;
  if (chain.as_sum().dim() <= kDefaultDenseLimit) {
    const double e0 = extremal_spectrum(chain.as_sum()).epsilon0;
    const double rel = std::abs(res.energy_normalized - e0) / std::max(std::abs(e0), 1e-300);
    j["oracle_energy_normalized"] = e0;
    j["oracle_energy"] = chain.shift_record.to_physical(e0);
    j["relative_error"] = rel;
    ok = ok && rel <= rel_tol;
  }
  j["pass"] = ok;
  o.pass = ok;
  o.seeds = {cfg.seed};
  o.files.push_back({"ground_energy.csv", csv.str()});
  o.files.push_back(json_report("ground_energy.json", j));
  o.summary = {{"energy", res.energy}, {"iterations", res.iterations}, {"converged", res.converged}};
  return o;
}

Outcome run_er_growth(const ExperimentConfig& cfg, const ChainSpec& chain) {
  Outcome o;
  const auto& p = cfg.params;
  const int cut = param_or(p, "cut", chain.n / 2);
  const double ratio_max = param_or(p, "ratio-max", 3.0);
  const std::vector<ErGrowthRow> rows = er_growth_scan(chain.as_sum(), cut, int_grid_of(p, "l-grid"));
  CsvTable csv({"l", "rank", "normalized"});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rows) {
    csv.add_row({static_cast<double>(r.l), static_cast<double>(r.rank), r.normalized});
    lo = std::min(lo, r.normalized);
    hi = std::max(hi, r.normalized);
  }
  const double ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::max();
  ScanSidecar side;
  side.fixture = fixture_name(chain);
  side.seeds = {cfg.seed};
  side.pass = lo > 0.0 && ratio <= ratio_max;
  side.extra = {{"ratio", ratio}, {"ratio_max", ratio_max}, {"cut", cut}};
  o.pass = side.pass;
  o.files.push_back({"er_growth.csv", csv.str()});
  o.files.push_back(json_report("er_growth.json", side.to_json()));
  o.summary = {{"ratio", ratio}};
  return o;
}

}  // namespace

RunOutcome execute(const ExperimentConfig& config) {
  RunOutcome out;
  out.summary = {{"command", command_name(config.command)}, {"output", config.output}};
  try {
    validate_params(config.command, config.params);
    const ChainSpec chain = resolve_chain(config);
    Outcome o;
    switch (config.command) {
      case Command::spectrum: o = run_spectrum(config, chain); break;
      case Command::agsp_verify: o = run_agsp_verify(config, chain); break;
      case Command::robustness: o = run_robustness(config, chain); break;
      case Command::truncation_decay: o = run_truncation_decay(config, chain); break;
      case Command::area_law: o = run_area_law(config, chain); break;
      case Command::mps_approx: o = run_mps_approx(config, chain); break;
      case Command::ground_energy: o = run_ground_energy(config, chain); break;
      case Command::er_growth: o = run_er_growth(config, chain); break;
    }
    o.files.push_back(json_report("config.json", config.to_json()));
    std::vector<std::uint64_t> seeds = o.seeds;
    if (seeds.empty()) seeds.push_back(config.seed);
    const Manifest m = emit_report(o.files, config.output, config.to_json(), seeds);
    out.exit_code = o.pass ? kExitPass : kExitChecksFailed;
    out.summary["pass"] = o.pass;
    out.summary["files"] = m.files;
    out.summary["config_hash"] = m.config_hash;
    for (const auto& [k, v] : o.summary.items()) out.summary[k] = v;
    require_finite(out.summary, "summary");
  } catch (const std::exception& e) {
    out.exit_code = kExitError;
    out.summary["pass"] = false;
    out.summary["error"] = e.what();
    out.summary.erase("files");
  }
  out.summary["exit"] = out.exit_code;
  return out;
}

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const RunOutcome r = execute(config);
  if (r.summary.contains("error")) err << "agsp_lab: " << r.summary["error"].get<std::string>() << "\n";
  out << r.summary.dump() << "\n";
  return r.exit_code;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(parse_config(args), out, err);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitPass;
  } catch (const std::exception& e) {
    err << "agsp_lab: " << e.what() << "\n";
    out << nlohmann::json({{"pass", false}, {"error", e.what()}, {"exit", kExitError}}).dump() << "\n";
    return kExitError;
  }
}

}  // namespace agsp::cli
