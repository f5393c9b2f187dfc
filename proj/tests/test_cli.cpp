#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "agsp/cli.hpp"
#include "agsp/report.hpp"
#include "oracle.hpp"

using namespace agsp;
using namespace agsp::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("agsp_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig parse(std::vector<std::string> args) { return parse_config(args); }

}  // namespace

TEST(Cli, CommandNamesRoundTrip) {
  for (const std::string& name : command_names()) {
    const auto c = parse_command(name);
    ASSERT_TRUE(c.has_value()) << name;
    EXPECT_EQ(command_name(*c), name);
  }
  EXPECT_FALSE(parse_command("spectra").has_value());
  EXPECT_EQ(command_names().size(), 8u);
}

TEST(Cli, GridParsing) {
  EXPECT_EQ(parse_grid("0:1:0.25"), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(parse_grid("0:0.3:0.1").size(), 4u);
  EXPECT_EQ(parse_grid("4,8,16"), (std::vector<double>{4.0, 8.0, 16.0}));
  EXPECT_THROW(parse_grid("1:0:0.1"), UsageError);
  EXPECT_THROW(parse_grid("0:1:0"), UsageError);
  EXPECT_THROW(parse_grid("a,b"), UsageError);
  EXPECT_THROW(parse_grid(""), UsageError);
}

TEST(Cli, ParsesModelAndParameters) {
  const ExperimentConfig c = parse({"robustness", "--model", "tfim", "--n", "8", "--h", "1.5", "--m", "1", "--s", "4",
                                    "--t-grid", "1,2", "--seed", "5", "--output", "out"});
  EXPECT_EQ(c.command, Command::robustness);
  EXPECT_EQ(c.chain.at("label"), "tfim");
  EXPECT_EQ(c.chain.at("n"), 8);
  EXPECT_EQ(c.chain.at("params").at("h").get<double>(), 1.5);
  EXPECT_EQ(c.params.at("m"), 1);
  EXPECT_EQ(c.params.at("t-grid"), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.output, "out");
}

TEST(Cli, UsageErrorsNameTheCause) {
  auto message = [](std::vector<std::string> args) {
    try {
      parse_config(args);
    } catch (const UsageError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message({"robustness"}).find("missing chain"), std::string::npos);
  EXPECT_NE(message({"robustness", "--model", "tfim", "--n", "8", "--s", "4", "--t-grid", "1"}).find("--m"),
            std::string::npos);
  EXPECT_NE(message({"bogus"}).find("bogus"), std::string::npos);
  EXPECT_NE(message({"spectrum", "--model", "tfim", "--n", "x"}).find("--n"), std::string::npos);
  EXPECT_NE(message({"spectrum", "--model", "tfim", "--n", "4", "--l", "3"}).find("--l"), std::string::npos);
  EXPECT_THROW(parse_config({"--help"}), HelpRequested);
  EXPECT_THROW(parse_config({}), UsageError);
}

TEST(Cli, ConfigJsonRoundTripIsByteIdentical) {
  const ExperimentConfig c =
      parse({"agsp-verify", "--model", "heisenberg", "--n", "6", "--m", "1", "--s", "4", "--l", "3", "--product-overlap"});
  const std::string once = c.to_json().dump();
  EXPECT_EQ(ExperimentConfig::from_json(nlohmann::json::parse(once)).to_json().dump(), once);
  nlohmann::json bad = c.to_json();
  bad["params"]["frobnicate"] = 1;
  EXPECT_THROW(ExperimentConfig::from_json(bad), UsageError);
  EXPECT_THROW(validate_params(Command::er_growth, {{"l-grid", "1,2"}}), UsageError);
}

TEST(Cli, SpectrumRunMatchesOracle) {
  const fs::path dir = scratch("spectrum");
  ExperimentConfig c = parse({"spectrum", "--model", "tfim", "--n", "8", "--h", "1.5", "--output", dir.string()});
  std::ostringstream out, err;
  EXPECT_EQ(run(c, out, err), kExitPass) << err.str();
  const nlohmann::json summary = nlohmann::json::parse(out.str());
  const ChainSpec chain = resolve_chain(c);
  const auto ref = oracle::eig_real(oracle::tfim(8, 1.0, 1.5)).values;
  EXPECT_NEAR(chain.shift_record.to_physical(summary.at("epsilon0").get<double>()), ref(0), 1e-10);
  EXPECT_NEAR(chain.shift_record.to_physical(summary.at("epsilon1").get<double>()), ref(1), 1e-10);
  for (const char* f : {"spectrum.json", "eigenvalues.csv", "config.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("config_hash"), fnv1a_hex(c.to_json().dump()));
  EXPECT_EQ(manifest.at("config_hash"), summary.at("config_hash"));

  // Same config: byte-identical reports.
  const std::string csv = slurp(dir / "eigenvalues.csv");
  std::ostringstream out2;
  run(c, out2, err);
  EXPECT_EQ(slurp(dir / "eigenvalues.csv"), csv);
  EXPECT_EQ(out2.str(), out.str());

  // The hash moves with the config.
  c.seed = 1;
  const RunOutcome other = execute(c);
  EXPECT_NE(other.summary.at("config_hash"), summary.at("config_hash"));
  fs::remove_all(dir);
}

TEST(Cli, ExitCodesSeparateErrorsFromFailedChecks) {
  const fs::path dir = scratch("exit");
  // Ratio bound below one cannot hold.
  ExperimentConfig fail = parse({"er-growth", "--model", "tfim", "--n", "6", "--l-grid", "1,2,3", "--ratio-max", "0.5",
                                 "--output", dir.string()});
  const RunOutcome f = execute(fail);
  EXPECT_EQ(f.exit_code, kExitChecksFailed);
  EXPECT_FALSE(f.summary.at("pass").get<bool>());
  EXPECT_TRUE(fs::exists(dir / "er_growth.csv"));

  ExperimentConfig degenerate = parse({"agsp-verify", "--model", "tfim", "--n", "6", "--h", "0", "--m", "1", "--s", "4",
                                       "--l", "2", "--output", (dir / "d").string()});
  const RunOutcome d = execute(degenerate);
  EXPECT_EQ(d.exit_code, kExitError);
  EXPECT_TRUE(d.summary.contains("error"));
  fs::remove_all(dir);
}

TEST(Cli, MainEntryPrintsOneSummaryLine) {
  const fs::path dir = scratch("main");
  std::vector<std::string> args{"agsp_lab", "mps-approx", "--model", "tfim", "--n", "8", "--h", "1.5", "--max-bond", "4",
                                "--output", dir.string()};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  EXPECT_EQ(main_entry(static_cast<int>(argv.size()), argv.data(), out, err), kExitPass) << err.str();
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  const nlohmann::json s = nlohmann::json::parse(text);
  EXPECT_GT(s.at("fidelity").get<double>(), 1.0 - 1e-6);
  EXPECT_TRUE(fs::exists(dir / "mps_state.json"));
  fs::remove_all(dir);
}
