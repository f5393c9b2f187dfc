#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agsp/chain_model.hpp"
#include "agsp/types.hpp"

namespace agsp::cli {

enum class Command { spectrum, agsp_verify, robustness, truncation_decay, area_law, mps_approx, ground_energy, er_growth };

std::string command_name(Command c);
std::optional<Command> parse_command(const std::string& name);
const std::vector<std::string>& command_names();

/// Bad flag, missing input or schema violation; the message names the cause.
class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// --help was requested; what() is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Command command = Command::spectrum;
  /// Chain document in the chain_from_json layout. A standard model is a
  /// document without terms.
  nlohmann::json chain;
  /// Command parameters, validated against the command's schema.
  nlohmann::json params = nlohmann::json::object();
  std::string output = "reports";
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Throws UsageError on the first problem and HelpRequested for --help.
/// `args` excludes the program name.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Throws UsageError when `params` has unknown keys or wrongly typed values.
void validate_params(Command command, const nlohmann::json& params);

std::string usage();

ChainSpec resolve_chain(const ExperimentConfig& config);

/// Exit codes of run().
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitChecksFailed = 2;

struct RunOutcome {
  int exit_code = kExitError;
  nlohmann::json summary;
};

/// Runs the experiment and writes its reports; never throws.
RunOutcome execute(const ExperimentConfig& config);

/// execute() plus the one-line JSON summary on `out` and errors on `err`.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Full front end: parse, run, report.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

/// "start:stop:step", stop inclusive up to rounding, or a comma list.
std::vector<double> parse_grid(const std::string& text);

}  // namespace agsp::cli
