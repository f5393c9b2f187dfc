#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agsp/fit.hpp"

namespace agsp {

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Throws InvalidArgument naming the first NaN or infinite number in `j`.
void require_finite(const nlohmann::json& j, const std::string& where);

/// Shortest round-trip decimal form of a finite double.
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Cells are numbers; non-finite values are rejected.
  void add_row(const std::vector<double>& cells);

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// JSON sidecar that accompanies each scan CSV.
struct ScanSidecar {
  std::string fixture;
  std::optional<LinearFit> fit;
  bool pass = false;
  std::vector<std::uint64_t> seeds;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
};

struct ReportFile {
  std::string name;  // relative to the output directory
  std::string content;
};

struct Manifest {
  std::vector<std::string> files;
  std::vector<std::uint64_t> seeds;
  std::string config_hash;

  nlohmann::json to_json() const;
};

/// Pretty-printed JSON file; throws on non-finite numbers, which the
/// serializer would otherwise turn into null.
ReportFile json_report(const std::string& name, const nlohmann::json& j);

/// Writes every file, then manifest.json, through one sequential writer.
Manifest emit_report(const std::vector<ReportFile>& files, const std::filesystem::path& output,
                     const nlohmann::json& config, const std::vector<std::uint64_t>& seeds);

}  // namespace agsp
