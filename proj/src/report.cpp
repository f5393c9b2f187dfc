#include "agsp/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "agsp/types.hpp"

namespace agsp {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

namespace {

void check_finite(const nlohmann::json& j, const std::string& path) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) throw InvalidArgument("non-finite number at " + path);
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) check_finite(v, path + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) check_finite(j[i], path + "[" + std::to_string(i) + "]");
  }
}

}  // namespace

void require_finite(const nlohmann::json& j, const std::string& where) { check_finite(j, where); }

std::string format_number(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("format_number: non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw InvalidArgument("CsvTable: empty header");
}

void CsvTable::add_row(const std::vector<double>& cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("CsvTable: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!std::isfinite(cells[i])) throw InvalidArgument("CsvTable: non-finite value in column " + header_[i]);
  rows_.push_back(cells);
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += '\n';
  }
  return out;
}

ReportFile json_report(const std::string& name, const nlohmann::json& j) {
  require_finite(j, name);
  return {name, j.dump(2) + "\n"};
}

nlohmann::json ScanSidecar::to_json() const {
  nlohmann::json j = {{"fixture", fixture}, {"pass", pass}, {"seeds", seeds}};
  if (fit)
    j["fit"] = {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r2", fit->r2}, {"points", fit->points}};
  else
    j["fit"] = nullptr;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

nlohmann::json Manifest::to_json() const {
  return {{"files", files}, {"seeds", seeds}, {"config_hash", config_hash}};
}

Manifest emit_report(const std::vector<ReportFile>& files, const fs::path& output, const nlohmann::json& config,
                     const std::vector<std::uint64_t>& seeds) {
  for (const auto& f : files)
    if (f.name.empty() || f.name == "manifest.json") throw InvalidArgument("emit_report: invalid file name");
  Manifest m;
  m.seeds = seeds;
  m.config_hash = fnv1a_hex(config.dump());
  for (const auto& f : files) {
    write_atomic(output / f.name, f.content);
    m.files.push_back(f.name);
  }
  write_atomic(output / "manifest.json", m.to_json().dump(2) + "\n");
  return m;
}

}  // namespace agsp
