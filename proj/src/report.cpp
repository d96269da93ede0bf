#include "rz/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "rz/error.hpp"
#include "rz/numeric.hpp"

namespace rz {

std::string report_schema_version() { return "riesz-report/1"; }

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  require(!columns_.empty(), "CsvTable: no columns");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  require(cells.size() == columns_.size(), "CsvTable: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::cell(double v) { return format_double(v); }
std::string CsvTable::cell(long long v) { return std::to_string(v); }

std::string CsvTable::cell(std::string_view v) {
  if (v.find_first_of(",\"\n") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string CsvTable::str() const {
  std::string out = "# schema: " + report_schema_version() + "\n";
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

Json json_report(std::string_view kind) {
  Json j;
  j["schema"] = report_schema_version();
  j["report"] = std::string(kind);
  return j;
}

Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json json_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(Errc::io, "cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) fail(Errc::io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(Errc::io, "cannot rename onto " + path.string());
  }
}

std::filesystem::path meta_path(const std::filesystem::path& report) {
  std::filesystem::path p = report;
  p += ".meta.json";
  return p;
}

void write_meta(const std::filesystem::path& report, Json meta) {
  using namespace std::chrono;
  Json j;
  j["schema"] = report_schema_version();
  j["report_file"] = report.filename().string();
  j["written_at_unix_ms"] =
      duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
  for (auto& [k, v] : meta.items()) j[k] = v;
  write_atomic(meta_path(report), j.dump(2) + "\n");
}

}  // namespace rz
