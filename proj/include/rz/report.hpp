#pragma once

// Report emission. Bodies are pure functions of the computed data; anything
// run-dependent (timestamps, worker counts, cache hits) goes to the sidecar.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace rz {

using Json = nlohmann::ordered_json;

/// Frozen identifier embedded in every report.
std::string report_schema_version();

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  /// Cells are preformatted; use cell() for numbers.
  void add_row(std::vector<std::string> cells);
  static std::string cell(double v);
  static std::string cell(long long v);
  static std::string cell(std::string_view v);

  std::size_t rows() const { return rows_.size(); }
  /// "# schema: ..." line, header, rows; '\n' line endings.
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Object whose first key is "schema".
Json json_report(std::string_view kind);

/// Shortest round-trip text for doubles; non-finite values become null.
Json json_number(double v);
Json json_array(const std::vector<double>& v);

/// Writes to a temporary file in the same directory and renames it over path.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// path + ".meta.json": run-dependent metadata.
std::filesystem::path meta_path(const std::filesystem::path& report);
void write_meta(const std::filesystem::path& report, Json meta);

}  // namespace rz
