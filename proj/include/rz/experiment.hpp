#pragma once

// Configuration-driven runner behind the rz command-line tool.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rz/error.hpp"
#include "rz/testbeds.hpp"

namespace rz {

enum class Command { coeffs, riesz, perron, contour, reduce, growth, residue, probe_identity };
enum class Format { csv, json };

std::string to_string(Command c);
Command parse_command(const std::string& name);

/// Every numeric field is optional so that defaults can depend on the command;
/// effective values are resolved by the run.
struct ExperimentConfig {
  Command command = Command::riesz;
  std::string testbed = "zeta";
  std::vector<double> shifts;  // imaginary parts of the shifts, eisenstein kinds

  std::optional<int> k;
  std::optional<double> xmin, xmax, x;
  double grid_ratio = 1.4142135623730951;
  std::optional<double> y;
  std::optional<double> c, T;
  double sigma = 0.5;
  double epsilon = 0.05;
  double delta_factor = 2.0;
  double left_sigma = 0.1;
  double rel_tol = 1e-3;  // contour pass tolerance
  std::optional<double> t0, tmax;
  std::optional<double> C;  // overrides the residue constant
  std::string method = "auto";     // residue: auto | all | closed | richardson | euler_product
  std::string mode = "growth";     // growth: growth | conversion
  std::uint64_t tau_cap = 20'000;
  std::uint64_t prime_cutoff = 1'000'000;
  std::uint64_t max_cutoff = 10'000'000;

  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> output;
  Format format = Format::csv;
  unsigned workers = 0;
};

/// Applies one key=value setting; keys use the long flag names without dashes.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Known setting keys, in flag order.
const std::vector<std::string>& setting_keys();

/// Reads a key=value file ('#' comments, blank lines ignored) into cfg.
void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

/// Range checks that need no computation. Throws Error(invalid_argument).
void validate(const ExperimentConfig& cfg);

/// --cache-dir, else $RZ_CACHE_DIR, else ./.rz-cache.
std::filesystem::path resolve_cache_dir(const ExperimentConfig& cfg);

/// 0 success, 2 validation, 3 numerical contract, 4 resource limits.
int exit_code_for(Errc code);

struct RunResult {
  int exit_code = 0;
  std::string reason;  // one line, empty on success
  std::vector<std::filesystem::path> written;
};

RunResult run(const ExperimentConfig& cfg);

}  // namespace rz
