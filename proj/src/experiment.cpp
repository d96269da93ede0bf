#include "rz/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <new>

#include "rz/analytic.hpp"
#include "rz/coeffs.hpp"
#include "rz/ingham.hpp"
#include "rz/numeric.hpp"
#include "rz/perron.hpp"
#include "rz/report.hpp"
#include "rz/riesz.hpp"

namespace rz {

namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<Command, std::string>>& command_names() {
  static const std::vector<std::pair<Command, std::string>> names = {
      {Command::coeffs, "coeffs"},   {Command::riesz, "riesz"},
      {Command::perron, "perron"},   {Command::contour, "contour"},
      {Command::reduce, "reduce"},   {Command::growth, "growth"},
      {Command::residue, "residue"}, {Command::probe_identity, "probe-identity"}};
  return names;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out))
    fail(Errc::invalid_argument, key + ": not a finite number: '" + v + "'");
  return out;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 9.0e15)
    fail(Errc::invalid_argument, key + ": not a non-negative integer: '" + v + "'");
  return static_cast<std::uint64_t>(d);
}

int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e6) fail(Errc::invalid_argument, key + ": not an integer: '" + v + "'");
  return static_cast<int>(d);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const std::size_t comma = v.find(',', start);
    const std::string item = trim(v.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(parse_double(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

std::string file_token(const std::string& label) {
  std::string out;
  for (char ch : label) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                      ch == '.' || ch == '-' || ch == '_';
    out += keep ? ch : '_';
  }
  return out;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : command_names())
    if (cmd == c) return name;
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (const auto& [cmd, n] : command_names())
    if (n == name) return cmd;
  fail(Errc::invalid_argument, "unknown command '" + name + "'");
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = {
      "testbed", "shifts",  "k",          "xmin",         "xmax",       "x",        "grid-ratio",
      "y",       "c",       "T",          "sigma",        "epsilon",    "delta-factor",
      "left-sigma", "rel-tol", "t0",      "tmax",         "C",          "method",   "mode",
      "tau-cap", "prime-cutoff", "max-cutoff", "cache-dir", "out",        "format",   "workers"};
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '_', '-');
  if (key == "command") cfg.command = parse_command(value);
  else if (key == "testbed") cfg.testbed = value;
  else if (key == "shifts") cfg.shifts = parse_list(key, value);
  else if (key == "k") cfg.k = parse_int(key, value);
  else if (key == "xmin") cfg.xmin = parse_double(key, value);
  else if (key == "xmax") cfg.xmax = parse_double(key, value);
  else if (key == "x") cfg.x = parse_double(key, value);
  else if (key == "grid-ratio") cfg.grid_ratio = parse_double(key, value);
  else if (key == "y") cfg.y = parse_double(key, value);
  else if (key == "c") cfg.c = parse_double(key, value);
  else if (key == "T") cfg.T = parse_double(key, value);
  else if (key == "sigma") cfg.sigma = parse_double(key, value);
  else if (key == "epsilon") cfg.epsilon = parse_double(key, value);
  else if (key == "delta-factor") cfg.delta_factor = parse_double(key, value);
  else if (key == "left-sigma") cfg.left_sigma = parse_double(key, value);
  else if (key == "rel-tol") cfg.rel_tol = parse_double(key, value);
  else if (key == "t0") cfg.t0 = parse_double(key, value);
  else if (key == "tmax") cfg.tmax = parse_double(key, value);
  else if (key == "C") cfg.C = parse_double(key, value);
  else if (key == "method") cfg.method = value;
  else if (key == "mode") cfg.mode = value;
  else if (key == "tau-cap") cfg.tau_cap = parse_count(key, value);
  else if (key == "prime-cutoff") cfg.prime_cutoff = parse_count(key, value);
  else if (key == "max-cutoff") cfg.max_cutoff = parse_count(key, value);
  else if (key == "cache-dir") cfg.cache_dir = value;
  else if (key == "out") cfg.output = value;
  else if (key == "format") {
    if (value == "csv") cfg.format = Format::csv;
    else if (value == "json") cfg.format = Format::json;
    else fail(Errc::invalid_argument, "format: expected csv or json, got '" + value + "'");
  } else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_count(key, value));
  else fail(Errc::invalid_argument, "unknown setting '" + raw_key + "'");
}

void load_config_file(ExperimentConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::invalid_argument, "cannot read config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::invalid_argument, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void validate(const ExperimentConfig& cfg) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(Errc::invalid_argument, msg);
  };
  check(cfg.epsilon > 0.0 && cfg.epsilon <= 0.5, "epsilon must lie in (0, 0.5]");
  check(cfg.grid_ratio > 1.0, "grid-ratio must exceed 1");
  check(cfg.delta_factor > 0.0, "delta-factor must be positive");
  check(cfg.tau_cap >= 2, "tau-cap must be at least 2");
  check(cfg.prime_cutoff >= 2, "prime-cutoff must be at least 2");
  check(cfg.rel_tol > 0.0, "rel-tol must be positive");
  if (cfg.k) check(*cfg.k >= 0 && *cfg.k <= 12, "k must lie in [0, 12]");
  if (cfg.xmin) check(*cfg.xmin >= 1.0, "xmin must be >= 1");
  if (cfg.xmax) check(*cfg.xmax >= 1.0, "xmax must be >= 1");
  if (cfg.xmin && cfg.xmax) check(*cfg.xmin <= *cfg.xmax, "xmin must not exceed xmax");
  if (cfg.x) check(*cfg.x >= 1.0, "x must be >= 1");
  if (cfg.y) check(*cfg.y > 0.0, "y must be positive");
  if (cfg.c) check(*cfg.c > 0.0, "c must be positive");
  if (cfg.T) check(*cfg.T > 0.0, "T must be positive");
  if (cfg.t0) check(*cfg.t0 >= 10.0, "t0 must be >= 10");
  if (cfg.t0 && cfg.tmax) check(*cfg.tmax > *cfg.t0, "tmax must exceed t0");
  check(cfg.method == "auto" || cfg.method == "all" || cfg.method == "closed" ||
            cfg.method == "richardson" || cfg.method == "euler_product",
        "method must be auto, all, closed, richardson or euler_product");
  check(cfg.mode == "growth" || cfg.mode == "conversion", "mode must be growth or conversion");
  TestbedId::parse(cfg.testbed, cfg.shifts);
}

fs::path resolve_cache_dir(const ExperimentConfig& cfg) {
  if (cfg.cache_dir) return *cfg.cache_dir;
  if (const char* env = std::getenv("RZ_CACHE_DIR"); env && *env) return env;
  return ".rz-cache";
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::out_of_domain:
      return 2;
    case Errc::resource_exhausted:
    case Errc::io:
      return 4;
    default:
      return 3;
  }
}

namespace {

// Cells are numbers or strings; CSV renders numbers in shortest round-trip form.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  std::string csv() const {
    CsvTable t(columns);
    for (const auto& r : rows) {
      std::vector<std::string> cells;
      for (const auto& c : r) {
        if (c.is_number()) cells.push_back(CsvTable::cell(c.get<double>()));
        else if (c.is_boolean()) cells.push_back(c.get<bool>() ? "1" : "0");
        else if (c.is_null()) cells.push_back("nan");
        else cells.push_back(CsvTable::cell(c.get<std::string>()));
      }
      t.add_row(std::move(cells));
    }
    return t.str();
  }

  Json json() const {
    Json j;
    j["columns"] = columns;
    Json rs = Json::array();
    for (const auto& r : rows) rs.push_back(r);
    j["rows"] = rs;
    return j;
  }
};

Json num(double v) { return json_number(v); }

class Runner {
 public:
  explicit Runner(const ExperimentConfig& cfg)
      : cfg_(cfg), id_(TestbedId::parse(cfg.testbed, cfg.shifts)), cache_(resolve_cache_dir(cfg)),
        workers_(cfg.workers ? cfg.workers : default_workers()) {
    meta_["command"] = to_string(cfg.command);
    meta_["workers"] = workers_;
    meta_["cache_dir"] = cache_.string();
    meta_["cache_events"] = Json::array();
  }

  RunResult go() {
    switch (cfg_.command) {
      case Command::coeffs: coeffs(); break;
      case Command::riesz: riesz(); break;
      case Command::perron: perron(); break;
      case Command::contour: contour(); break;
      case Command::reduce: reduce(); break;
      case Command::growth: growth(); break;
      case Command::residue: residue(); break;
      case Command::probe_identity: probe(); break;
    }
    return result_;
  }

 private:
  const ExperimentConfig& cfg_;
  TestbedId id_;
  fs::path cache_;
  unsigned workers_;
  Json meta_;
  RunResult result_;
  std::shared_ptr<const TauTable> tau_;
  std::optional<LSeriesSpec> spec_;

  void cache_event(const std::string& what, const fs::path& file, const std::string& detail = "") {
    Json e;
    e["event"] = what;
    e["file"] = file.filename().string();
    if (!detail.empty()) e["detail"] = detail;
    meta_["cache_events"].push_back(e);
  }

  std::shared_ptr<const TauTable> tau() {
    if (tau_) return tau_;
    const fs::path file = cache_ / ("tau-" + std::to_string(cfg_.tau_cap) + ".rzc");
    if (fs::exists(file)) {
      try {
        std::string label;
        auto v = load_exact_table(file, &label);
        if (label == "tau" && v.size() == cfg_.tau_cap) {
          cache_event("hit", file);
          tau_ = std::make_shared<const TauTable>(std::move(v));
          return tau_;
        }
        cache_event("mismatch", file);
      } catch (const Error& e) {
        cache_event("corrupt", file, one_line(e.what()));
      }
    }
    auto v = std::make_shared<const TauTable>(tau_table(cfg_.tau_cap));
    store([&] { save_exact_table(*v, "tau", file); }, file);
    tau_ = v;
    return tau_;
  }

  template <class F>
  void store(F&& save, const fs::path& file) {
    try {
      std::error_code ec;
      fs::create_directories(cache_, ec);
      save();
      cache_event("stored", file);
    } catch (const Error& e) {
      cache_event("store_failed", file, one_line(e.what()));
    }
  }

  const LSeriesSpec& spec() {
    if (!spec_) {
      TestbedOptions o;
      o.tau_cap = cfg_.tau_cap;
      if (id_.kind == TestbedKind::rs_delta) o.tau = tau();
      spec_ = make_testbed(id_, o);
    }
    return *spec_;
  }

  std::shared_ptr<const CoeffTable> table(std::uint64_t cutoff) {
    const LSeriesSpec& s = spec();
    const fs::path file = cache_ / (file_token(s.label) + "-" + std::to_string(cutoff) + ".rzc");
    if (fs::exists(file)) {
      try {
        CoeffTable t = load_table(file);
        if (t.source_label() == s.label && t.cutoff() == cutoff) {
          cache_event("hit", file);
          return std::make_shared<const CoeffTable>(std::move(t));
        }
        cache_event("mismatch", file);
      } catch (const Error& e) {
        cache_event("corrupt", file, one_line(e.what()));
      }
    }
    auto t = std::make_shared<const CoeffTable>(
        multiplicative_sieve(s, cutoff, {workers_, cfg_.max_cutoff}));
    store([&] { save_table(*t, file); }, file);
    return t;
  }

  ResidueChoice constant() {
    if (cfg_.C) return {*cfg_.C, 0.0, "config"};
    ResidueOptions o;
    o.prime_cutoff = cfg_.prime_cutoff;
    o.workers = workers_;
    return choose_residue(spec(), o);
  }

  double c_line() const { return cfg_.c.value_or(1.0 + cfg_.epsilon); }

  std::vector<double> x_grid(double xmin, double xmax) const {
    const double hi = cfg_.xmax.value_or(xmax);
    // default lower end follows a small xmax down so a lone --xmax stays valid
    const double lo = cfg_.xmin.value_or(hi < xmin ? std::max(2.0, hi / 100) : xmin);
    return geometric_grid(lo, hi, cfg_.grid_ratio);
  }

  Json base(const std::string& kind) const {
    Json j = json_report(kind);
    j["testbed"] = id_.label();
    return j;
  }

  fs::path output_path(const char* ext) const {
    if (cfg_.output) return *cfg_.output;
    return fs::path("rz-" + to_string(cfg_.command) + ext);
  }

  void emit(Json summary, const Table* table) {
    if (cfg_.format == Format::json) {
      if (table) summary["table"] = table->json();
      const fs::path out = output_path(".json");
      write_atomic(out, summary.dump(2) + "\n");
      write_meta(out, meta_);
      result_.written = {out, meta_path(out)};
      return;
    }
    const fs::path out = output_path(".csv");
    fs::path side = out;
    if (side.extension() == ".json")
      side.replace_extension(".summary.json");
    else
      side.replace_extension(".json");
    if (table) write_atomic(out, table->csv());
    write_atomic(side, summary.dump(2) + "\n");
    write_meta(out, meta_);
    result_.written.clear();
    if (table) result_.written.push_back(out);
    result_.written.push_back(side);
    result_.written.push_back(meta_path(out));
  }

  void contract_failure(const std::string& reason) {
    result_.exit_code = 3;
    result_.reason = "error: code=contract_violation exit=3 message=\"" + one_line(reason) + "\"";
  }

  void coeffs() {
    const auto cutoff = static_cast<std::uint64_t>(std::floor(cfg_.xmax.value_or(1e4)));
    auto t = table(cutoff);
    Table tab{{"m", "a"}, {}};
    double lo = INFINITY, hi = -INFINITY;
    for (std::uint64_t m = 1; m <= t->cutoff(); ++m) {
      tab.rows.push_back({static_cast<double>(m), num(t->at(m))});
      lo = std::min(lo, t->at(m));
      hi = std::max(hi, t->at(m));
    }
    Json j = base("coeffs");
    j["label"] = t->source_label();
    j["cutoff"] = t->cutoff();
    j["nonneg"] = t->nonneg();
    j["min"] = num(lo);
    j["max"] = num(hi);
    j["partial_sum"] = num(riesz_mean(*t, static_cast<double>(cutoff), 0));
    emit(j, &tab);
  }

  void riesz() {
    const int k = cfg_.k.value_or(3);
    const auto grid = x_grid(1e3, 1e5);
    const ResidueChoice C = constant();
    auto t = table(static_cast<std::uint64_t>(std::ceil(grid.back())));
    const RieszReport r = rz::riesz_report(*t, k, grid, C.value, C.source, workers_);
    Table tab{{"x", "S_k", "main", "error"}, {}};
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      tab.rows.push_back({num(grid[i]), num(r.smoothed_sums[i]), num(r.main_terms[i]), num(r.errors[i])});
      worst = std::max(worst, std::abs(r.errors[i]));
    }
    Json j = base("riesz");
    j["k"] = k;
    j["C_used"] = num(r.C_used);
    j["C_source"] = r.C_source;
    j["C_error_estimate"] = num(C.error_estimate);
    j["fitted_exponent"] = num(r.fitted_exponent);
    j["fit_intercept"] = num(r.fit_intercept);
    j["fit_ok"] = r.fit_ok;
    j["fit_note"] = r.fit_note;
    j["max_abs_error"] = num(worst);
    j["monotone"] = r.monotone;
    j["points"] = grid.size();
    emit(j, &tab);
  }

  void perron() {
    const std::vector<double> ys = cfg_.y ? std::vector<double>{*cfg_.y} : std::vector<double>{0.5, 2.0, 10.0};
    const std::vector<int> ks = cfg_.k ? std::vector<int>{*cfg_.k} : std::vector<int>{1, 2, 3, 4};
    const double T0 = cfg_.T.value_or(100.0);
    std::vector<double> Tg;
    for (int j = 0; j <= 5; ++j) Tg.push_back(T0 * std::ldexp(1.0, j));
    const auto cells = truncation_scan(ys, ks, c_line(), Tg, workers_);
    Table tab{{"y", "k", "T", "abs_error"}, {}};
    Json jc = Json::array();
    bool all_ok = true;
    for (const auto& cell : cells) {
      for (std::size_t i = 0; i < cell.T.size(); ++i)
        tab.rows.push_back({num(cell.y), cell.k, num(cell.T[i]), num(cell.abs_error[i])});
      Json e;
      e["y"] = num(cell.y);
      e["k"] = cell.k;
      e["slope"] = num(cell.slope);
      e["intercept"] = num(cell.intercept);
      e["residual"] = num(cell.residual);
      e["points_used"] = cell.points_used;
      e["saturated"] = cell.saturated;
      e["in_contract"] = cell.in_contract;
      if (!cell.saturated && !cell.in_contract) all_ok = false;
      jc.push_back(e);
    }
    Json j = base("perron");
    j["c"] = num(c_line());
    j["T_grid"] = json_array(Tg);
    j["cells"] = jc;
    j["all_in_contract"] = all_ok;
    emit(j, &tab);
  }

  void contour() {
    ContourParams p;
    p.x = cfg_.x.value_or(50.0);
    p.k = cfg_.k.value_or(2);
    p.c = c_line();
    p.T = cfg_.T.value_or(p.x / 10.0);
    p.left_sigma = cfg_.left_sigma;
    p.rel_tol = cfg_.rel_tol;
    const ContourReport r = contour_residue_check(spec(), p);
    Table tab{{"x", "k", "c", "T", "left_sigma", "right_edge_re", "right_edge_im", "total_re", "total_im",
               "residue_main", "other_residues_re", "rel_error", "quad_error_estimate", "passed"},
              {}};
    tab.rows.push_back({num(r.x), r.k, num(r.c), num(r.T), num(r.left_sigma), num(r.integral_value.real()),
                        num(r.integral_value.imag()), num(r.total.real()), num(r.total.imag()),
                        num(r.residue_main), num(r.other_residues.real()), num(r.rel_error),
                        num(r.quad_error_estimate), r.passed});
    auto cj = [](cplx z) { return Json::array({num(z.real()), num(z.imag())}); };
    Json j = base("contour");
    j["x"] = num(r.x);
    j["k"] = r.k;
    j["c"] = num(r.c);
    j["T"] = num(r.T);
    j["left_sigma"] = num(r.left_sigma);
    j["integral_value"] = cj(r.integral_value);
    j["top"] = cj(r.horizontal_contrib.first);
    j["bottom"] = cj(r.horizontal_contrib.second);
    j["left"] = cj(r.left_contrib);
    j["total"] = cj(r.total);
    j["residue_constant"] = num(r.residue_constant);
    j["residue_source"] = r.residue_source;
    j["residue_main"] = num(r.residue_main);
    j["other_residues"] = cj(r.other_residues);
    j["other_pole_count"] = r.other_pole_count;
    j["quad_error_estimate"] = num(r.quad_error_estimate);
    j["rel_error"] = num(r.rel_error);
    j["rel_tol"] = num(p.rel_tol);
    j["passed"] = r.passed;
    emit(j, &tab);
    if (!r.passed)
      contract_failure("contour: relative error " + format_double(r.rel_error) + " exceeds " +
                       format_double(p.rel_tol));
  }

  void reduce() {
    const int k1 = cfg_.k.value_or(3);
    const auto grid = x_grid(1e3, 1e5);
    ChainOptions o;
    o.delta_factor = cfg_.delta_factor;
    o.workers = workers_;
    double extent = 0.0;
    for (double x : grid) extent = std::max(extent, chain_extent(x, k1, o));
    const ResidueChoice C = constant();
    auto t = table(static_cast<std::uint64_t>(std::ceil(extent)));
    const ReductionTrace tr = chain_reduce(*t, k1, C.value, grid, o);
    Table tab{{"k", "x", "lower", "upper", "midpoint", "predicted_cascade", "predicted_residue", "direct"}, {}};
    Json lv = Json::array();
    for (const auto& l : tr.levels) {
      for (std::size_t i = 0; i < l.x.size(); ++i)
        tab.rows.push_back({l.k, num(l.x[i]), num(l.lower[i]), num(l.upper[i]),
                            num(0.5 * (l.lower[i] + l.upper[i])), num(l.predicted_cascade * l.x[i]),
                            num(l.predicted_residue * l.x[i]), num(l.direct[i])});
      Json e;
      e["k"] = l.k;
      e["c_est"] = num(l.c_est);
      e["delta_used"] = l.delta_used;
      e["sandwich_width_at_ref_x"] = num(l.sandwich_width_at_ref_x);
      e["identity_discrepancy_at_ref_x"] = num(l.identity_discrepancy_at_ref_x);
      e["direct_coefficient"] = num(l.direct_coefficient);
      e["cascade_c_est"] = num(l.cascade_c_est);
      e["predicted_cascade"] = num(l.predicted_cascade);
      e["predicted_residue"] = num(l.predicted_residue);
      e["width_exponent"] = num(l.width_exponent);
      e["inverted"] = l.inverted;
      e["bracketed"] = l.bracketed;
      lv.push_back(e);
    }
    Json j = base("reduce");
    j["k1"] = k1;
    j["C"] = num(tr.C);
    j["C_source"] = C.source;
    j["reference_x"] = num(tr.reference_x);
    j["levels"] = lv;
    j["level0_coefficient"] = num(tr.level0_coefficient);
    j["level0_cascade_coefficient"] = num(tr.level0_cascade_coefficient);
    j["direct_partial_sum_coefficient"] = num(tr.direct_partial_sum_coefficient);
    j["cascade_alternative"] = num(tr.cascade_alternative);
    j["relative_gap_level0_vs_direct"] =
        num((tr.level0_coefficient - tr.direct_partial_sum_coefficient) / tr.direct_partial_sum_coefficient);
    const double d_res = std::abs(tr.level0_coefficient - tr.C);
    const double d_alt = std::abs(tr.level0_coefficient - tr.cascade_alternative);
    j["level0_closer_to"] = d_res <= d_alt ? "residue" : "cascade_alternative";
    emit(j, &tab);
  }

  void growth() {
    const bool conv = cfg_.mode == "conversion";
    const double t0 = cfg_.t0.value_or(conv ? 100.0 : 10.0);
    const double tmax = cfg_.tmax.value_or(conv ? 1000.0 : t0 * 256.0);
    require(tmax > t0, "tmax must exceed t0");
    const int windows = std::max(1, static_cast<int>(std::ceil(std::log2(tmax / t0) - 1e-9)));
    const auto grid = log_uniform_grid(t0, 2.0, windows, 16);
    Table tab{{"t", "abs_value", "window_max", "log_t", "log_max"}, {}};
    Json j = base(conv ? "conversion" : "growth");
    j["sigma"] = num(cfg_.sigma);
    if (conv) {
      const ConversionFit f = conversion_exponent_check(spec(), cfg_.sigma, grid, workers_);
      for (std::size_t i = 0; i < f.t_used.size(); ++i)
        tab.rows.push_back({num(f.t_used[i]), num(f.chi_abs[i]), num(f.chi_abs[i]), num(std::log(f.t_used[i])),
                            num(std::log(f.chi_abs[i]))});
      j["slope"] = num(f.exponent);
      j["intercept"] = num(f.intercept);
      j["residual"] = num(f.residual);
      j["reference"] = num(f.expected);
      j["relative_deviation"] = num(f.expected != 0.0 ? (f.exponent - f.expected) / f.expected : f.exponent);
      j["t_dropped"] = json_array(f.t_dropped);
    } else {
      GrowthOptions o;
      o.epsilon = cfg_.epsilon;
      o.workers = workers_;
      const GrowthFit f = growth_scan(spec(), cfg_.sigma, grid, o);
      for (std::size_t i = 0; i < grid.size(); ++i)
        tab.rows.push_back({num(grid[i]), num(f.abs_values[i]), num(f.window_max[i]), num(std::log(grid[i])),
                            num(std::log(f.window_max[i]))});
      j["slope"] = num(f.measured_exponent);
      j["intercept"] = num(f.intercept);
      j["residual"] = num(f.residual);
      j["reference"] = num(f.reference_exponent);
      j["epsilon"] = num(f.epsilon_used);
      j["windows"] = f.windows.size();
    }
    j["t0"] = num(t0);
    j["tmax"] = num(grid.back());
    emit(j, &tab);
  }

  void residue() {
    ResidueOptions o;
    o.prime_cutoff = cfg_.prime_cutoff;
    o.workers = workers_;
    Table tab{{"method", "value", "error_estimate", "status"}, {}};
    Json j = base("residue");
    j["pole_order_at_1"] = spec().pole_order_at_1;
    if (cfg_.method == "auto") {
      const ResidueChoice c = choose_residue(spec(), o);
      tab.rows.push_back({c.source, num(c.value), num(c.error_estimate), "ok"});
      j["value"] = num(c.value);
      j["error_estimate"] = num(c.error_estimate);
      j["source"] = c.source;
      emit(j, &tab);
      return;
    }
    std::vector<ResidueMethod> methods;
    if (cfg_.method == "all")
      methods = {ResidueMethod::closed, ResidueMethod::richardson, ResidueMethod::euler_product};
    else if (cfg_.method == "closed") methods = {ResidueMethod::closed};
    else if (cfg_.method == "richardson") methods = {ResidueMethod::richardson};
    else methods = {ResidueMethod::euler_product};
    Json ms = Json::array();
    std::vector<double> values;
    for (ResidueMethod m : methods) {
      Json e;
      e["method"] = to_string(m);
      try {
        const ResidueResult r = residue_at_1(spec(), m, o);
        e["value"] = num(r.value);
        e["error_estimate"] = num(r.error_estimate);
        if (m == ResidueMethod::euler_product) e["primes_used"] = r.primes_used;
        e["status"] = "ok";
        values.push_back(r.value);
        tab.rows.push_back({to_string(m), num(r.value), num(r.error_estimate), "ok"});
      } catch (const Error& err) {
        if (methods.size() == 1 || err.code() == Errc::pole_order) throw;
        e["status"] = std::string(errc_name(err.code()));
        e["message"] = one_line(err.what());
        tab.rows.push_back({to_string(m), nullptr, nullptr, std::string(errc_name(err.code()))});
      }
      ms.push_back(e);
    }
    double spread = 0.0;
    for (double a : values)
      for (double b : values) spread = std::max(spread, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    j["methods"] = ms;
    j["max_pairwise_relative_spread"] = num(spread);
    j["agree_within_1pct"] = spread <= 0.01;
    emit(j, &tab);
  }

  void probe() {
    const int k = cfg_.k.value_or(2);
    const auto grid = x_grid(100.0, 1e5);
    auto t = table(static_cast<std::uint64_t>(std::ceil(grid.back())));
    Table tab{{"x", "lhs", "rhs", "gap", "gap_over_x"}, {}};
    std::vector<IdentityProbe> probes(grid.size());
    parallel_chunks(grid.size(), workers_, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) probes[i] = identity_probe(*t, grid[i], k);
    });
    std::vector<double> ratio;
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& p = probes[i];
      ratio.push_back(p.gap / grid[i]);
      worst = std::max(worst, std::abs(p.gap));
      tab.rows.push_back({num(grid[i]), num(p.lhs), num(p.rhs), num(p.gap), num(ratio.back())});
    }
    Json j = base("probe-identity");
    j["k"] = k;
    j["max_abs_gap"] = num(worst);
    j["gap_over_x"] = json_array(ratio);
    j["gap_over_x_last"] = num(ratio.back());
    j["gap_over_x_last_change"] = num(ratio.size() >= 2 ? ratio.back() - ratio[ratio.size() - 2] : 0.0);
    emit(j, &tab);
  }
};

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
  auto failure = [](Errc code, const std::string& msg) {
    RunResult r;
    r.exit_code = exit_code_for(code);
    r.reason = "error: code=" + std::string(errc_name(code)) + " exit=" + std::to_string(r.exit_code) +
               " message=\"" + one_line(msg) + "\"";
    return r;
  };
  try {
    validate(cfg);
    Runner runner(cfg);
    return runner.go();
  } catch (const Error& e) {
    return failure(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return failure(Errc::resource_exhausted, "out of memory");
  } catch (const fs::filesystem_error& e) {
    return failure(Errc::io, e.what());
  }
}

}  // namespace rz
