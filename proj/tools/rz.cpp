// rz: command-line front end. Settings come from an optional key=value file
// (--config) and are then overridden by flags.

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "rz/experiment.hpp"
#include "rz/report.hpp"

namespace {

struct Help {
  const char* key;
  const char* text;
};

// One line per setting key; every subcommand accepts all of them.
const Help kHelp[] = {
    {"testbed", "zeta | zeta2 | eisenstein | rs_delta | rs_eisenstein"},
    {"shifts", "comma-separated imaginary parts of the shifts (eisenstein kinds)"},
    {"k", "Riesz order; perron scans 1..4 when omitted"},
    {"xmin", "smallest grid point"},
    {"xmax", "largest grid point (coeffs: table cutoff)"},
    {"x", "contour: evaluation point (default 50)"},
    {"grid-ratio", "geometric grid ratio (default sqrt 2)"},
    {"y", "perron: single y (default 1/2, 2, 10)"},
    {"c", "abscissa of the vertical line (default 1 + epsilon)"},
    {"T", "contour: height (default x/10); perron: first T of the doubling grid (default 100)"},
    {"sigma", "growth: real part of the vertical line"},
    {"epsilon", "small positive constant in (0, 0.5] (default 0.05)"},
    {"delta-factor", "reduce: delta = factor * x / sqrt(E(x)) (default 2)"},
    {"left-sigma", "contour: abscissa of the left edge (default 0.1)"},
    {"rel-tol", "contour: pass tolerance (default 1e-3)"},
    {"t0", "growth: first t (default 10; conversion 100)"},
    {"tmax", "growth: last t (default 256 t0; conversion 1000)"},
    {"C", "override the residue constant"},
    {"method", "residue: auto | all | closed | richardson | euler_product"},
    {"mode", "growth: growth | conversion"},
    {"tau-cap", "largest n with tau(n) computed (default 20000)"},
    {"prime-cutoff", "Euler-product prime cutoff (default 1e6)"},
    {"max-cutoff", "largest coefficient table allowed (default 1e7)"},
    {"cache-dir", "coefficient cache directory (default $RZ_CACHE_DIR, else .rz-cache)"},
    {"out", "report path (default rz-<command>.csv or .json)"},
    {"format", "csv | json (default csv)"},
    {"workers", "worker threads (default: available cores)"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riesz means of Dirichlet coefficient sums: experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rz::report_schema_version());

  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  const std::vector<std::pair<rz::Command, const char*>> subs = {
      {rz::Command::coeffs, "tabulate Dirichlet coefficients"},
      {rz::Command::riesz, "Riesz means against the main term"},
      {rz::Command::perron, "Perron kernel truncation-error scan"},
      {rz::Command::contour, "contour integral against the residue"},
      {rz::Command::reduce, "reduction chain from the Riesz mean to partial sums"},
      {rz::Command::growth, "vertical growth or conversion-factor exponent"},
      {rz::Command::residue, "residue at s = 1"},
      {rz::Command::probe_identity, "measure the averaging identity gap"},
  };
  std::map<CLI::App*, rz::Command> sub_of;
  for (const auto& [cmd, desc] : subs) {
    CLI::App* sub = app.add_subcommand(rz::to_string(cmd), desc);
    sub_of[sub] = cmd;
    sub->add_option("--config", config_file, "key = value settings file; flags take precedence");
    for (const Help& h : kHelp) {
      const std::string key = h.key;
      options[rz::to_string(cmd) + "/" + key] = sub->add_option("--" + key, values[key], h.text);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "error: code=invalid_argument exit=2 message=\"" << e.what() << "\"\n";
    return 2;
  }

  rz::ExperimentConfig cfg;
  try {
    CLI::App* used = app.get_subcommands().front();
    cfg.command = sub_of.at(used);
    if (!config_file.empty()) rz::load_config_file(cfg, config_file);
    cfg.command = sub_of.at(used);
    for (const Help& h : kHelp) {
      if (options.at(used->get_name() + "/" + h.key)->count() > 0) rz::apply_setting(cfg, h.key, values[h.key]);
    }
  } catch (const rz::Error& e) {
    std::cerr << "error: code=" << rz::errc_name(e.code()) << " exit=2 message=\"" << e.what() << "\"\n";
    return 2;
  }

  const rz::RunResult r = rz::run(cfg);
  for (const auto& p : r.written) std::cout << p.string() << "\n";
  if (r.exit_code != 0) std::cerr << r.reason << "\n";
  return r.exit_code;
}
