#pragma once

// Analytic evaluation of shifted-zeta products, residues at s = 1, and
// vertical-line growth measurements.

#include <string>
#include <vector>

#include "rz/coeffs.hpp"
#include "rz/zeta.hpp"

namespace rz {

/// L(s) = prod_i zeta(s - lambda_i). Needs spec.shifts.
EvalResult lfun_eval(const LSeriesSpec& spec, cplx s);

/// True when L can be evaluated anywhere (zeta-product family).
inline bool analytic_evaluable(const LSeriesSpec& spec) { return spec.shifts.has_value(); }

enum class ResidueMethod { closed, richardson, euler_product };

std::string to_string(ResidueMethod m);

struct ResidueOptions {
  double h0 = 1.0 / 16.0;
  int levels = 7;
  double rel_tol = 1e-6;                    // Richardson settling tolerance
  std::uint64_t prime_cutoff = 1'000'000;   // Euler product P
  unsigned workers = 0;
};

struct ResidueResult {
  double value = 0.0;
  double error_estimate = 0.0;
  ResidueMethod method = ResidueMethod::closed;
  std::uint64_t primes_used = 0;  // Euler product only
};

/// C = lim_{s -> 1} (s - 1) L(s). Requires a simple pole.
ResidueResult residue_at_1(const LSeriesSpec& spec, ResidueMethod method,
                           const ResidueOptions& opts = {});

struct ResidueChoice {
  double value = 0.0;
  double error_estimate = 0.0;
  std::string source;  // "residue_hint" or a method name
};

/// Residue constant by precedence: residue_hint, closed, Euler product, Richardson.
ResidueChoice choose_residue(const LSeriesSpec& spec, const ResidueOptions& opts = {});

/// Value of an entire Dirichlet series at s from its coefficient table,
/// sum_{n <= X} c(n) n^{-s} (1 - n/X)^k; error O(X^{-1}) for entire L of
/// moderate degree.
double smoothed_dirichlet_value(const CoeffTable& t, double s, int k = 3);

struct GrowthWindow {
  double t_lo = 0.0, t_hi = 0.0;
  double t_at_max = 0.0;
  double max_abs = 0.0;
};

struct GrowthFit {
  double sigma = 0.0;
  std::vector<double> t_grid;
  std::vector<double> abs_values;
  std::vector<double> window_max;  // per grid point: max of its window
  std::vector<GrowthWindow> windows;
  double measured_exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  double reference_exponent = 0.0;
  double epsilon_used = 0.0;
};

struct GrowthOptions {
  double epsilon = 0.05;
  double window_ratio = 2.0;  // dyadic windows
  int min_windows = 8;
  unsigned workers = 0;
};

/// Slope of log(window max |L(sigma + it)|) against log t.
GrowthFit growth_scan(const LSeriesSpec& spec, double sigma, const std::vector<double>& t_grid,
                      const GrowthOptions& opts = {});

struct ConversionFit {
  double sigma = 0.0;
  std::vector<double> t_used;
  std::vector<double> chi_abs;
  std::vector<double> t_dropped;   // denominator near a zero
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  double expected = 0.0;           // degree * (1/2 - sigma)
};

/// Fits |chi(sigma+it)| = |L(sigma+it)| / |L(1-sigma-it)| against t.
ConversionFit conversion_exponent_check(const LSeriesSpec& spec, double sigma,
                                        const std::vector<double>& t_grid, unsigned workers = 0);

/// Geometric grid a, a r, a r^2, ... <= b (b included when it lands within rounding).
std::vector<double> geometric_grid(double a, double b, double ratio);

/// n points per window of ratio r, log-uniform, starting at a, covering `windows` windows.
std::vector<double> log_uniform_grid(double a, double ratio, int windows, int per_window);

}  // namespace rz
