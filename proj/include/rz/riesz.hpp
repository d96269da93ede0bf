#pragma once

#include <string>
#include <vector>

#include "rz/coeffs.hpp"

namespace rz {

/// k! as a double.
double factorial(int k);

/// S_k(x) = sum_{m <= x} a(m)/k! (1 - m/x)^k, direct pairwise summation.
/// k = 0 is the plain partial sum.
double riesz_mean(const CoeffTable& t, double x, int k);

/// C x / (k+1)!.
double main_term(double C, double x, int k);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log|error| against log x, ignoring |error| < 1e-13.
ExponentFit exponent_fit(const std::vector<double>& x_grid, const std::vector<double>& errors);

enum class Threshold { current, previous };

/// current: floor(n^2/2) + 1; previous: n^2 (n+1)/2 + n.
int k_threshold(int n, Threshold which);

struct RieszReport {
  int k = 0;
  std::vector<double> x_grid;
  std::vector<double> smoothed_sums;
  std::vector<double> main_terms;
  std::vector<double> errors;
  double fitted_exponent = 0.0;
  double fit_intercept = 0.0;
  bool fit_ok = false;
  std::string fit_note;
  double C_used = 0.0;
  std::string C_source;
  bool monotone = true;  // S_k >= 0 and non-decreasing along the grid
};

RieszReport riesz_report(const CoeffTable& t, int k, const std::vector<double>& x_grid, double C,
                         std::string C_source, unsigned workers = 0);

}  // namespace rz
