#pragma once

// The truncated Perron kernel (1/2 pi i) int_{c-iT}^{c+iT} y^s / (s(s+1)...(s+k)) ds,
// its T -> infinity limit, and the rectangle-contour check of the smoothed
// sum integrand L(s) x^s / (s(s+1)...(s+k)).

#include <string>
#include <utility>
#include <vector>

#include "rz/analytic.hpp"
#include "rz/coeffs.hpp"

namespace rz {

struct KernelParams {
  double y = 1.0;
  int k = 1;
  double c = 1.05;
  double T = 100.0;
};

/// (1/k!)(1 - 1/y)^k for y >= 1, 0 for 0 < y <= 1. Rejects k = 0.
double kernel_closed(double y, int k);

/// 1 / (s (s+1) ... (s+k)).
cplx perron_weight(cplx s, int k);

/// Fewest panels kernel_quad accepts: every panel spans at most pi/4 of the
/// phase T log y and at most half its distance to the kernel pole at s = 0.
int required_panels(const KernelParams& p);

/// Composite 16-point Gauss-Legendre along the segment, `panels` panels.
cplx kernel_quad(const KernelParams& p, int panels, unsigned workers = 1);

struct TruncationCell {
  double y = 0.0;
  int k = 0;
  std::vector<double> T;
  std::vector<double> abs_error;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::size_t points_used = 0;
  bool saturated = false;
  bool in_contract = false;  // slope within [-k - 0.5, -k + 0.5]
};

inline constexpr double kTruncationFloor = 1e-14;

/// For each (y, k): slope of log|kernel_quad - kernel_closed| against log T.
std::vector<TruncationCell> truncation_scan(const std::vector<double>& ys, const std::vector<int>& ks,
                                            double c, const std::vector<double>& T_grid,
                                            unsigned workers = 0);

struct ContourParams {
  double x = 50.0;
  int k = 2;
  double c = 1.05;
  double T = 5.0;
  double left_sigma = 0.1;
  double rel_tol = 1e-6;
};

struct ContourReport {
  double x = 0.0;
  int k = 0;
  double c = 0.0;
  double T = 0.0;
  double left_sigma = 0.0;
  cplx integral_value;   // right edge: the truncated Perron integral
  double residue_main = 0.0;  // C x / (k+1)!
  std::string residue_source;
  double residue_constant = 0.0;
  std::pair<cplx, cplx> horizontal_contrib;  // top (c+iT -> left+iT), bottom (left-iT -> c-iT)
  cplx left_contrib;                         // left+iT -> left-iT
  cplx other_residues;  // enclosed poles other than s = 1 (shifted poles, kernel poles)
  int other_pole_count = 0;
  cplx total;           // sum of the four edges
  double quad_error_estimate = 0.0;
  double rel_error = 0.0;  // |total - residue_main - other_residues| / |residue_main|
  bool passed = false;
};

ContourReport contour_residue_check(const LSeriesSpec& spec, const ContourParams& p);

}  // namespace rz
