#pragma once

// Small numerical toolkit shared by the modules: deterministic summation,
// chunked parallel loops, Gauss-Legendre panels, adaptive Simpson, line fits
// and the complex log-gamma function.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rz {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Pairwise (tree) summation. The split points depend only on the length,
/// so the result is reproducible bit for bit.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

/// Worker count used when a caller passes 0.
unsigned default_workers();

/// Runs body(begin, end) over [0, n) split into at most `workers` contiguous
/// chunks. Each chunk must write only to its own slots.
void parallel_chunks(std::size_t n, unsigned workers,
                     const std::function<void(std::size_t, std::size_t)>& body);

/// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
  static const std::array<double, 16>& nodes();
  static const std::array<double, 16>& weights();
};

/// Integral of f over [a, b] with one 16-point Gauss-Legendre panel.
double gl16(const std::function<double(double)>& f, double a, double b);
cplx gl16(const std::function<cplx(double)>& f, double a, double b);

/// Adaptive Simpson quadrature to a relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, int max_depth = 48);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual
  std::size_t points = 0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Principal branch of log Gamma(z) for complex z away from the poles.
cplx log_gamma(cplx z);

/// Bernoulli numbers B_{2j}, j = 0..20.
double bernoulli_even(int j);

/// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double v);

}  // namespace rz
