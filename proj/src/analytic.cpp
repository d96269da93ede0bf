#include "rz/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "rz/error.hpp"

namespace rz {

EvalResult lfun_eval(const LSeriesSpec& spec, cplx s) {
  if (!spec.shifts) fail(Errc::invalid_argument, spec.label + ": no analytic evaluator (shifts absent)");
  cplx value = 1.0;
  double rel_err = 0.0;
  for (const cplx& l : *spec.shifts) {
    if (std::abs(s - 1.0 - l) < 1e-8)
      fail(Errc::pole_collision, spec.label + ": s within 1e-8 of the pole at 1 + lambda");
    EvalResult z = zeta_em(s - l);
    value *= z.value;
    const double mag = std::abs(z.value);
    rel_err += mag > 0.0 ? z.abs_error_estimate / mag : z.abs_error_estimate;
  }
  return {value, std::abs(value) * rel_err};
}

std::string to_string(ResidueMethod m) {
  switch (m) {
    case ResidueMethod::closed: return "closed";
    case ResidueMethod::richardson: return "richardson";
    case ResidueMethod::euler_product: return "euler_product";
  }
  return "unknown";
}

double smoothed_dirichlet_value(const CoeffTable& t, double s, int k) {
  const std::uint64_t x = t.cutoff();
  const double X = static_cast<double>(x);
  std::vector<double> terms(x);
  for (std::uint64_t n = 1; n <= x; ++n) {
    const double w = (X - static_cast<double>(n)) / X;
    terms[n - 1] = t.at(n) * std::pow(static_cast<double>(n), -s) * std::pow(w, k);
  }
  return pairwise_sum(terms);
}

namespace {

ResidueResult closed_residue(const LSeriesSpec& spec) {
  if (!spec.shifts) fail(Errc::invalid_argument, spec.label + ": closed residue needs a zeta-product spec");
  cplx r = 1.0;
  double rel = 0.0;
  for (const cplx& l : *spec.shifts) {
    if (std::abs(l) <= 1e-12) continue;
    EvalResult z = zeta_em(1.0 - l);
    r *= z.value;
    rel += z.abs_error_estimate / std::abs(z.value);
  }
  if (std::abs(r.imag()) > 1e-10 * std::max(1.0, std::abs(r)))
    fail(Errc::contract_violation, spec.label + ": residue is not real (shifts not conjugate-closed)");
  return {r.real(), std::abs(r.real()) * rel, ResidueMethod::closed, 0};
}

ResidueResult richardson_residue(const LSeriesSpec& spec, const ResidueOptions& opts) {
  require(opts.levels >= 2, "richardson: need at least two levels");
  require(opts.h0 > 0.0, "richardson: h0 must be positive");
  std::function<double(double)> g;  // h -> h L(1 + h)
  double truncation_rel = 0.0;     // cofactor truncation, from halving the table
  if (spec.shifts) {
    g = [&spec](double h) {
      cplx v = lfun_eval(spec, cplx(1.0 + h, 0.0)).value;
      return h * v.real();
    };
  } else if (spec.cofactor) {
    const LSeriesSpec& co = *spec.cofactor;
    const std::uint64_t x = co.prime_limit.value_or(100'000);
    auto table = std::make_shared<CoeffTable>(
        multiplicative_sieve(co, x, {opts.workers, std::max<std::uint64_t>(x, 10'000'000)}));
    const auto vals = table->values();
    const CoeffTable half(std::vector<double>(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(x / 2)),
                          table->nonneg(), table->source_label());
    const double full_at_1 = smoothed_dirichlet_value(*table, 1.0);
    truncation_rel = std::abs(full_at_1 - smoothed_dirichlet_value(half, 1.0)) / std::abs(full_at_1);
    g = [table](double h) {
      return h * zeta(cplx(1.0 + h)).real() * smoothed_dirichlet_value(*table, 1.0 + h);
    };
  } else {
    fail(Errc::invalid_argument, spec.label + ": no evaluator near s = 1 for Richardson");
  }
  const int L = opts.levels;
  std::vector<std::vector<double>> R(L, std::vector<double>(L, 0.0));
  for (int j = 0; j < L; ++j) {
    R[j][0] = g(opts.h0 / std::ldexp(1.0, j));
    for (int m = 1; m <= j; ++m) {
      const double f = std::ldexp(1.0, m);
      R[j][m] = (f * R[j][m - 1] - R[j - 1][m - 1]) / (f - 1.0);
    }
  }
  const double best = R[L - 1][L - 1];
  const double prev = R[L - 2][L - 2];
  const double diff = std::abs(best - prev);
  if (diff > opts.rel_tol * std::max(1.0, std::abs(best)))
    fail(Errc::non_convergence, spec.label + ": Richardson estimates differ by " + format_double(diff));
  return {best, diff + std::abs(best) * truncation_rel, ResidueMethod::richardson, 0};
}

ResidueResult euler_residue(const LSeriesSpec& spec, const ResidueOptions& opts) {
  if (!spec.cofactor)
    fail(Errc::invalid_argument, spec.label + ": Euler-product residue needs L = zeta * cofactor");
  const LSeriesSpec& co = *spec.cofactor;
  std::uint64_t P = opts.prime_cutoff;
  if (co.prime_limit) P = std::min(P, *co.prime_limit);
  require(P >= 2, "euler_product: prime cutoff below 2");
  SpfSieve sieve(P);
  std::vector<double> logs;
  for (std::uint32_t p : sieve.primes()) {
    SatakeSet s = co.local_factor(p);
    cplx lf = 0.0;
    for (const cplx& a : s.roots) lf -= std::log(1.0 - a / static_cast<double>(p));
    logs.push_back(lf.real());
  }
  ResidueResult r;
  r.value = std::exp(pairwise_sum(logs));
  // Square-root cancellation model for the omitted primes:
  // degree * sum_{p > P} p^{-3/2} ~ 2 degree / (sqrt(P) log P).
  const double Pd = static_cast<double>(P);
  const double tail = 2.0 * static_cast<double>(co.degree) / (std::sqrt(Pd) * std::log(Pd));
  r.error_estimate = r.value * tail;
  r.method = ResidueMethod::euler_product;
  r.primes_used = sieve.primes().size();
  return r;
}

}  // namespace

ResidueResult residue_at_1(const LSeriesSpec& spec, ResidueMethod method, const ResidueOptions& opts) {
  if (spec.pole_order_at_1 != 1)
    fail(Errc::pole_order, spec.label + ": pole of order " + std::to_string(spec.pole_order_at_1) +
                               " at s = 1, residue needs a simple pole");
  switch (method) {
    case ResidueMethod::closed: return closed_residue(spec);
    case ResidueMethod::richardson: return richardson_residue(spec, opts);
    case ResidueMethod::euler_product: return euler_residue(spec, opts);
  }
  fail(Errc::invalid_argument, "residue_at_1: unknown method");
}

std::vector<double> geometric_grid(double a, double b, double ratio) {
  require(a > 0.0 && b >= a, "geometric_grid: need 0 < a <= b");
  require(ratio > 1.0, "geometric_grid: ratio must exceed 1");
  std::vector<double> g;
  for (int i = 0;; ++i) {
    double v = a * std::pow(ratio, i);
    if (v > b * (1.0 + 1e-12)) break;
    g.push_back(std::min(v, b));
  }
  return g;
}

std::vector<double> log_uniform_grid(double a, double ratio, int windows, int per_window) {
  require(a > 0.0 && ratio > 1.0 && windows >= 1 && per_window >= 1, "log_uniform_grid: bad arguments");
  std::vector<double> g;
  const int n = windows * per_window;
  for (int i = 0; i < n; ++i) g.push_back(a * std::pow(ratio, static_cast<double>(i) / per_window));
  return g;
}

GrowthFit growth_scan(const LSeriesSpec& spec, double sigma, const std::vector<double>& t_grid,
                      const GrowthOptions& opts) {
  if (!analytic_evaluable(spec)) fail(Errc::invalid_argument, spec.label + ": growth scan needs an analytic evaluator");
  require(sigma >= -0.25 && sigma <= 2.0, "growth_scan: sigma must lie in [-0.25, 2]");
  require(!t_grid.empty() && t_grid.front() >= 10.0, "growth_scan: t grid must start at t >= 10");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    require(t_grid[i] > t_grid[i - 1], "growth_scan: t grid must be strictly increasing");
  require(opts.window_ratio > 1.0, "growth_scan: window ratio must exceed 1");

  GrowthFit fit;
  fit.sigma = sigma;
  fit.t_grid = t_grid;
  fit.epsilon_used = opts.epsilon;
  fit.reference_exponent = spec.critical_exponent * (1.0 + opts.epsilon - sigma);
  fit.abs_values.resize(t_grid.size());
  parallel_chunks(t_grid.size(), opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      fit.abs_values[i] = std::abs(lfun_eval(spec, cplx(sigma, t_grid[i])).value);
  });

  const double t0 = t_grid.front();
  const double lr = std::log(opts.window_ratio);
  std::vector<int> window_of(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    window_of[i] = static_cast<int>(std::floor(std::log(t_grid[i] / t0) / lr + 1e-12));
  fit.window_max.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size();) {
    std::size_t j = i;
    GrowthWindow w;
    w.t_lo = t0 * std::pow(opts.window_ratio, window_of[i]);
    w.t_hi = w.t_lo * opts.window_ratio;
    while (j < t_grid.size() && window_of[j] == window_of[i]) {
      if (fit.abs_values[j] > w.max_abs) {
        w.max_abs = fit.abs_values[j];
        w.t_at_max = t_grid[j];
      }
      ++j;
    }
    for (std::size_t k = i; k < j; ++k) fit.window_max[k] = w.max_abs;
    fit.windows.push_back(w);
    i = j;
  }
  if (static_cast<int>(fit.windows.size()) < opts.min_windows)
    fail(Errc::invalid_argument, "growth_scan: grid spans " + std::to_string(fit.windows.size()) +
                                     " windows, need " + std::to_string(opts.min_windows));
  std::vector<double> lx, ly;
  for (const auto& w : fit.windows) {
    lx.push_back(std::log(w.t_at_max));
    ly.push_back(std::log(w.max_abs));
  }
  LineFit lf = fit_line(lx, ly);
  fit.measured_exponent = lf.slope;
  fit.intercept = lf.intercept;
  fit.residual = lf.residual;
  return fit;
}

ConversionFit conversion_exponent_check(const LSeriesSpec& spec, double sigma,
                                        const std::vector<double>& t_grid, unsigned workers) {
  if (!analytic_evaluable(spec))
    fail(Errc::invalid_argument, spec.label + ": conversion check needs a zeta-product spec");
  require(t_grid.size() >= 4, "conversion_exponent_check: need at least 4 grid points");
  std::vector<double> num(t_grid.size()), den(t_grid.size());
  parallel_chunks(t_grid.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      num[i] = std::abs(lfun_eval(spec, cplx(sigma, t_grid[i])).value);
      den[i] = std::abs(lfun_eval(spec, cplx(1.0 - sigma, -t_grid[i])).value);
    }
  });
  std::vector<double> sorted = den;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double typical = sorted[sorted.size() / 2];

  ConversionFit fit;
  fit.sigma = sigma;
  fit.expected = static_cast<double>(spec.degree) * (0.5 - sigma);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (den[i] < 1e-6 * typical) {
      fit.t_dropped.push_back(t_grid[i]);
      continue;
    }
    fit.t_used.push_back(t_grid[i]);
    fit.chi_abs.push_back(num[i] / den[i]);
    lx.push_back(std::log(t_grid[i]));
    ly.push_back(std::log(num[i] / den[i]));
  }
  if (lx.size() < 4) fail(Errc::non_convergence, "conversion_exponent_check: too many points dropped");
  LineFit lf = fit_line(lx, ly);
  fit.exponent = lf.slope;
  fit.intercept = lf.intercept;
  fit.residual = lf.residual;
  return fit;
}

}  // namespace rz

namespace rz {

ResidueChoice choose_residue(const LSeriesSpec& spec, const ResidueOptions& opts) {
  if (spec.pole_order_at_1 != 1)
    fail(Errc::pole_order, spec.label + ": pole of order " + std::to_string(spec.pole_order_at_1) +
                               " at s = 1, main term needs a simple pole");
  if (spec.residue_hint) return {*spec.residue_hint, 0.0, "residue_hint"};
  ResidueMethod order[] = {ResidueMethod::closed, ResidueMethod::euler_product, ResidueMethod::richardson};
  for (ResidueMethod m : order) {
    const bool supported = (m == ResidueMethod::closed && spec.shifts) ||
                           (m == ResidueMethod::euler_product && spec.cofactor) ||
                           (m == ResidueMethod::richardson && (spec.shifts || spec.cofactor));
    if (!supported) continue;
    ResidueResult r = residue_at_1(spec, m, opts);
    return {r.value, r.error_estimate, to_string(m)};
  }
  fail(Errc::invalid_argument, spec.label + ": no residue method applies");
}

}  // namespace rz
