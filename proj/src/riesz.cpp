#include "rz/riesz.hpp"

#include <cmath>

#include "rz/error.hpp"

namespace rz {

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

double riesz_mean(const CoeffTable& t, double x, int k) {
  require(k >= 0, "riesz_mean: k must be non-negative");
  if (!(x >= 1.0) || x > static_cast<double>(t.cutoff()))
    fail(Errc::out_of_domain, "riesz_mean: x = " + format_double(x) + " outside [1, " +
                                  std::to_string(t.cutoff()) + "]");
  const auto n = static_cast<std::uint64_t>(std::floor(x));
  const double inv_fact = 1.0 / factorial(k);
  std::vector<double> terms(n);
  for (std::uint64_t m = 1; m <= n; ++m) {
    const double w = (x - static_cast<double>(m)) / x;
    double wk = 1.0;
    for (int j = 0; j < k; ++j) wk *= w;
    terms[m - 1] = t.at(m) * wk * inv_fact;
  }
  return pairwise_sum(terms);
}

double main_term(double C, double x, int k) {
  require(k >= 0, "main_term: k must be non-negative");
  return C * x / factorial(k + 1);
}

ExponentFit exponent_fit(const std::vector<double>& x_grid, const std::vector<double>& errors) {
  require(x_grid.size() == errors.size(), "exponent_fit: size mismatch");
  require(x_grid.size() >= 6, "exponent_fit: need at least 6 grid points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(std::abs(errors[i]) >= 1e-13)) continue;
    lx.push_back(std::log(x_grid[i]));
    ly.push_back(std::log(std::abs(errors[i])));
  }
  if (lx.size() < 4)
    fail(Errc::non_convergence, "exponent_fit: only " + std::to_string(lx.size()) +
                                    " points above the 1e-13 floor");
  LineFit lf = fit_line(lx, ly);
  return {lf.slope, lf.intercept, lf.residual, lf.points};
}

int k_threshold(int n, Threshold which) {
  require(n >= 2, "k_threshold: n must be at least 2");
  if (which == Threshold::current) return n * n / 2 + 1;
  return n * n * (n + 1) / 2 + n;
}

RieszReport riesz_report(const CoeffTable& t, int k, const std::vector<double>& x_grid, double C,
                         std::string C_source, unsigned workers) {
  require(!x_grid.empty(), "riesz_report: empty grid");
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    require(x_grid[i] > x_grid[i - 1], "riesz_report: grid must be strictly increasing");
  RieszReport r;
  r.k = k;
  r.x_grid = x_grid;
  r.C_used = C;
  r.C_source = std::move(C_source);
  r.smoothed_sums.resize(x_grid.size());
  parallel_chunks(x_grid.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) r.smoothed_sums[i] = riesz_mean(t, x_grid[i], k);
  });
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    r.main_terms.push_back(main_term(C, x_grid[i], k));
    r.errors.push_back(r.smoothed_sums[i] - r.main_terms.back());
    if (t.nonneg()) {
      if (r.smoothed_sums[i] < -1e-9) r.monotone = false;
      if (i > 0 && r.smoothed_sums[i] < r.smoothed_sums[i - 1] - 1e-9 * std::abs(r.smoothed_sums[i]))
        r.monotone = false;
    }
  }
  if (x_grid.size() >= 6) {
    try {
      ExponentFit f = exponent_fit(r.x_grid, r.errors);
      r.fitted_exponent = f.slope;
      r.fit_intercept = f.intercept;
      r.fit_ok = true;
    } catch (const Error& e) {
      r.fit_note = e.what();
    }
  } else {
    r.fit_note = "grid shorter than 6 points";
  }
  return r;
}

}  // namespace rz
