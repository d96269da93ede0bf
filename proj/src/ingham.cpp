#include "rz/ingham.hpp"

#include <algorithm>
#include <cmath>

#include "rz/error.hpp"
#include "rz/numeric.hpp"
#include "rz/riesz.hpp"

namespace rz {

MeanFunction MeanFunction::step_sum(std::shared_ptr<const CoeffTable> t) {
  require(t != nullptr, "step_sum: null table");
  MeanFunction f;
  f.kind_ = Kind::step_sum;
  f.domain_max_ = static_cast<double>(t->cutoff());
  f.monotone_ = t->nonneg();
  f.id_ = "step_sum(" + t->source_label() + ")";
  f.table_ = std::move(t);
  return f;
}

MeanFunction MeanFunction::riesz(std::shared_ptr<const CoeffTable> t, int k) {
  require(t != nullptr, "riesz: null table");
  require(k >= 0, "riesz: k must be >= 0");
  MeanFunction f;
  f.kind_ = Kind::riesz;
  f.k_ = k;
  f.domain_max_ = static_cast<double>(t->cutoff());
  f.monotone_ = t->nonneg();
  f.id_ = "riesz" + std::to_string(k) + "(" + t->source_label() + ")";
  f.table_ = std::move(t);
  return f;
}

MeanFunction MeanFunction::power_sum(std::vector<std::pair<double, double>> coef_exp) {
  require(!coef_exp.empty(), "power_sum: no terms");
  MeanFunction f;
  f.kind_ = Kind::synthetic;
  f.domain_max_ = INFINITY;
  // Non-decreasing on [1, inf) when every term is.
  f.monotone_ = std::all_of(coef_exp.begin(), coef_exp.end(),
                            [](const auto& ce) { return ce.first * ce.second >= 0.0; });
  f.id_ = "power_sum";
  f.terms_ = std::move(coef_exp);
  return f;
}

MeanFunction MeanFunction::custom(std::function<double(double)> fn, double domain_max,
                                  bool monotone, std::string id) {
  require(static_cast<bool>(fn), "custom: empty evaluator");
  require(domain_max > 1.0, "custom: domain must extend past 1");
  MeanFunction f;
  f.kind_ = Kind::synthetic;
  f.custom_ = std::move(fn);
  f.domain_max_ = domain_max;
  f.monotone_ = monotone;
  f.id_ = std::move(id);
  return f;
}

namespace {

void check_domain(const MeanFunction& A, double x) {
  if (!(x <= A.domain_max()))
    fail(Errc::out_of_domain, A.id() + ": argument " + format_double(x) + " beyond domain " +
                                  format_double(A.domain_max()));
}

std::uint64_t floor_index(double x, std::uint64_t cutoff) {
  if (x < 1.0) return 0;
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(x)), cutoff);
}

}  // namespace

double MeanFunction::operator()(double x) const {
  check_domain(*this, x);
  switch (kind_) {
    case Kind::step_sum: {
      const auto n = floor_index(x, table_->cutoff());
      return pairwise_sum(table_->values().subspan(0, n));
    }
    case Kind::riesz:
      if (x < 1.0) return 0.0;
      return riesz_mean(*table_, x, k_);
    case Kind::synthetic:
      if (custom_) return custom_(x);
      double s = 0.0;
      for (const auto& [c, e] : terms_) s += c * std::pow(x, e);
      return s;
  }
  return 0.0;
}

double riesz_weight_integral(int j, double m, double x) {
  require(j >= 0, "riesz_weight_integral: j must be >= 0");
  require(m >= 1.0 && m <= x, "riesz_weight_integral: need 1 <= m <= x");
  if (j == 0) return x - m;
  const double v = (x - m) / x;
  if (v < 0.5) {
    // m * sum_n (n+1) v^{j+n+1} / (j+n+1)
    double pw = std::pow(v, j + 1);
    double sum = 0.0;
    for (int n = 0; n < 400; ++n) {
      const double term = (n + 1) * pw / (j + n + 1);
      sum += term;
      if (term <= 1e-18 * sum) break;
      pw *= v;
    }
    return m * sum;
  }
  const double r = m / x;
  double binom = 1.0;
  double sum = x - m;
  for (int i = 1; i <= j; ++i) {
    binom = binom * (j - i + 1) / i;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    if (i == 1)
      sum -= binom * m * std::log(x / m);
    else
      sum += sign * binom * m * (1.0 - std::pow(r, i - 1)) / (i - 1);
  }
  return sum;
}

double average_transform(const MeanFunction& A, double x) {
  require(x >= 1.0, "average_transform: x must be >= 1");
  check_domain(A, x);
  switch (A.kind()) {
    case MeanFunction::Kind::step_sum: {
      const auto& t = *A.table();
      const auto n = floor_index(x, t.cutoff());
      std::vector<double> terms(n);
      for (std::uint64_t m = 1; m <= n; ++m) terms[m - 1] = t.at(m) * (x - static_cast<double>(m));
      return pairwise_sum(terms) / x;
    }
    case MeanFunction::Kind::riesz: {
      const auto& t = *A.table();
      const auto n = floor_index(x, t.cutoff());
      const double inv_fact = 1.0 / factorial(A.k());
      std::vector<double> terms(n);
      for (std::uint64_t m = 1; m <= n; ++m)
        terms[m - 1] = t.at(m) * inv_fact * riesz_weight_integral(A.k(), static_cast<double>(m), x);
      return pairwise_sum(terms) / x;
    }
    case MeanFunction::Kind::synthetic:
      if (!A.terms().empty()) {
        double s = 0.0;
        for (const auto& [c, e] : A.terms()) {
          if (e == -1.0)
            s += c * std::log(x);
          else
            s += c * (std::pow(x, e + 1.0) - 1.0) / (e + 1.0);
        }
        return s / x;
      }
      if (x == 1.0) return 0.0;
      return adaptive_simpson([&A](double t) { return A(t); }, 1.0, x, 1e-10) / x;
  }
  return 0.0;
}

Sandwich sandwich_bounds(const std::function<double(double)>& B, double x, double delta,
                         double domain_max) {
  require(delta > 0.0, "sandwich_bounds: delta must be > 0");
  if (x - delta < 1.0)
    fail(Errc::out_of_domain, "sandwich_bounds: x - delta below 1");
  if (!(x + delta <= domain_max))
    fail(Errc::out_of_domain, "sandwich_bounds: x + delta beyond domain");
  const double bm = (x - delta) * B(x - delta);
  const double b0 = x * B(x);
  const double bp = (x + delta) * B(x + delta);
  return {(b0 - bm) / delta, (bp - b0) / delta};
}

Sandwich sandwich_bounds(const MeanFunction& A, double x, double delta) {
  return sandwich_bounds([&A](double u) { return average_transform(A, u); }, x, delta,
                         A.domain_max());
}

double ELaw::operator()(double x) const { return scale * std::pow(x, exponent); }

namespace {

struct Delta {
  double value;
  bool clamped;
};

Delta chain_delta(double factor, const ELaw& E, double x) {
  const double d = factor * x / std::sqrt(E(x));
  if (d >= x) return {0.5 * x, true};
  return {d, false};
}

ELaw law_at_level(ELaw E1, int j) {
  for (int i = 1; i < j; ++i) E1 = E1.sqrt();
  return E1;
}

}  // namespace

std::vector<CascadeLevel> width_cascade(const MeanFunction& A, const std::vector<double>& x_grid,
                                        ELaw E1, int levels, double delta_factor) {
  require(levels >= 1, "width_cascade: levels must be >= 1");
  require(x_grid.size() >= 2, "width_cascade: need at least two grid points");
  require(delta_factor > 0.0, "width_cascade: delta factor must be > 0");
  std::vector<CascadeLevel> out;
  for (int j = 1; j <= levels; ++j) {
    CascadeLevel lv;
    lv.level = j;
    lv.E = law_at_level(E1, j);
    lv.predicted_width_exponent = 1.0 - 0.5 * lv.E.exponent;
    std::vector<double> lx, lw;
    for (double x : x_grid) {
      const Delta d = chain_delta(delta_factor, lv.E, x);
      const Sandwich s = sandwich_bounds(A, x, d.value);
      const double a = A(x);
      lv.x.push_back(x);
      lv.lower.push_back(s.lower);
      lv.upper.push_back(s.upper);
      lv.exact.push_back(a);
      const double tol = 1e-9 * std::max(1.0, std::abs(a));
      if (s.lower > a + tol || s.upper < a - tol) lv.bracketed = false;
      if (d.clamped) ++lv.clamped;
      if (s.width() > 0.0 && !d.clamped) {
        lx.push_back(std::log(x));
        lw.push_back(std::log(s.width()));
      }
    }
    if (lx.size() >= 2) lv.fitted_width_exponent = fit_line(lx, lw).slope;
    out.push_back(std::move(lv));
  }
  return out;
}

double chain_extent(double x, int k1, const ChainOptions& opts) {
  require(k1 >= 1, "chain_extent: k1 must be >= 1");
  // The cascade at level j evaluates level j-1 at x + delta_j(x); the largest
  // argument follows the upper branch all the way down.
  double top = x;
  for (int j = k1; j >= 1; --j) top += chain_delta(opts.delta_factor, law_at_level(opts.E1, j), top).value;
  return top;
}

namespace {

// Riesz mean normalised by 1/k1!: sum a(m)/k1! (1 - m/x)^p.
double scaled_mean(const CoeffTable& t, double x, int p, int k1) {
  return riesz_mean(t, x, p) * factorial(p) / factorial(k1);
}

double cascade_value(const CoeffTable& t, int k1, const ChainOptions& opts, int j, double x) {
  if (j == 0) return scaled_mean(t, x, k1, k1);
  const Delta d = chain_delta(opts.delta_factor, law_at_level(opts.E1, j), x);
  if (x - d.value < 1.0) fail(Errc::out_of_domain, "chain_reduce: x - delta below 1");
  const double up = (x + d.value) * cascade_value(t, k1, opts, j - 1, x + d.value);
  const double dn = (x - d.value) * cascade_value(t, k1, opts, j - 1, x - d.value);
  return (up - dn) / (2.0 * d.value);
}

}  // namespace

ReductionTrace chain_reduce(const CoeffTable& t, int k1, double C, const std::vector<double>& x_grid,
                            const ChainOptions& opts) {
  require(k1 >= 1, "chain_reduce: k1 must be >= 1");
  require(!x_grid.empty(), "chain_reduce: empty grid");
  require(t.nonneg(), "chain_reduce: table must be non-negative");
  require(opts.delta_factor > 0.0, "chain_reduce: delta factor must be > 0");
  require(opts.E1.scale > 0.0 && opts.E1.exponent > 0.0, "chain_reduce: E law must be positive");
  for (double x : x_grid) require(x >= 2.0, "chain_reduce: grid points must be >= 2");
  const double ref = opts.reference_x > 0.0 ? opts.reference_x : x_grid.back();
  const double cutoff = static_cast<double>(t.cutoff());
  double need = chain_extent(ref, k1, opts);
  for (double x : x_grid) need = std::max(need, chain_extent(x, k1, opts));
  if (need > cutoff)
    fail(Errc::out_of_domain, "chain_reduce: table cutoff " + format_double(cutoff) +
                                  " below required extent " + format_double(need));

  ReductionTrace tr;
  tr.k1 = k1;
  tr.C = C;
  tr.reference_x = ref;
  const double fact = factorial(k1);

  std::vector<double> xs = x_grid;
  const bool ref_on_grid = std::find(xs.begin(), xs.end(), ref) != xs.end();
  if (!ref_on_grid) xs.push_back(ref);
  const std::size_t ref_idx = ref_on_grid ? static_cast<std::size_t>(
                                                std::find(xs.begin(), xs.end(), ref) - xs.begin())
                                          : xs.size() - 1;

  {
    ReductionLevel top;
    top.k = k1;
    top.delta_used = "none";
    top.predicted_cascade = C / factorial(k1 + 1);
    top.predicted_residue = C / (fact * (k1 + 1));
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const double v = scaled_mean(t, x_grid[i], k1, k1);
      top.x.push_back(x_grid[i]);
      top.lower.push_back(v);
      top.upper.push_back(v);
      top.direct.push_back(v);
    }
    const double v = scaled_mean(t, ref, k1, k1);
    top.c_est = v / ref;
    top.direct_coefficient = top.c_est;
    top.cascade_c_est = top.c_est;
    tr.levels.push_back(std::move(top));
  }

  for (int j = 1; j <= k1; ++j) {
    const int p_b = k1 - j + 1;  // exponent of the mean being averaged
    const int p_a = k1 - j;      // exponent of the target
    const ELaw E = law_at_level(opts.E1, j);
    std::vector<Sandwich> sw(xs.size());
    std::vector<double> direct(xs.size());
    std::vector<char> clamped(xs.size(), 0);
    parallel_chunks(xs.size(), opts.workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const Delta d = chain_delta(opts.delta_factor, E, xs[i]);
        clamped[i] = d.clamped;
        sw[i] = sandwich_bounds([&](double u) { return scaled_mean(t, u, p_b, k1); }, xs[i], d.value,
                                cutoff);
        direct[i] = scaled_mean(t, xs[i], p_a, k1);
      }
    });

    ReductionLevel lv;
    lv.k = p_a;
    lv.delta_used = clamped[ref_idx] ? "clamped:x/2" : "2x/sqrt(E_j)";
    if (opts.delta_factor != 2.0 && !clamped[ref_idx])
      lv.delta_used = format_double(opts.delta_factor) + "x/sqrt(E_j)";
    lv.predicted_cascade = std::pow(2.0, j) * C / factorial(k1 + 1);
    lv.predicted_residue = C / (fact * (p_a + 1));
    std::vector<double> lx, lw;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const Sandwich& s = sw[i];
      lv.x.push_back(xs[i]);
      lv.lower.push_back(s.lower);
      lv.upper.push_back(s.upper);
      lv.direct.push_back(direct[i]);
      if (s.upper < s.lower) lv.inverted = true;
      const double tol = 1e-9 * std::max(1.0, std::abs(direct[i]));
      if (direct[i] < s.lower - tol || direct[i] > s.upper + tol) lv.bracketed = false;
      if (s.width() > 0.0) {
        lx.push_back(std::log(xs[i]));
        lw.push_back(std::log(s.width()));
      }
    }
    if (lx.size() >= 2) lv.width_exponent = fit_line(lx, lw).slope;
    const Sandwich& sr = sw[ref_idx];
    lv.c_est = sr.midpoint() / ref;
    lv.sandwich_width_at_ref_x = sr.width();
    lv.identity_discrepancy_at_ref_x = sr.midpoint() - direct[ref_idx];
    lv.direct_coefficient = direct[ref_idx] / ref;
    lv.cascade_c_est = cascade_value(t, k1, opts, j, ref) / ref;
    tr.levels.push_back(std::move(lv));
  }

  const ReductionLevel& last = tr.levels.back();
  tr.level0_coefficient = fact * last.c_est;
  tr.level0_cascade_coefficient = fact * last.cascade_c_est;
  tr.direct_partial_sum_coefficient = riesz_mean(t, ref, 0) / ref;
  tr.cascade_alternative = std::pow(2.0, k1) * C / (k1 + 1);
  return tr;
}

IdentityProbe identity_probe(const CoeffTable& t, double x, int k) {
  require(k >= 1, "identity_probe: k must be >= 1");
  require(x >= 1.0, "identity_probe: x must be >= 1");
  if (x > static_cast<double>(t.cutoff()))
    fail(Errc::out_of_domain, "identity_probe: x beyond table cutoff");
  const auto n = static_cast<std::uint64_t>(std::floor(x));
  const double inv_fact = 1.0 / factorial(k);
  std::vector<double> lhs(n), rhs(n);
  for (std::uint64_t m = 1; m <= n; ++m) {
    const double md = static_cast<double>(m);
    const double w = (x - md) / x;
    double wk = 1.0;
    for (int i = 0; i < k; ++i) wk *= w;
    lhs[m - 1] = t.at(m) * wk * inv_fact;
    const double iw = k == 1 ? (x - md) / x : riesz_weight_integral(k - 1, md, x) / x;
    rhs[m - 1] = t.at(m) * iw * inv_fact;
  }
  IdentityProbe p;
  p.lhs = pairwise_sum(lhs);
  p.rhs = pairwise_sum(rhs);
  p.gap = p.lhs - p.rhs;
  return p;
}

}  // namespace rz
