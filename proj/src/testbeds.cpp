#include "rz/testbeds.hpp"

#include <cmath>

#include "rz/error.hpp"
#include "rz/zeta.hpp"

namespace rz {

namespace {

std::string shift_list(const std::vector<double>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += format_double(t[i]);
  }
  return s + ")";
}

int count_zero(const std::vector<cplx>& shifts) {
  int z = 0;
  for (const cplx& l : shifts)
    if (std::abs(l) <= 1e-12) ++z;
  return z;
}

// prod_{lambda != 0} zeta(1 - lambda) when exactly one shift vanishes.
std::optional<double> closed_residue(const std::vector<cplx>& shifts) {
  if (count_zero(shifts) != 1) return std::nullopt;
  cplx r = 1.0;
  for (const cplx& l : shifts)
    if (std::abs(l) > 1e-12) r *= zeta(1.0 - l);
  if (std::abs(r.imag()) > 1e-10 * std::max(1.0, std::abs(r))) return std::nullopt;
  return r.real();
}

LSeriesSpec zeta_product(std::string label, std::vector<cplx> shifts, bool nonneg) {
  LSeriesSpec spec;
  spec.label = std::move(label);
  spec.degree = shifts.size();
  spec.pole_order_at_1 = count_zero(shifts);
  spec.critical_exponent = 0.5 * static_cast<double>(shifts.size());
  spec.nonneg_expected = nonneg;
  spec.residue_hint = closed_residue(shifts);
  spec.local_factor = [shifts](std::uint64_t p) {
    SatakeSet s;
    s.prime = p;
    const double lp = std::log(static_cast<double>(p));
    for (const cplx& l : shifts) s.roots.push_back(std::exp(l * lp));
    return s;
  };
  spec.shifts = std::move(shifts);
  return spec;
}

std::vector<cplx> imag_shifts(const std::vector<double>& t) {
  std::vector<cplx> out;
  for (double v : t) out.emplace_back(0.0, v);
  return out;
}

}  // namespace

std::string TestbedId::label() const {
  switch (kind) {
    case TestbedKind::zeta: return "zeta";
    case TestbedKind::zeta_squared: return "zeta2";
    case TestbedKind::eisenstein: return "eisenstein" + shift_list(shift_imag);
    case TestbedKind::rs_delta: return "rs_delta";
    case TestbedKind::rs_eisenstein: return "rs_eisenstein" + shift_list(shift_imag);
  }
  return "unknown";
}

TestbedId TestbedId::parse(const std::string& name, std::vector<double> shift_imag) {
  TestbedId id;
  if (name == "zeta") id.kind = TestbedKind::zeta;
  else if (name == "zeta2" || name == "zeta_squared") id.kind = TestbedKind::zeta_squared;
  else if (name == "eisenstein") id.kind = TestbedKind::eisenstein;
  else if (name == "rs_delta") id.kind = TestbedKind::rs_delta;
  else if (name == "rs_eisenstein") id.kind = TestbedKind::rs_eisenstein;
  else fail(Errc::invalid_argument, "unknown testbed '" + name + "'");
  const bool takes_shifts =
      id.kind == TestbedKind::eisenstein || id.kind == TestbedKind::rs_eisenstein;
  if (takes_shifts) {
    require(!shift_imag.empty(), name + ": needs at least one shift");
    id.shift_imag = std::move(shift_imag);
  } else {
    require(shift_imag.empty(), name + ": does not take shifts");
  }
  return id;
}

std::vector<std::uint64_t> sigma1_table(std::uint64_t n) {
  std::vector<std::uint64_t> s(n + 1, 0);
  for (std::uint64_t d = 1; d <= n; ++d)
    for (std::uint64_t m = d; m <= n; m += d) s[m] += d;
  return s;
}

TauTable tau_table(std::uint64_t n) {
  require(n >= 1, "tau_table: n must be at least 1");
  // f_k: coefficients of prod (1 - q^j)^24; tau(k) = f_{k-1}.
  const auto sigma = sigma1_table(n);
  std::vector<__int128> f(n, 0);
  f[0] = 1;
  for (std::uint64_t k = 1; k < n; ++k) {
    __int128 acc = 0;
    for (std::uint64_t j = 1; j <= k; ++j) {
      __int128 term;
      if (__builtin_mul_overflow(static_cast<__int128>(sigma[j]), f[k - j], &term) ||
          __builtin_add_overflow(acc, term, &acc))
        fail(Errc::overflow, "tau_table: 128-bit overflow at n = " + std::to_string(k + 1));
    }
    __int128 scaled;
    if (__builtin_mul_overflow(acc, static_cast<__int128>(-24), &scaled))
      fail(Errc::overflow, "tau_table: 128-bit overflow at n = " + std::to_string(k + 1));
    if (scaled % static_cast<__int128>(k) != 0)
      fail(Errc::contract_violation, "tau_table: recurrence lost integrality");
    f[k] = scaled / static_cast<__int128>(k);
  }
  return f;
}

SatakeSet normalize_hecke(std::uint64_t p, __int128 tau_p) {
  const double lambda = static_cast<double>(tau_p) * std::pow(static_cast<double>(p), -5.5);
  const double disc = lambda * lambda - 4.0;
  SatakeSet s;
  s.prime = p;
  if (disc < 0.0) {
    const double im = 0.5 * std::sqrt(-disc);
    s.roots = {cplx(0.5 * lambda, im), cplx(0.5 * lambda, -im)};
  } else {
    // Larger root first; the smaller as 1/alpha keeps alpha beta = 1 exact in rounding.
    const double big = 0.5 * (lambda + std::copysign(std::sqrt(disc), lambda));
    s.roots = {cplx(big), cplx(1.0 / big)};
  }
  return s;
}

LSeriesSpec make_testbed(const TestbedId& id, const TestbedOptions& opts) {
  switch (id.kind) {
    case TestbedKind::zeta: {
      LSeriesSpec s = zeta_product("zeta", {cplx(0.0)}, true);
      s.residue_hint = 1.0;
      return s;
    }
    case TestbedKind::zeta_squared:
      return zeta_product("zeta2", {cplx(0.0), cplx(0.0)}, true);
    case TestbedKind::eisenstein:
      return zeta_product(id.label(), imag_shifts(id.shift_imag), false);
    case TestbedKind::rs_eisenstein: {
      // alpha_i conj(alpha_j) = p^{lambda_i - lambda_j} for imaginary lambda.
      std::vector<cplx> diffs;
      for (double a : id.shift_imag)
        for (double b : id.shift_imag) diffs.emplace_back(0.0, a - b);
      return zeta_product(id.label(), std::move(diffs), true);
    }
    case TestbedKind::rs_delta: {
      std::shared_ptr<const TauTable> tau = opts.tau;
      if (!tau) tau = std::make_shared<const TauTable>(tau_table(opts.tau_cap));
      const std::uint64_t cap = tau->size();

      LSeriesSpec sym2;
      sym2.label = "sym2_delta";
      sym2.degree = 3;
      sym2.pole_order_at_1 = 0;
      sym2.critical_exponent = 1.5;
      sym2.prime_limit = cap;
      sym2.local_factor = [tau, cap](std::uint64_t p) {
        if (p > cap) fail(Errc::resource_exhausted, "sym2_delta: p beyond tau cap");
        SatakeSet h = normalize_hecke(p, (*tau)[p - 1]);
        const cplx a = h.roots[0], b = h.roots[1];
        return SatakeSet{p, {a * a, a * b, b * b}};
      };

      LSeriesSpec s;
      s.label = "rs_delta";
      s.degree = 4;
      s.pole_order_at_1 = 1;
      s.critical_exponent = 2.0;
      s.nonneg_expected = true;
      s.prime_limit = cap;
      s.local_factor = [tau, cap](std::uint64_t p) {
        if (p > cap) fail(Errc::resource_exhausted, "rs_delta: p beyond tau cap");
        return rankin_square(normalize_hecke(p, (*tau)[p - 1]));
      };
      // b(p^k) = sum_{j <= k/2} lambda(p^{k-2j})^2, with lambda(p^n) from the Hecke
      // recurrence; free of the cancellation in alpha^2 + 2 + beta^2.
      s.prime_power_coeffs = [tau, cap](std::uint64_t p, int e_max) {
        if (p > cap) fail(Errc::resource_exhausted, "rs_delta: p beyond tau cap");
        const double lam = static_cast<double>((*tau)[p - 1]) * std::pow(static_cast<double>(p), -5.5);
        std::vector<double> l(static_cast<std::size_t>(e_max) + 1);
        l[0] = 1.0;
        if (e_max >= 1) l[1] = lam;
        for (int n = 2; n <= e_max; ++n) l[n] = lam * l[n - 1] - l[n - 2];
        std::vector<double> b(static_cast<std::size_t>(e_max));
        for (int k = 1; k <= e_max; ++k) {
          double acc = 0.0;
          for (int j = 0; 2 * j <= k; ++j) acc += l[k - 2 * j] * l[k - 2 * j];
          b[k - 1] = acc;
        }
        return b;
      };
      s.cofactor = std::make_shared<const LSeriesSpec>(std::move(sym2));
      return s;
    }
  }
  fail(Errc::invalid_argument, "make_testbed: unknown kind");
}

}  // namespace rz
