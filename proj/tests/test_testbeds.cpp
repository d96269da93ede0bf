#include <numeric>

#include "doctest.h"
#include "rz/coeffs.hpp"
#include "rz/error.hpp"
#include "rz/testbeds.hpp"
#include "rz/zeta.hpp"

using namespace rz;

namespace {

// tau(1..n) by multiplying out q * prod_{j <= n} (1 - q^j)^24 as a truncated polynomial.
std::vector<__int128> tau_brute(int n) {
  std::vector<__int128> f(n, 0);  // coefficients of q^0..q^{n-1} of prod (1 - q^j)^24
  f[0] = 1;
  for (int j = 1; j < n; ++j)
    for (int rep = 0; rep < 24; ++rep)
      for (int e = n - 1; e >= j; --e) f[e] -= f[e - j];
  return f;
}

double lambda(const TauTable& tau, std::uint64_t p) {
  return static_cast<double>(tau[p - 1]) * std::pow(static_cast<double>(p), -5.5);
}

__int128 ipow(__int128 b, int e) {
  __int128 r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

TEST_SUITE("testbeds") {
  TEST_CASE("tau matches the brute-force q-expansion") {
    const auto brute = tau_brute(50);
    const auto tau = tau_table(50);
    for (int n = 1; n <= 50; ++n) REQUIRE(tau[n - 1] == brute[n - 1]);
    CHECK(tau[0] == 1);
    CHECK(tau[1] == -24);
    CHECK(tau[2] == 252);
    CHECK(tau[5] == -6048);
    CHECK(tau[5] == tau[1] * tau[2]);
  }

  TEST_CASE("Hecke relations") {
    const auto tau = tau_table(3000);
    for (std::uint64_t a = 2; a <= 54; ++a)
      for (std::uint64_t b = 2; a * b <= 3000; ++b)
        if (std::gcd(a, b) == 1) REQUIRE(tau[a * b - 1] == tau[a - 1] * tau[b - 1]);
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53})
      CHECK(tau[p * p - 1] == tau[p - 1] * tau[p - 1] - ipow(p, 11));
  }

  TEST_CASE("sigma1") {
    auto s = sigma1_table(12);
    CHECK(s[1] == 1);
    CHECK(s[6] == 12);
    CHECK(s[12] == 28);
  }

  TEST_CASE("normalize_hecke") {
    auto s = normalize_hecke(2, -24);
    REQUIRE(s.roots.size() == 2);
    CHECK((s.roots[0] + s.roots[1]).real() == doctest::Approx(-24.0 / std::sqrt(2048.0)).epsilon(1e-14));
    CHECK((s.roots[0] + s.roots[1]).real() == doctest::Approx(-0.5303300858899106));
    CHECK(std::abs(s.roots[0] * s.roots[1] - 1.0) <= 1e-12);

    auto z = normalize_hecke(7, 0);
    CHECK(std::abs(z.roots[0] * z.roots[1] - 1.0) <= 1e-12);
    CHECK(std::abs(z.roots[0].real()) <= 1e-15);
    CHECK(std::abs(std::abs(z.roots[0].imag()) - 1.0) <= 1e-15);

    // Outside the Ramanujan range the pair is real and reciprocal.
    const __int128 big = static_cast<__int128>(3.0 * std::pow(5.0, 5.5));
    auto r = normalize_hecke(5, big);
    CHECK(std::abs(r.roots[0].imag()) == 0.0);
    CHECK(std::abs(r.roots[0] * r.roots[1] - 1.0) <= 1e-12);

    const auto tau = tau_table(10000);
    SpfSieve sv(10000);
    for (std::uint32_t p : sv.primes()) {
      auto q = normalize_hecke(p, tau[p - 1]);
      REQUIRE(std::abs(q.roots[0] * q.roots[1] - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("testbed metadata") {
    auto z = make_testbed(TestbedId::parse("zeta"));
    CHECK(z.degree == 1);
    CHECK(z.pole_order_at_1 == 1);
    CHECK(z.residue_hint.value() == 1.0);

    auto z2 = make_testbed(TestbedId::parse("zeta2"));
    CHECK(z2.degree == 2);
    CHECK(z2.pole_order_at_1 == 2);
    CHECK(!z2.residue_hint);

    auto e = make_testbed(TestbedId::parse("eisenstein", {0.0, 0.5, -0.5}));
    CHECK(e.degree == 3);
    CHECK(e.pole_order_at_1 == 1);
    const double want = (zeta(cplx(1.0, -0.5)) * zeta(cplx(1.0, 0.5))).real();
    CHECK(e.residue_hint.value() == doctest::Approx(want).epsilon(1e-10));
    CHECK(e.critical_exponent == 1.5);

    auto d = make_testbed(TestbedId::parse("rs_delta"), {200, nullptr});
    CHECK(d.degree == 4);
    CHECK(d.pole_order_at_1 == 1);
    CHECK(!d.residue_hint);
    CHECK(d.nonneg_expected);

    // Each of the d zero differences lambda_i - lambda_i contributes a zeta(s) factor.
    auto rse = make_testbed(TestbedId::parse("rs_eisenstein", {0.0, 1.0, -1.0}));
    CHECK(rse.degree == 9);
    CHECK(rse.pole_order_at_1 == 3);
    CHECK(rse.nonneg_expected);

    CHECK_THROWS_AS(TestbedId::parse("gl3"), Error);
    CHECK(TestbedId::parse("eisenstein", {0.0, 1.0, -1.0}).label() == "eisenstein(0,1,-1)");
  }

  TEST_CASE("RS_DELTA coefficients match the hand-expanded degree-4 factor") {
    TestbedOptions o;
    o.tau_cap = 20000;
    o.tau = std::make_shared<const TauTable>(tau_table(o.tau_cap));
    auto t = multiplicative_sieve(make_testbed(TestbedId::parse("rs_delta"), o), 20000);
    SpfSieve sv(1000);
    for (std::uint32_t p : sv.primes()) {
      // 1/(1 - l^2 X + (2 l^2 - 2) X^2 - l^2 X^3 + X^4)
      const double l2 = std::pow(lambda(*o.tau, p), 2);
      const double c1 = l2;
      const double c2 = l2 * c1 - (2 * l2 - 2);
      const double c3 = l2 * c2 - (2 * l2 - 2) * c1 + l2;
      CHECK(t.at(p) == doctest::Approx(c1).epsilon(1e-12));
      if (std::uint64_t(p) * p <= 20000) CHECK(t.at(std::uint64_t(p) * p) == doctest::Approx(c2).epsilon(1e-10));
      if (std::uint64_t(p) * p * p <= 20000)
        CHECK(t.at(std::uint64_t(p) * p * p) == doctest::Approx(c3).epsilon(1e-10));
      CHECK(t.at(p) >= 0.0);
    }
    CHECK(t.nonneg());
    CHECK(CoeffTable::all_nonneg(t.values()));
  }

  TEST_CASE("RS_DELTA prime-power hook agrees with the root expansion") {
    TestbedOptions o;
    o.tau_cap = 2000;
    const auto spec = make_testbed(TestbedId::parse("rs_delta"), o);
    REQUIRE(static_cast<bool>(spec.prime_power_coeffs));
    for (std::uint64_t p : {2, 3, 5, 7, 101, 997, 1999}) {
      const auto direct = spec.prime_power_coeffs(p, 6);
      const SatakeSet s = spec.local_factor(p);
      const auto roots = local_coeffs(s.roots, 6);
      for (int e = 1; e <= 6; ++e) CHECK(std::abs(direct[e - 1] - roots[e].real()) <= 1e-12 * (1 + std::abs(direct[e - 1])));
    }
  }

  TEST_CASE("RS_DELTA beyond the tau cap is a resource error") {
    auto spec = make_testbed(TestbedId::parse("rs_delta"), {500, nullptr});
    try {
      multiplicative_sieve(spec, 1000);
      FAIL("expected a resource error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::resource_exhausted);
    }
  }

  TEST_CASE("conjugate-closed shifts give real coefficients") {
    // The sieve rejects imaginary parts above 1e-10 relative; success is the check.
    for (double t0 : {0.25, 1.0, 3.7}) {
      auto t = multiplicative_sieve(make_testbed(TestbedId::parse("eisenstein", {0.0, t0, -t0})), 20000);
      CHECK(t.cutoff() == 20000);
    }
  }
}
