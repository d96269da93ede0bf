#include <functional>
#include <cmath>

#include "doctest.h"
#include "rz/error.hpp"
#include "rz/numeric.hpp"

using namespace rz;

TEST_SUITE("numeric") {
  TEST_CASE("pairwise_sum") {
    std::vector<double> v(1000);
    for (int i = 0; i < 1000; ++i) v[i] = i + 1;
    CHECK(pairwise_sum(v) == 500500.0);
    CHECK(pairwise_sum(std::span<const double>()) == 0.0);
    std::vector<double> tiny(1 << 20, 0.1);
    CHECK(std::abs(pairwise_sum(tiny) - 0.1 * (1 << 20)) <= 1e-9);
  }

  TEST_CASE("parallel_chunks covers every index once") {
    for (unsigned w : {1u, 2u, 3u, 8u}) {
      std::vector<int> hits(1001, 0);
      parallel_chunks(hits.size(), w, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) ++hits[i];
      });
      for (int h : hits) REQUIRE(h == 1);
    }
    CHECK_THROWS_AS(parallel_chunks(10, 2, [](std::size_t, std::size_t) { fail(Errc::overflow, "x"); }), Error);
  }

  TEST_CASE("Gauss-Legendre 16 is exact to degree 31") {
    double wsum = 0.0;
    for (double w : GaussLegendre16::weights()) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
    for (int d = 0; d <= 31; ++d) {
      const double got = gl16(std::function<double(double)>([d](double x) { return std::pow(x, d); }), 0.0, 1.0);
      CHECK(got == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }

  TEST_CASE("adaptive_simpson") {
    CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1).epsilon(1e-10));
    CHECK(adaptive_simpson([](double x) { return std::sqrt(x); }, 0.0, 4.0) ==
          doctest::Approx(16.0 / 3).epsilon(1e-9));
  }

  TEST_CASE("fit_line") {
    std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.residual <= 1e-12);
    std::vector<double> same{2, 2};
    CHECK_THROWS_AS(fit_line(same, same), Error);
  }

  TEST_CASE("log_gamma against classical identities") {
    CHECK(std::exp(log_gamma(cplx(0.5))).real() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    for (double x : {0.1, 1.0, 2.5, 7.0, 30.0, 170.5})
      CHECK(log_gamma(cplx(x)).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    for (double y : {0.5, 1.0, 5.0, 40.0, 300.0}) {
      // |Gamma(iy)|^2 = pi / (y sinh(pi y))
      const double want = std::log(M_PI) - std::log(y) - (M_PI * y + std::log1p(-std::exp(-2 * M_PI * y)) - std::log(2.0));
      CHECK(2 * log_gamma(cplx(0, y)).real() == doctest::Approx(want).epsilon(1e-12));
    }
    // Gamma(z+1) = z Gamma(z) off the axis
    const cplx z(-2.3, 4.1);
    CHECK(std::abs(std::exp(log_gamma(z + 1.0) - log_gamma(z)) - z) <= 1e-12 * std::abs(z));
  }

  TEST_CASE("bernoulli and format_double") {
    CHECK(bernoulli_even(0) == 1.0);
    CHECK(bernoulli_even(1) == doctest::Approx(1.0 / 6));
    CHECK(bernoulli_even(2) == doctest::Approx(-1.0 / 30));
    CHECK(bernoulli_even(6) == doctest::Approx(-691.0 / 2730).epsilon(1e-14));
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e6) == "1e+06");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
    CHECK(format_double(NAN) == "nan");
  }
}
