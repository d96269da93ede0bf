#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "rz/error.hpp"
#include "rz/numeric.hpp"
#include "rz/perron.hpp"
#include "rz/riesz.hpp"
#include "rz/testbeds.hpp"
#include "rz/zeta.hpp"

using namespace rz;

namespace {

cplx quad(double y, int k, double c, double T) {
  KernelParams p{y, k, c, T};
  return kernel_quad(p, 2 * required_panels(p));
}

LSeriesSpec tb(const char* name, std::vector<double> shifts = {}) { return make_testbed(TestbedId::parse(name, shifts)); }

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly).slope;
}

}  // namespace

TEST_SUITE("perron") {
  TEST_CASE("kernel_closed") {
    for (int k = 1; k <= 5; ++k) CHECK(kernel_closed(1.0, k) == 0.0);
    CHECK(kernel_closed(0.3, 2) == 0.0);
    CHECK(kernel_closed(2.0, 1) == 0.5);
    CHECK(kernel_closed(1e12, 3) == doctest::Approx(1.0 / 6));
    CHECK_THROWS_AS(kernel_closed(2.0, 0), Error);
  }

  TEST_CASE("kernel_quad within the truncation bound") {
    const double c = 1.1, T = 200;
    const int k = 2;
    CHECK(std::abs(quad(2.0, k, c, T) - 0.125) <= std::pow(4.0, k) * std::pow(2.0, c) / std::pow(T, k));
    CHECK(std::abs(quad(0.5, k, c, T)) <= std::pow(4.0, k) / std::pow(T, k));
  }

  TEST_CASE("y = 1 decays like 1/T") {
    std::vector<double> Ts, errs;
    for (double T = 100; T <= 1600; T *= 2) {
      Ts.push_back(T);
      errs.push_back(std::abs(quad(1.0, 1, 1.05, T)));
    }
    CHECK(slope(Ts, errs) == doctest::Approx(-1.0).epsilon(0.05));
  }

  TEST_CASE("small y branch stays under the y = 1 bound") {
    for (double y : {0.9, 0.5, 0.1, 0.01})
      for (double T : {50.0, 200.0, 800.0})
        for (int k = 1; k <= 3; ++k) CHECK(std::abs(quad(y, k, 1.05, T)) <= std::pow(4.0, k) / std::pow(T, k));
  }

  TEST_CASE("resolution refusal and determinism") {
    KernelParams p{10.0, 2, 1.05, 3200};
    const int need = required_panels(p);
    CHECK(need >= 64);
    try {
      kernel_quad(p, need - 1);
      FAIL("expected a resolution error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::resolution);
    }
    CHECK_THROWS_AS(kernel_quad({2.0, 0, 1.05, 100}, 200), Error);
    const cplx a = kernel_quad(p, need, 1), b = kernel_quad(p, need, 4);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == b.imag());
  }

  TEST_CASE("truncation_scan stays under the tail bound") {
    std::vector<double> Tg;
    for (int j = 0; j <= 5; ++j) Tg.push_back(100.0 * (1 << j));
    const auto cells = truncation_scan({0.5, 2.0, 10.0}, {1, 2, 3, 4}, 1.05, Tg, 2);
    CHECK(cells.size() == 12);
    for (const auto& cell : cells) {
      CHECK(cell.T.size() == Tg.size());
      // |tail| <= y^c / (pi k T^k) from |weight| <= |t|^-(k+1) off the real axis
      for (std::size_t i = 0; i < cell.T.size(); ++i)
        CHECK(cell.abs_error[i] <= std::pow(cell.y, 1.05) / (M_PI * cell.k * std::pow(cell.T[i], cell.k)));
    }
    // same y-independent rate for fixed k
    const auto& a = cells[1 * 3 + 1];  // y = 2, k = 2
    const auto& b = cells[1 * 3 + 2];  // y = 10, k = 2
    REQUIRE(a.k == 2);
    REQUIRE(b.y == 10.0);
    CHECK(std::abs(a.slope - b.slope) <= 0.5);

    CHECK_THROWS_AS(truncation_scan({2.0}, {1}, 1.05, {100, 200, 400, 800}), Error);
    CHECK_THROWS_AS(truncation_scan({2.0}, {1}, 1.05, {100, 150, 300, 600, 1200}), Error);
  }

  TEST_CASE("contour around the pole recovers the residue term") {
    ContourParams p;
    p.x = 50;
    p.k = 2;
    p.c = 1.2;
    p.T = 60;
    p.left_sigma = 0.1;
    p.rel_tol = 1e-4;
    auto z = contour_residue_check(tb("zeta"), p);
    CHECK(z.passed);
    CHECK(std::abs(z.total - 50.0 / 6) <= 1e-4 * 50.0 / 6);
    CHECK(std::abs(z.total.imag()) <= 1e-6 * std::abs(z.total));

    p.rel_tol = 1e-3;
    auto e = contour_residue_check(tb("eisenstein", {0.0, 1.0, -1.0}), p);
    CHECK(e.passed);
    CHECK(e.other_pole_count == 2);
    CHECK(e.residue_main == doctest::Approx(std::norm(zeta(cplx(1, 1))) * 50.0 / 6).epsilon(1e-10));
  }

  TEST_CASE("contour value does not depend on the box") {
    const auto spec = tb("eisenstein", {0.0, 1.0, -1.0});
    ContourParams a, b;
    a.T = 5;
    a.left_sigma = 0.1;
    b.T = 23;
    b.left_sigma = 0.4;
    b.c = 1.3;
    auto ra = contour_residue_check(spec, a), rb = contour_residue_check(spec, b);
    const cplx na = ra.total - ra.other_residues, nb = rb.total - rb.other_residues;
    CHECK(std::abs(na - nb) <= (ra.quad_error_estimate + rb.quad_error_estimate) + 1e-9 * std::abs(na));
  }

  TEST_CASE("horizontal edges shrink as T grows") {
    const auto spec = tb("zeta");
    std::vector<double> Ts, sizes;
    for (double T : {10.0, 20.0, 40.0, 80.0}) {
      ContourParams p;
      p.T = T;
      auto r = contour_residue_check(spec, p);
      Ts.push_back(T);
      sizes.push_back(std::abs(r.horizontal_contrib.first) + std::abs(r.horizontal_contrib.second));
    }
    // integrand on the horizontals is O(T^-(k+1)) times the zeta growth
    CHECK(slope(Ts, sizes) <= -2.0);
  }

  TEST_CASE("contour refuses boxes through a pole") {
    ContourParams p;
    p.T = 5.0;
    try {
      contour_residue_check(tb("eisenstein", {0.0, 5.0, -5.0}), p);
      FAIL("expected a pole collision");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::pole_collision);
    }
  }

  TEST_CASE("right edge agrees with the Riesz mean up to the tail bound") {
    for (const char* name : {"zeta", "eisenstein"}) {
      const auto spec = tb(name, shifts_for(name));
      auto t = multiplicative_sieve(spec, 1000);
      for (double x : {50.0, 200.5, 1000.0}) {
        for (int k : {2, 3}) {
          ContourParams p;
          p.x = x;
          p.k = k;
          p.T = 60;
          auto r = contour_residue_check(spec, p);
          const double bound = std::pow(x, p.c) * std::pow(zeta(p.c).real(), double(spec.degree)) /
                               (M_PI * k * std::pow(p.T, k));
          CHECK(std::abs(r.integral_value - riesz_mean(t, x, k)) <= bound);
        }
      }
    }
  }
}
