#pragma once

// Concrete L-functions with independently computable coefficients: zeta,
// zeta^2, shifted zeta products, and Rankin-Selberg squares of the Ramanujan
// Delta form and of shifted zeta products.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rz/coeffs.hpp"

namespace rz {

enum class TestbedKind { zeta, zeta_squared, eisenstein, rs_delta, rs_eisenstein };

struct TestbedId {
  TestbedKind kind = TestbedKind::zeta;
  /// Imaginary parts t_i of the shifts lambda_i = i t_i (eisenstein kinds only).
  std::vector<double> shift_imag;

  std::string label() const;
  /// Accepts zeta, zeta2, eisenstein, rs_delta, rs_eisenstein.
  static TestbedId parse(const std::string& name, std::vector<double> shift_imag = {});
};

using TauTable = std::vector<__int128>;  // tau(1..N) at index 0..N-1

/// tau(1..n) from n f_n = -24 sum_{j<=n} sigma_1(j) f_{n-j}, exact 128-bit
/// arithmetic. Throws Errc::overflow if an intermediate leaves the range.
TauTable tau_table(std::uint64_t n);

/// Sum of divisors sigma_1(1..n) by a divisor-sum sieve.
std::vector<std::uint64_t> sigma1_table(std::uint64_t n);

/// Deligne-normalized local roots at p: alpha + beta = tau_p p^{-11/2},
/// alpha beta = 1. Conjugate pair if the discriminant is negative, real
/// reciprocal pair otherwise.
SatakeSet normalize_hecke(std::uint64_t p, __int128 tau_p);

struct TestbedOptions {
  std::uint64_t tau_cap = 20'000;
  /// Precomputed tau table; computed up to tau_cap when absent.
  std::shared_ptr<const TauTable> tau;
};

LSeriesSpec make_testbed(const TestbedId& id, const TestbedOptions& opts = {});

}  // namespace rz
