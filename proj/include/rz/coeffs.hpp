#pragma once

// Dirichlet coefficients from local Euler factors.
//
// An L-function of degree d is described prime by prime through its local
// roots alpha_1..alpha_d; the coefficient at p^e is the complete homogeneous
// symmetric polynomial h_e(alpha), and coefficients are multiplicative.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rz/numeric.hpp"

namespace rz {

/// Local roots of an Euler factor at one prime.
struct SatakeSet {
  std::uint64_t prime = 2;
  std::vector<cplx> roots;

  std::size_t degree() const { return roots.size(); }
};

/// A degree-d L-function given by its local factors plus the analytic data
/// the experiments need.
struct LSeriesSpec {
  std::string label;
  std::size_t degree = 1;
  std::function<SatakeSet(std::uint64_t)> local_factor;
  /// Optional a(p^1..p^e_max) computed without the roots; the sieve prefers it
  /// where expanding the roots would cancel.
  std::function<std::vector<double>(std::uint64_t p, int e_max)> prime_power_coeffs;
  int pole_order_at_1 = 1;
  std::optional<double> residue_hint;
  /// L(s) = prod_i zeta(s - shift_i) when present; every entry has zero real part.
  std::optional<std::vector<cplx>> shifts;
  /// Growth exponent d/2 of the convexity bound.
  double critical_exponent = 0.5;
  /// Coefficients are expected to be non-negative; verified when sieving.
  bool nonneg_expected = false;
  /// Largest prime whose local factor is available (nullopt: unbounded).
  std::optional<std::uint64_t> prime_limit;
  /// When set, L(s) = zeta(s) * cofactor(s) with the cofactor entire.
  std::shared_ptr<const LSeriesSpec> cofactor;

  /// Throws when the invariants (root counts, shift real parts) fail at p.
  void validate_at(std::uint64_t p) const;
};

/// Coefficients a(1..cutoff) of a Dirichlet series.
class CoeffTable {
 public:
  CoeffTable() = default;
  CoeffTable(std::vector<double> values, bool nonneg, std::string source_label);

  std::uint64_t cutoff() const { return values_.size(); }
  double at(std::uint64_t m) const { return values_[m - 1]; }
  std::span<const double> values() const { return values_; }
  bool nonneg() const { return nonneg_; }
  const std::string& source_label() const { return label_; }

  /// True when every value is >= -slack.
  static bool all_nonneg(std::span<const double> values, double slack = 1e-9);

 private:
  std::vector<double> values_;
  bool nonneg_ = false;
  std::string label_;
};

/// h_0..h_{e_max} of the roots, by multiplying geometric series one root at a time.
std::vector<cplx> local_coeffs(std::span<const cplx> roots, int e_max);

/// Local roots of the Rankin-Selberg square: all alpha_i * conj(alpha_j).
SatakeSet rankin_square(const SatakeSet& s);

/// Prime table with the index of the smallest prime factor of every m <= limit.
class SpfSieve {
 public:
  explicit SpfSieve(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }
  /// Index into primes() of the smallest prime factor of m (m >= 2).
  std::uint32_t spf_index(std::uint64_t m) const { return spf_idx_[m]; }
  bool is_prime(std::uint64_t m) const { return m >= 2 && primes_[spf_idx_[m]] == m; }

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> spf_idx_;
};

struct SieveOptions {
  unsigned workers = 0;                       // 0: hardware concurrency
  std::uint64_t max_cutoff = 10'000'000;      // memory budget
};

/// a(m) = prod over p^e || m of local_coeffs(local_factor(p), e)[e].
CoeffTable multiplicative_sieve(const LSeriesSpec& spec, std::uint64_t cutoff,
                                const SieveOptions& opts = {});

/// Dirichlet convolution; both tables must share a cutoff.
CoeffTable dirichlet_convolve(const CoeffTable& a, const CoeffTable& b);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);

/// RZC1 cache format; see README for the byte layout.
void save_table(const CoeffTable& t, const std::filesystem::path& path);
CoeffTable load_table(const std::filesystem::path& path);

/// Exact-integer variant of the cache (flag bit 1), used for tau tables.
void save_exact_table(std::span<const __int128> values, const std::string& label,
                      const std::filesystem::path& path);
std::vector<__int128> load_exact_table(const std::filesystem::path& path, std::string* label = nullptr);

}  // namespace rz
