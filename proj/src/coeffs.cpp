#include "rz/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rz/error.hpp"

namespace rz {

void LSeriesSpec::validate_at(std::uint64_t p) const {
  SatakeSet s = local_factor(p);
  if (s.degree() != degree)
    fail(Errc::contract_violation, label + ": local factor at p=" + std::to_string(p) +
                                       " has " + std::to_string(s.degree()) +
                                       " roots, expected " + std::to_string(degree));
  if (shifts) {
    if (shifts->size() != degree) fail(Errc::contract_violation, label + ": shift count != degree");
    for (const cplx& l : *shifts)
      if (std::abs(l.real()) > 1e-12)
        fail(Errc::contract_violation, label + ": shift with non-zero real part");
  }
}

CoeffTable::CoeffTable(std::vector<double> values, bool nonneg, std::string source_label)
    : values_(std::move(values)), nonneg_(nonneg), label_(std::move(source_label)) {
  require(!values_.empty(), "CoeffTable: cutoff must be at least 1");
}

bool CoeffTable::all_nonneg(std::span<const double> values, double slack) {
  return std::all_of(values.begin(), values.end(), [slack](double v) { return v >= -slack; });
}

std::vector<cplx> local_coeffs(std::span<const cplx> roots, int e_max) {
  require(e_max >= 0, "local_coeffs: e_max must be non-negative");
  std::vector<cplx> c(static_cast<std::size_t>(e_max) + 1, cplx(0.0));
  c[0] = 1.0;
  // Multiply by 1/(1 - alpha t) = sum alpha^j t^j, in place.
  for (const cplx& alpha : roots)
    for (int e = 1; e <= e_max; ++e) c[e] += alpha * c[e - 1];
  return c;
}

SatakeSet rankin_square(const SatakeSet& s) {
  SatakeSet out;
  out.prime = s.prime;
  out.roots.reserve(s.roots.size() * s.roots.size());
  for (const cplx& a : s.roots)
    for (const cplx& b : s.roots) out.roots.push_back(a * std::conj(b));
  return out;
}

SpfSieve::SpfSieve(std::uint64_t limit) : limit_(limit) {
  require(limit < std::numeric_limits<std::uint32_t>::max(), "SpfSieve: limit too large");
  constexpr std::uint32_t unset = std::numeric_limits<std::uint32_t>::max();
  spf_idx_.assign(limit + 1, unset);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_idx_[i] == unset) {
      spf_idx_[i] = static_cast<std::uint32_t>(primes_.size());
      primes_.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint32_t cap = spf_idx_[i];
    for (std::uint32_t j = 0; j <= cap && j < primes_.size(); ++j) {
      std::uint64_t q = i * primes_[j];
      if (q > limit) break;
      spf_idx_[q] = j;
    }
  }
}

CoeffTable multiplicative_sieve(const LSeriesSpec& spec, std::uint64_t cutoff,
                                const SieveOptions& opts) {
  require(cutoff >= 1, "multiplicative_sieve: cutoff must be at least 1");
  if (cutoff > opts.max_cutoff)
    fail(Errc::resource_exhausted, "multiplicative_sieve: cutoff " + std::to_string(cutoff) +
                                       " exceeds memory budget " +
                                       std::to_string(opts.max_cutoff));
  require(static_cast<bool>(spec.local_factor), "multiplicative_sieve: spec has no local factor");

  SpfSieve sieve(std::max<std::uint64_t>(cutoff, 2));
  const auto& primes = sieve.primes();
  std::size_t np = 0;
  while (np < primes.size() && primes[np] <= cutoff) ++np;
  if (np > 0 && spec.prime_limit && primes[np - 1] > *spec.prime_limit)
    fail(Errc::resource_exhausted, spec.label + ": local factors available only up to p=" +
                                       std::to_string(*spec.prime_limit) + ", cutoff " +
                                       std::to_string(cutoff) + " needs more");

  // Prime-power coefficient storage: offset[i] .. offset[i+1] holds e = 1..e_max(p_i).
  std::vector<std::size_t> offset(np + 1, 0);
  for (std::size_t i = 0; i < np; ++i) {
    std::uint64_t p = primes[i], pe = p;
    std::size_t e_max = 1;
    while (pe <= cutoff / p) {
      pe *= p;
      ++e_max;
    }
    offset[i + 1] = offset[i] + e_max;
  }
  std::vector<double> pp(offset[np]);
  parallel_chunks(np, opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint64_t p = primes[i];
      SatakeSet s = spec.local_factor(p);
      if (s.degree() != spec.degree)
        fail(Errc::contract_violation, spec.label + ": wrong local degree at p=" + std::to_string(p));
      const int e_max = static_cast<int>(offset[i + 1] - offset[i]);
      if (spec.prime_power_coeffs) {
        const std::vector<double> direct = spec.prime_power_coeffs(p, e_max);
        if (direct.size() != static_cast<std::size_t>(e_max))
          fail(Errc::contract_violation, spec.label + ": prime_power_coeffs length at p=" + std::to_string(p));
        std::copy(direct.begin(), direct.end(), pp.begin() + static_cast<std::ptrdiff_t>(offset[i]));
        continue;
      }
      std::vector<cplx> c = local_coeffs(s.roots, e_max);
      for (int e = 1; e <= e_max; ++e) {
        if (std::abs(c[e].imag()) > 1e-10 * std::max(1.0, std::abs(c[e])))
          fail(Errc::contract_violation, spec.label + ": non-real coefficient at p=" +
                                             std::to_string(p) + "^" + std::to_string(e));
        pp[offset[i] + e - 1] = c[e].real();
      }
    }
  });

  std::vector<double> values(cutoff);
  parallel_chunks(cutoff, opts.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      std::uint64_t m = idx + 1;
      double a = 1.0;
      while (m > 1) {
        const std::uint32_t pi = sieve.spf_index(m);
        const std::uint64_t p = primes[pi];
        int e = 0;
        while (m % p == 0) {
          m /= p;
          ++e;
        }
        a *= pp[offset[pi] + e - 1];
      }
      values[idx] = a;
    }
  });

  bool nonneg = CoeffTable::all_nonneg(values);
  if (spec.nonneg_expected && !nonneg)
    fail(Errc::contract_violation, spec.label + ": coefficients expected non-negative but a negative value was found");
  return CoeffTable(std::move(values), nonneg, spec.label);
}

CoeffTable dirichlet_convolve(const CoeffTable& a, const CoeffTable& b) {
  if (a.cutoff() != b.cutoff())
    fail(Errc::invalid_argument, "dirichlet_convolve: cutoff mismatch (" +
                                     std::to_string(a.cutoff()) + " vs " +
                                     std::to_string(b.cutoff()) + ")");
  const std::uint64_t x = a.cutoff();
  std::vector<double> c(x, 0.0);
  for (std::uint64_t d = 1; d <= x; ++d) {
    const double ad = a.at(d);
    if (ad == 0.0) continue;
    for (std::uint64_t e = 1; d * e <= x; ++e) c[d * e - 1] += ad * b.at(e);
  }
  bool nonneg = CoeffTable::all_nonneg(c);
  return CoeffTable(std::move(c), nonneg, a.source_label() + "*" + b.source_label());
}

}  // namespace rz
