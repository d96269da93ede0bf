#include <cmath>
#include <vector>

#include "rz/error.hpp"
#include "rz/zeta.hpp"

namespace rz {

EvalResult zeta_em(cplx s, ZetaParams params) {
  if (s == cplx(1.0, 0.0)) fail(Errc::pole_collision, "zeta_em: pole at s = 1");
  const int M = params.m_terms;
  require(M >= 0 && M <= 12, "zeta_em: M must lie in [0, 12]");
  int N = params.n_terms;
  if (N == 0) N = std::max(20, static_cast<int>(std::ceil(2.0 * std::abs(s.imag()))));
  require(N >= 2, "zeta_em: N must be at least 2");
  // Correction terms shrink like |s + 2j| / (2 pi N); past that point the
  // asymptotic series diverges before reaching useful accuracy.
  if (std::abs(s + cplx(2.0 * M + 1.0)) >= 2.0 * kPi * N)
    fail(Errc::non_convergence, "zeta_em: N too small for |s| and M");

  std::vector<cplx> terms(static_cast<std::size_t>(N) - 1);
  std::vector<double> mags(terms.size());
  for (int k = 1; k < N; ++k) {
    terms[k - 1] = std::exp(-s * std::log(static_cast<double>(k)));
    mags[k - 1] = std::abs(terms[k - 1]);
  }
  const double logN = std::log(static_cast<double>(N));
  const cplx n_pow = std::exp(-s * logN);  // N^{-s}
  cplx tail = n_pow * static_cast<double>(N) / (s - 1.0) + 0.5 * n_pow;

  // sum_j B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
  cplx rising = s;                          // s (s+1) ... (s+2j-2)
  cplx npow = n_pow / static_cast<double>(N);  // N^{-s-1}
  double fact = 2.0;                        // (2j)!
  cplx corr = 0.0;
  double omitted = 0.0;
  double corr_mag = 0.0;
  for (int j = 1; j <= M + 1; ++j) {
    cplx term = bernoulli_even(j) / fact * rising * npow;
    if (j <= M) {
      corr += term;
      corr_mag += std::abs(term);
    } else {
      omitted = std::abs(term);
    }
    rising *= (s + (2.0 * j - 1.0)) * (s + 2.0 * j);
    npow /= static_cast<double>(N) * N;
    fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
  }

  EvalResult r;
  r.value = pairwise_sum(terms) + tail + corr;
  // Each k^{-s} carries a relative phase error of about eps * |s| log k.
  const double eps = std::numeric_limits<double>::epsilon();
  const double mag = pairwise_sum(mags) + std::abs(tail) + corr_mag;
  r.abs_error_estimate = omitted + eps * (8.0 + 2.0 * std::abs(s) * logN) * mag;
  return r;
}

}  // namespace rz
