#pragma once

#include "rz/numeric.hpp"

namespace rz {

struct EvalResult {
  cplx value;
  double abs_error_estimate = 0.0;
};

/// Euler-Maclaurin parameters: N summed terms, M Bernoulli correction terms.
struct ZetaParams {
  int n_terms = 0;  // 0: auto, max(20, ceil(2|Im s|))
  int m_terms = 8;  // at most 12
};

/// Riemann zeta anywhere except s = 1. The error estimate is the size of the
/// first omitted correction plus a rounding allowance for the direct sum.
EvalResult zeta_em(cplx s, ZetaParams params = {});

/// Convenience: value only.
inline cplx zeta(cplx s) { return zeta_em(s).value; }

}  // namespace rz
