#pragma once

// Averaging reduction: from the mean B(x) = (1/x) int_1^x A(t) dt of a
// monotone A back to A itself through difference-quotient sandwich bounds,
// and the descending chain from a k1-th Riesz mean to plain partial sums.

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rz/coeffs.hpp"

namespace rz {

class MeanFunction {
 public:
  enum class Kind { step_sum, riesz, synthetic };

  /// A(t) = sum_{m <= t} a(m), right-closed at the jumps.
  static MeanFunction step_sum(std::shared_ptr<const CoeffTable> t);
  /// A(t) = S_k(t) from the table.
  static MeanFunction riesz(std::shared_ptr<const CoeffTable> t, int k);
  /// A(t) = sum_i coef_i t^{exp_i}, with a closed-form average.
  static MeanFunction power_sum(std::vector<std::pair<double, double>> coef_exp);
  /// Arbitrary evaluator; averaged by adaptive Simpson.
  static MeanFunction custom(std::function<double(double)> f, double domain_max, bool monotone,
                             std::string id);

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  double domain_max() const { return domain_max_; }
  /// A is known to be non-decreasing on its domain.
  bool monotone() const { return monotone_; }
  const std::string& id() const { return id_; }
  const CoeffTable* table() const { return table_.get(); }
  int k() const { return k_; }
  const std::vector<std::pair<double, double>>& terms() const { return terms_; }

 private:
  Kind kind_ = Kind::synthetic;
  std::shared_ptr<const CoeffTable> table_;
  int k_ = 0;
  std::vector<std::pair<double, double>> terms_;
  std::function<double(double)> custom_;
  double domain_max_ = 0.0;
  bool monotone_ = false;
  std::string id_;
};

/// int_m^x (1 - m/t)^j dt for 1 <= m <= x.
double riesz_weight_integral(int j, double m, double x);

/// B(x) = (1/x) int_1^x A(t) dt.
double average_transform(const MeanFunction& A, double x);

struct Sandwich {
  double lower = 0.0;
  double upper = 0.0;
  double midpoint() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

/// upper = ((x+d)B(x+d) - xB(x))/d, lower = (xB(x) - (x-d)B(x-d))/d.
Sandwich sandwich_bounds(const std::function<double(double)>& B, double x, double delta,
                         double domain_max = INFINITY);
/// Same with B = average_transform(A, .).
Sandwich sandwich_bounds(const MeanFunction& A, double x, double delta);

/// E(x) = scale * x^exponent; the reduction chain takes square roots level by level.
struct ELaw {
  double scale = 10.0;
  double exponent = 1.0;
  double operator()(double x) const;
  ELaw sqrt() const { return {std::sqrt(scale), 0.5 * exponent}; }
};

struct CascadeLevel {
  int level = 0;
  ELaw E;
  std::vector<double> x;
  std::vector<double> lower, upper, exact;
  double fitted_width_exponent = 0.0;
  double predicted_width_exponent = 0.0;  // 1 - E.exponent / 2
  bool bracketed = true;                   // lower <= A <= upper at every x
  std::size_t clamped = 0;                 // points where delta hit x/2; left out of the fit
};

/// Sandwich widths of A from B at successive levels of the E cascade.
std::vector<CascadeLevel> width_cascade(const MeanFunction& A, const std::vector<double>& x_grid,
                                        ELaw E1, int levels, double delta_factor = 2.0);

struct ChainOptions {
  double delta_factor = 2.0;
  ELaw E1{10.0, 1.0};
  double reference_x = 0.0;  // 0: last grid point
  unsigned workers = 0;
};

struct ReductionLevel {
  int k = 0;                     // Riesz exponent of the object estimated at this level
  double c_est = 0.0;            // sandwich midpoint / x at the reference point
  std::string delta_used;        // rule that produced delta
  double sandwich_width_at_ref_x = 0.0;
  double identity_discrepancy_at_ref_x = 0.0;  // midpoint - direct value
  double direct_coefficient = 0.0;             // direct value / x at the reference point
  double cascade_c_est = 0.0;    // iterated sandwich starting from the top mean only
  double predicted_cascade = 0.0;    // 2^j C / (k1+1)!
  double predicted_residue = 0.0;  // C / (k1! (k + 1))
  bool inverted = false;           // upper < lower somewhere on the grid
  bool bracketed = true;           // lower <= direct <= upper on the whole grid
  double width_exponent = 0.0;
  // per grid point
  std::vector<double> x, lower, upper, direct;
};

struct ReductionTrace {
  int k1 = 0;
  double C = 0.0;
  double reference_x = 0.0;
  std::vector<ReductionLevel> levels;  // k = k1 down to 0
  double level0_coefficient = 0.0;          // k1! * c_est at the last level
  double level0_cascade_coefficient = 0.0;  // k1! * cascade_c_est at the last level
  double direct_partial_sum_coefficient = 0.0;  // sum_{m <= x} a(m) / x
  double cascade_alternative = 0.0;               // 2^k1 C / (k1 + 1)
};

/// Largest argument chain_reduce touches for a given x; the table must reach it.
double chain_extent(double x, int k1, const ChainOptions& opts = {});

ReductionTrace chain_reduce(const CoeffTable& t, int k1, double C, const std::vector<double>& x_grid,
                            const ChainOptions& opts = {});

struct IdentityProbe {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// lhs = S_k(x); rhs = (1/x) int_1^x sum_{m <= t} a(m)/k! (1 - m/t)^{k-1} dt.
IdentityProbe identity_probe(const CoeffTable& t, double x, int k);

}  // namespace rz
