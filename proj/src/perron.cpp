#include "rz/perron.hpp"

#include <algorithm>
#include <cmath>

#include "rz/error.hpp"

namespace rz {

double kernel_closed(double y, int k) {
  require(y > 0.0, "kernel_closed: y must be positive");
  require(k >= 1, "kernel_closed: k must be at least 1");
  if (y <= 1.0) return 0.0;
  double fact = std::tgamma(static_cast<double>(k) + 1.0);
  return std::pow(1.0 - 1.0 / y, k) / fact;
}

cplx perron_weight(cplx s, int k) {
  cplx d = s;
  for (int j = 1; j <= k; ++j) d *= s + static_cast<double>(j);
  return 1.0 / d;
}

namespace {

void check_kernel(const KernelParams& p) {
  require(p.y > 0.0, "kernel: y must be positive");
  require(p.k >= 1, "kernel: k must be at least 1 (the 1/s kernel is not supported)");
  require(p.c > 0.0, "kernel: c must be positive");
  require(p.T >= 1.0, "kernel: T must be at least 1");
}

// Panel density on [0, T]: max(phase density, 2 / max(c, t)); F is its integral.
struct PanelDensity {
  double a, b = 2.0, c0, u_star;
  PanelDensity(const KernelParams& p) : a(std::abs(std::log(p.y)) * 4.0 / kPi), c0(p.c) {
    if (a == 0.0) u_star = INFINITY;
    else if (b / c0 <= a) u_star = 0.0;
    else u_star = b / a;
  }
  double G(double t) const { return t <= c0 ? b * t / c0 : b + b * std::log(t / c0); }
  double F(double t) const {
    return G(std::min(t, u_star)) + a * std::max(0.0, t - u_star);
  }
  double inverse(double level, double T) const {
    double lo = 0.0, hi = T;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * T; ++i) {
      double mid = 0.5 * (lo + hi);
      (F(mid) < level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

}  // namespace

int required_panels(const KernelParams& p) {
  check_kernel(p);
  PanelDensity d(p);
  return std::max(64, 2 * static_cast<int>(std::ceil(d.F(p.T))));
}

cplx kernel_quad(const KernelParams& p, int panels, unsigned workers) {
  check_kernel(p);
  const int need = required_panels(p);
  if (panels < need)
    fail(Errc::resolution, "kernel_quad: " + std::to_string(panels) + " panels cannot resolve the phase T log y; need " +
                               std::to_string(need));
  const int half = (panels + 1) / 2;
  PanelDensity d(p);
  const double total = d.F(p.T);
  std::vector<double> edge(half + 1);
  edge[0] = 0.0;
  edge[half] = p.T;
  for (int j = 1; j < half; ++j) edge[j] = d.inverse(total * j / half, p.T);

  const double log_y = std::log(p.y);
  auto f = [&](double t) {
    cplx s(p.c, t);
    return std::exp(s * log_y) * perron_weight(s, p.k) / (2.0 * kPi);
  };
  // Panels ordered from -T to T.
  std::vector<cplx> parts(2 * static_cast<std::size_t>(half));
  parallel_chunks(parts.size(), workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      if (i < static_cast<std::size_t>(half)) {
        std::size_t j = half - 1 - i;
        parts[i] = gl16(std::function<cplx(double)>(f), -edge[j + 1], -edge[j]);
      } else {
        std::size_t j = i - half;
        parts[i] = gl16(std::function<cplx(double)>(f), edge[j], edge[j + 1]);
      }
    }
  });
  return pairwise_sum(parts);
}

std::vector<TruncationCell> truncation_scan(const std::vector<double>& ys, const std::vector<int>& ks,
                                            double c, const std::vector<double>& T_grid,
                                            unsigned workers) {
  require(T_grid.size() >= 5, "truncation_scan: T grid needs at least 5 points");
  for (std::size_t i = 1; i < T_grid.size(); ++i)
    require(T_grid[i] >= 2.0 * T_grid[i - 1] * (1.0 - 1e-12),
            "truncation_scan: T grid must be geometric with ratio >= 2");
  std::vector<TruncationCell> cells;
  for (int k : ks) {
    for (double y : ys) {
      TruncationCell cell;
      cell.y = y;
      cell.k = k;
      cell.T = T_grid;
      const double exact = kernel_closed(y, k);
      std::vector<double> lx, ly;
      for (double T : T_grid) {
        KernelParams p{y, k, c, T};
        cplx v = kernel_quad(p, 2 * required_panels(p), workers);
        double err = std::abs(v - exact);
        cell.abs_error.push_back(err);
        if (err >= kTruncationFloor) {
          lx.push_back(std::log(T));
          ly.push_back(std::log(err));
        }
      }
      cell.points_used = lx.size();
      if (lx.size() < 3) {
        cell.saturated = true;
      } else {
        LineFit lf = fit_line(lx, ly);
        cell.slope = lf.slope;
        cell.intercept = lf.intercept;
        cell.residual = lf.residual;
        cell.in_contract = std::abs(cell.slope + k) <= 0.5;
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

namespace {

double dist_to_segment(cplx z, cplx a, cplx b) {
  cplx d = b - a;
  double t = std::clamp(((z - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

struct PathIntegral {
  cplx value;
  double error = 0.0;
};

// (1/2 pi i) int_a^b F(s) ds along a straight segment with panels graded by
// the distance to the nearest pole and the local oscillation rate.
PathIntegral integrate_segment(const std::function<cplx(cplx)>& F, cplx a, cplx b,
                               const std::vector<cplx>& poles,
                               const std::function<double(cplx)>& rate) {
  const double len = std::abs(b - a);
  const cplx dir = (b - a) / len;
  std::vector<double> edges{0.0};
  double u = 0.0;
  while (u < len) {
    cplx s = a + u * dir;
    double dist = INFINITY;
    for (const cplx& p : poles) dist = std::min(dist, std::abs(s - p));
    double h = std::min(0.25 * kPi / rate(s), std::max(0.5 * dist, 1e-9));
    u = (len - u <= h * 1.0001) ? len : u + h;
    edges.push_back(u);
  }
  auto g = [&](double v) { return F(a + v * dir); };
  std::function<cplx(double)> gf = g;
  std::vector<cplx> coarse(edges.size() - 1), fine(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1], mid = 0.5 * (lo + hi);
    coarse[i] = gl16(gf, lo, hi);
    fine[i] = gl16(gf, lo, mid) + gl16(gf, mid, hi);
  }
  const cplx scale = dir / cplx(0.0, 2.0 * kPi);
  PathIntegral r;
  r.value = pairwise_sum(fine) * scale;
  r.error = std::abs((pairwise_sum(fine) - pairwise_sum(coarse)) * scale);
  return r;
}

}  // namespace

ContourReport contour_residue_check(const LSeriesSpec& spec, const ContourParams& p) {
  if (!analytic_evaluable(spec))
    fail(Errc::invalid_argument, spec.label + ": contour check needs an analytic evaluator");
  require(p.x > 0.0, "contour: x must be positive");
  require(p.k >= 1, "contour: k must be at least 1");
  require(p.T >= 1.0, "contour: T must be at least 1");
  require(p.left_sigma < 1.0 && 1.0 < p.c, "contour: need left_sigma < 1 < c");
  ResidueChoice C = choose_residue(spec);

  std::vector<cplx> poles;
  for (const cplx& l : *spec.shifts) {
    cplx q = 1.0 + l;
    bool seen = std::any_of(poles.begin(), poles.end(), [&](cplx o) { return std::abs(o - q) < 1e-12; });
    if (!seen) poles.push_back(q);
  }
  for (int j = 0; j <= p.k; ++j) poles.emplace_back(-static_cast<double>(j), 0.0);

  const cplx c0(p.c, -p.T), c1(p.c, p.T), l1(p.left_sigma, p.T), l0(p.left_sigma, -p.T);
  for (const cplx& q : poles) {
    double d = std::min({dist_to_segment(q, c0, c1), dist_to_segment(q, c1, l1),
                         dist_to_segment(q, l1, l0), dist_to_segment(q, l0, c0)});
    if (d < 1e-3)
      fail(Errc::pole_collision, "contour passes within 1e-3 of the pole at " + format_double(q.real()) +
                                     (q.imag() >= 0 ? "+" : "") + format_double(q.imag()) + "i");
  }

  const double log_x = std::log(p.x);
  const int k = p.k;
  auto F = [&](cplx s) { return lfun_eval(spec, s).value * std::exp(s * log_x) * perron_weight(s, k); };
  const double deg = static_cast<double>(spec.degree);
  auto rate = [&](cplx s) { return std::abs(log_x) + deg * std::log(2.0 + std::abs(s.imag())) + 1.0; };

  PathIntegral right = integrate_segment(F, c0, c1, poles, rate);
  PathIntegral top = integrate_segment(F, c1, l1, poles, rate);
  PathIntegral left = integrate_segment(F, l1, l0, poles, rate);
  PathIntegral bottom = integrate_segment(F, l0, c0, poles, rate);

  ContourReport r;
  r.x = p.x;
  r.k = p.k;
  r.c = p.c;
  r.T = p.T;
  r.left_sigma = p.left_sigma;
  r.integral_value = right.value;
  r.horizontal_contrib = {top.value, bottom.value};
  r.left_contrib = left.value;
  r.total = right.value + top.value + left.value + bottom.value;
  r.quad_error_estimate = right.error + top.error + left.error + bottom.error;
  r.residue_constant = C.value;
  r.residue_source = C.source;
  r.residue_main = C.value * p.x / std::tgamma(static_cast<double>(p.k) + 2.0);

  // Remaining enclosed poles: small-circle trapezoid rule.
  auto inside = [&](cplx q) {
    return q.real() > p.left_sigma && q.real() < p.c && std::abs(q.imag()) < p.T;
  };
  cplx others = 0.0;
  for (const cplx& q : poles) {
    if (std::abs(q - 1.0) < 1e-12 || !inside(q)) continue;
    double rad = 0.25;
    for (const cplx& o : poles)
      if (o != q) rad = std::min(rad, 0.5 * std::abs(o - q));
    rad = std::min({rad, 0.5 * (q.real() - p.left_sigma), 0.5 * (p.c - q.real()),
                    0.5 * (p.T - std::abs(q.imag()))});
    constexpr int n = 128;
    std::vector<cplx> terms(n);
    for (int i = 0; i < n; ++i) {
      cplx e = std::polar(1.0, 2.0 * kPi * i / n);
      terms[i] = F(q + rad * e) * e;
    }
    others += pairwise_sum(terms) * (rad / n);
    ++r.other_pole_count;
  }
  r.other_residues = others;
  r.rel_error = std::abs(r.total - r.residue_main - others) / std::abs(r.residue_main);
  r.passed = r.rel_error <= p.rel_tol;
  return r;
}

}  // namespace rz
