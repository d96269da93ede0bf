#include "rz/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <thread>

#include "rz/error.hpp"

namespace rz {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::out_of_domain: return "out_of_domain";
    case Errc::pole_collision: return "pole_collision";
    case Errc::pole_order: return "pole_order";
    case Errc::resolution: return "resolution";
    case Errc::non_convergence: return "non_convergence";
    case Errc::contract_violation: return "contract_violation";
    case Errc::resource_exhausted: return "resource_exhausted";
    case Errc::overflow: return "overflow";
    case Errc::malformed_header: return "malformed_header";
    case Errc::checksum_mismatch: return "checksum_mismatch";
    case Errc::version_mismatch: return "version_mismatch";
    case Errc::io: return "io";
  }
  return "unknown";
}

namespace {

template <typename T>
T pairwise_impl(const T* p, std::size_t n) {
  if (n <= 8) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_impl(p, half) + pairwise_impl(p + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_impl(v.data(), v.size()); }
cplx pairwise_sum(std::span<const cplx> v) { return pairwise_impl(v.data(), v.size()); }

unsigned default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_chunks(std::size_t n, unsigned workers,
                     const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  if (workers == 0) workers = default_workers();
  std::size_t chunks = std::min<std::size_t>(workers, n);
  if (chunks <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  std::exception_ptr first_error;
  std::vector<std::exception_ptr> errors(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t lo = n * c / chunks;
    std::size_t hi = n * (c + 1) / chunks;
    pool.emplace_back([&, lo, hi, c] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

struct GLTable {
  std::array<double, 16> x{};
  std::array<double, 16> w{};
  GLTable() {
    constexpr int n = 16;
    for (int i = 0; i < n / 2; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GLTable& gl_table() {
  static const GLTable table;
  return table;
}

}  // namespace

const std::array<double, 16>& GaussLegendre16::nodes() { return gl_table().x; }
const std::array<double, 16>& GaussLegendre16::weights() { return gl_table().w; }

double gl16(const std::function<double(double)>& f, double a, double b) {
  const auto& t = gl_table();
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 16; ++i) s += t.w[i] * f(mid + half * t.x[i]);
  return s * half;
}

cplx gl16(const std::function<cplx(double)>& f, double a, double b) {
  const auto& t = gl_table();
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  cplx s = 0.0;
  for (int i = 0; i < 16; ++i) s += t.w[i] * f(mid + half * t.x[i]);
  return s * half;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  // Seed with a coarse uniform pass so the tolerance is relative to the result.
  constexpr int seed_panels = 16;
  double h = (b - a) / seed_panels;
  std::vector<double> fx(2 * seed_panels + 1);
  for (int i = 0; i <= 2 * seed_panels; ++i) fx[i] = f(a + 0.5 * h * i);
  double coarse = 0.0;
  for (int i = 0; i < seed_panels; ++i)
    coarse += h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
  double tol = rel_tol * std::max(std::abs(coarse), 1e-300) / seed_panels;
  std::vector<double> parts(seed_panels);
  for (int i = 0; i < seed_panels; ++i) {
    double lo = a + h * i, hi = lo + h;
    double whole = h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
    parts[i] = simpson_step(f, lo, hi, fx[2 * i], fx[2 * i + 1], fx[2 * i + 2], whole, tol,
                            max_depth);
  }
  return pairwise_sum(parts);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_line: size mismatch");
  require(x.size() >= 2, "fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = pairwise_sum(x) / n;
  double my = pairwise_sum(y) / n;
  std::vector<double> sxx(x.size()), sxy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx[i] = (x[i] - mx) * (x[i] - mx);
    sxy[i] = (x[i] - mx) * (y[i] - my);
  }
  double vxx = pairwise_sum(sxx);
  require(vxx > 0.0, "fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = pairwise_sum(sxy) / vxx;
  fit.intercept = my - fit.slope * mx;
  std::vector<double> r2(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (fit.slope * x[i] + fit.intercept);
    r2[i] = r * r;
  }
  fit.residual = std::sqrt(pairwise_sum(r2) / n);
  fit.points = x.size();
  return fit;
}

double bernoulli_even(int j) {
  static const double table[] = {
      1.0,
      1.0 / 6.0,
      -1.0 / 30.0,
      1.0 / 42.0,
      -1.0 / 30.0,
      5.0 / 66.0,
      -691.0 / 2730.0,
      7.0 / 6.0,
      -3617.0 / 510.0,
      43867.0 / 798.0,
      -174611.0 / 330.0,
      854513.0 / 138.0,
      -236364091.0 / 2730.0,
      8553103.0 / 6.0,
      -23749461029.0 / 870.0,
      8615841276005.0 / 14322.0,
      -7709321041217.0 / 510.0,
      2577687858367.0 / 6.0,
      -26315271553053477373.0 / 1919190.0,
      2929993913841559.0 / 6.0,
      -261082718496449122051.0 / 13530.0,
  };
  require(j >= 0 && j <= 20, "bernoulli_even: index out of table");
  return table[j];
}

cplx log_gamma(cplx z) {
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    const cplx w = kPi * z;
    cplx log_s;
    if (std::abs(w.imag()) > 20.0) {
      // sin w = -e^{-iw} (1 - e^{2iw}) / 2i; evaluated in the half plane where e^{2iw} is small.
      const cplx wu = w.imag() > 0 ? w : std::conj(w);
      const cplx i(0.0, 1.0);
      log_s = -i * wu + std::log((1.0 - std::exp(2.0 * i * wu)) * i / 2.0);
      if (w.imag() < 0) log_s = std::conj(log_s);
    } else {
      const cplx s = std::sin(w);
      if (std::abs(s) == 0.0) fail(Errc::pole_collision, "log_gamma: pole of Gamma");
      log_s = std::log(s);
    }
    return std::log(kPi) - log_s - log_gamma(1.0 - z);
  }
  // Shift until |z| is large enough for 12 Stirling terms to reach double precision.
  cplx shift_log = 0.0;
  while (std::abs(z) < 18.0) {
    shift_log += std::log(z);
    z += 1.0;
  }
  cplx inv = 1.0 / z;
  cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx pw = inv;
  for (int j = 1; j <= 12; ++j) {
    series += bernoulli_even(j) / (2.0 * j * (2.0 * j - 1.0)) * pw;
    pw *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift_log;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace rz
