#include "sphens/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sphens/errors.hpp"

namespace sphens {

double log_gamma(double x) noexcept {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

namespace {

// log(n!) - log(sqrt(2 pi n) (n/e)^n).
double stirlerr(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    long double log_fact = 0.0L;
    for (int i = 2; i <= static_cast<int>(n); ++i) log_fact += std::log(static_cast<long double>(i));
    const long double ln = static_cast<long double>(n);
    const long double half_log_2pi = 0.5L * std::log(2.0L * std::numbers::pi_v<long double>);
    return static_cast<double>(log_fact - (ln + 0.5L) * std::log(ln) + ln - half_log_2pi);
  }
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x, accurate when x is close to np.
double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// Continued fraction of I_x(a, b) (modified Lentz); I_x(a,b) = front * cf.
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double md = m;
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw ConvergenceFailure("ConvergenceFailure: incomplete beta continued fraction");
}

double log1mexp(double log_x) {
  // log(1 - e^log_x) for log_x <= 0.
  return log_x > -std::numbers::ln2 ? std::log(-std::expm1(log_x)) : std::log1p(-std::exp(log_x));
}

}  // namespace

double log_binomial_pmf(std::size_t n, std::size_t k, double p) noexcept {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  if (k == 0) return nd * std::log1p(-p);
  if (k == n) return nd * std::log(p);
  const double kd = static_cast<double>(k);
  const double rest = nd - kd;
  const double lc = stirlerr(nd) - stirlerr(kd) - stirlerr(rest) - bd0(kd, nd * p) -
                    bd0(rest, nd * q);
  return lc + 0.5 * std::log(nd / (2.0 * std::numbers::pi * kd * rest));
}

LogTails binomial_log_tails(std::size_t n, double p, std::size_t k) {
  if (n == 0 || k >= n) throw DomainError("binomial tail: need 0 <= k <= n - 1");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial tail: probability must lie in [0, 1]");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (p == 0.0) return {0.0, neg_inf};
  if (p == 1.0) return {neg_inf, 0.0};

  // P(S > k) = I_p(k + 1, n - k).
  const double a = static_cast<double>(k + 1);
  const double b = static_cast<double>(n - k);
  if (p < (a + 1.0) / (a + b + 2.0)) {
    const double log_front = std::log1p(-p) + log_binomial_pmf(n, k + 1, p);
    const double log_upper = log_front + std::log(beta_continued_fraction(a, b, p));
    return {log1mexp(log_upper), log_upper};
  }
  // P(S <= k) = I_{1-p}(n - k, k + 1).
  const double log_front = std::log(p) + log_binomial_pmf(n, k, p);
  const double log_lower = log_front + std::log(beta_continued_fraction(b, a, 1.0 - p));
  return {log_lower, log1mexp(log_lower)};
}

long double harmonic_number(std::size_t n) noexcept {
  if (n <= 10000) {
    long double h = 0.0L;
    // Smallest terms first.
    for (std::size_t j = n; j >= 1; --j) h += 1.0L / static_cast<long double>(j);
    return h;
  }
  const long double x = static_cast<long double>(n);
  return std::log(x) + std::numbers::egamma_v<long double> + 1.0L / (2.0L * x) -
         1.0L / (12.0L * x * x);
}

}  // namespace sphens
