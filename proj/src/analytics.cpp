#include "sphens/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "sphens/compensated.hpp"
#include "sphens/errors.hpp"
#include "sphens/special.hpp"

namespace sphens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
}

void require_n(std::size_t n, std::size_t min_n) {
  if (n < min_n) throw DomainError("n must be at least " + std::to_string(min_n));
}

void require_area(double area) {
  if (!(area >= 0.0 && area <= 4.0 * kPi)) throw DomainError("area must lie in [0, 4pi]");
}

void require_x(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("x must be finite and non-negative");
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log P(Poisson(x) <= k) for k = 1..kmax, summed with positive terms only:
// the lower tail by incremental log-sum-exp, the upper tail by a backward suffix sum.
std::vector<double> poisson_log_lower(double x, std::size_t kmax) {
  std::vector<double> out(kmax + 1, 0.0);
  if (x == 0.0) return out;
  const double log_x = std::log(x);
  // Terms past jmax are below the double range and do not contribute.
  std::vector<double> log_pmf;
  for (std::size_t j = 0;; ++j) {
    const double jd = static_cast<double>(j);
    const double lp = -x + jd * log_x - log_gamma(jd + 1.0);
    log_pmf.push_back(lp);
    if (jd > x && lp < -760.0) break;
  }
  const std::size_t jmax = log_pmf.size() - 1;
  std::vector<double> upper(jmax + 2, 0.0);
  for (std::size_t j = jmax + 1; j-- > 0;) upper[j] = upper[j + 1] + std::exp(log_pmf[j]);
  double lower = kNegInf;
  for (std::size_t k = 0; k <= kmax; ++k) {
    if (k <= jmax) lower = log_add(lower, log_pmf[k]);
    const double up = k + 1 <= jmax ? upper[k + 1] : 0.0;
    out[k] = lower < -std::numbers::ln2 ? lower : std::log1p(-up);
  }
  return out;
}

double log_product_from(const std::vector<double>& log_factors, std::size_t first) {
  CompensatedSum sum;
  for (std::size_t k = first; k < log_factors.size(); ++k) sum.add(log_factors[k]);
  return sum.value();
}

}  // namespace

BinomialLaw::BinomialLaw(std::size_t n_, double alpha_) : n(n_), alpha(alpha_) {
  require_n(n_, 1);
  require_alpha(alpha_);
}

double binom_tail(const BinomialLaw& law, std::size_t k) {
  return std::exp(binomial_log_tails(law.n, law.alpha, k).log_upper);
}

double log_binom_lower(const BinomialLaw& law, std::size_t k) {
  return binomial_log_tails(law.n, law.alpha, k).log_lower;
}

double CountLaw::mean() const {
  CompensatedSum s;
  for (double p : probs) s.add(p);
  return s.value();
}

double CountLaw::variance() const {
  CompensatedSum s;
  for (double p : probs) s.add(p * (1.0 - p));
  return s.value();
}

CountLaw cap_count_law(std::size_t n, double alpha) {
  const BinomialLaw law(n, alpha);
  CountLaw out;
  out.probs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.probs.push_back(binom_tail(law, k));
  return out;
}

std::vector<double> cap_count_pmf(std::size_t n, double alpha) {
  const CountLaw law = cap_count_law(n, alpha);
  std::vector<double> pmf(n + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = law.probs[k];
    for (std::size_t j = k + 1; j >= 1; --j) pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
    pmf[0] *= 1.0 - p;
  }
  return pmf;
}

double count_variance_exact(std::size_t n, double alpha) {
  const BinomialLaw law(n, alpha);
  CompensatedSum s;
  for (std::size_t k = 0; k < n; ++k) {
    const auto t = binomial_log_tails(n, alpha, k);
    s.add(std::exp(t.log_lower + t.log_upper));
  }
  return s.value();
}

double count_variance_asymptotic(std::size_t n, double area) {
  require_n(n, 1);
  require_area(area);
  return std::sqrt(static_cast<double>(n)) * std::sqrt(area * (4.0 * kPi - area)) /
         (4.0 * kPi * std::sqrt(kPi));
}

double clt_normalizer(std::size_t n, double area) {
  require_n(n, 1);
  require_area(area);
  return 0.5 * std::pow(kPi, -0.75) * std::pow(static_cast<double>(n), 0.25) *
         std::pow(area * (4.0 * kPi - area), 0.25);
}

double log_hole_probability(std::size_t n, double alpha) {
  const BinomialLaw law(n, alpha);
  if (alpha == 1.0) return kNegInf;
  CompensatedSum s;
  for (std::size_t k = 0; k < n; ++k) s.add(log_binom_lower(law, k));
  return s.value();
}

double hole_probability(std::size_t n, double alpha) {
  return std::exp(log_hole_probability(n, alpha));
}

double hole_probability_asymptotic(std::size_t n, double alpha) {
  require_n(n, 1);
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const double nd = static_cast<double>(n);
  return 0.5 * nd * nd * (alpha + std::log1p(-alpha));
}

double log_conditional_hole_probability(std::size_t n, double alpha) {
  const BinomialLaw law(n, alpha);
  if (alpha == 1.0) return kNegInf;
  CompensatedSum direct;
  for (std::size_t k = 1; k < n; ++k) direct.add(log_binom_lower(law, k));
  const double log_hole = log_hole_probability(n, alpha);
  const double via_hole = log_hole - static_cast<double>(n) * std::log1p(-alpha);
  const double scale = std::max(1.0, std::abs(log_hole));
  if (std::abs(direct.value() - via_hole) > 1e-10 * scale) {
    throw ConvergenceFailure("conditional hole probability: product forms disagree");
  }
  return direct.value();
}

double conditional_hole_probability(std::size_t n, double alpha) {
  return std::exp(log_conditional_hole_probability(n, alpha));
}

std::size_t GapFunctions::truncation_index(double x) {
  require_x(x);
  if (x == 0.0) return 0;
  const double log_x = std::log(x);
  const double target = std::log(1e-14);
  std::size_t k = 0;
  while (static_cast<double>(k + 1) * log_x - log_gamma(static_cast<double>(k + 2)) >= target) ++k;
  return k;
}

double GapFunctions::log_finite(std::size_t n, double x) {
  require_n(n, 1);
  require_x(x);
  if (n == 1) return 0.0;
  return log_product_from(poisson_log_lower(x, n - 1), 1);
}

double GapFunctions::finite(std::size_t n, double x) { return std::exp(log_finite(n, x)); }

double GapFunctions::limit(double x) {
  const std::size_t k = truncation_index(x);
  if (k == 0) return 1.0;
  return std::exp(log_product_from(poisson_log_lower(x, k), 1));
}

double GapFunctions::density(double x) {
  require_x(x);
  if (x == 0.0) return 0.0;
  const std::size_t k_trunc = std::max<std::size_t>(truncation_index(x), 1);
  const std::vector<double> log_lower = poisson_log_lower(x, k_trunc);
  const double e_inf = std::exp(log_product_from(log_lower, 1));
  // d/dx log P(Poisson(x) <= k) = -P(Poisson(x) = k) / P(Poisson(x) <= k).
  const double log_x = std::log(x);
  CompensatedSum series;
  for (std::size_t k = 1; k <= k_trunc; ++k) {
    const double kd = static_cast<double>(k);
    const double log_pmf = -x + kd * log_x - log_gamma(kd + 1.0);
    series.add(std::exp(log_pmf - log_lower[k]));
  }
  return e_inf * series.value();
}

double gap_cdf_finite(std::size_t n, double x) { return GapFunctions::finite(n, x); }
double gap_cdf_limit(double x) { return GapFunctions::limit(x); }
double gap_density(double x) { return GapFunctions::density(x); }

double expected_riesz_energy(std::size_t n, double s) {
  require_n(n, 2);
  if (std::isnan(s)) throw DomainError("s must be a number");
  if (s >= 4.0) throw InfiniteEnergyError(s);
  if (s == 2.0) return expected_riesz_energy_s2(n);
  const double nd = static_cast<double>(n);
  const double first = std::exp2(1.0 - s) / (2.0 - s);
  // Gamma(n) / Gamma(n + 1 - s/2) without the cancellation of a log-gamma difference.
  const double ratio = boost::math::tgamma_delta_ratio(nd, 1.0 - 0.5 * s);
  const double second = boost::math::tgamma(1.0 - 0.5 * s) * ratio * std::exp2(-s);
  return nd * nd * (first - second);
}

double expected_riesz_energy_s2(std::size_t n) {
  require_n(n, 2);
  const long double nd = static_cast<long double>(n);
  return static_cast<double>(nd * nd / 4.0L * harmonic_number(n - 1));
}

namespace {
long double s2_expansion_ld(std::size_t n) {
  const long double nd = static_cast<long double>(n);
  return 0.25L * nd * nd * std::log(nd) + std::numbers::egamma_v<long double> * nd * nd / 4.0L -
         nd / 8.0L - 1.0L / 48.0L;
}
}  // namespace

double expected_riesz_energy_s2_expansion(std::size_t n) {
  require_n(n, 2);
  return static_cast<double>(s2_expansion_ld(n));
}

long double riesz_s2_expansion_error(std::size_t n) {
  require_n(n, 2);
  const long double nd = static_cast<long double>(n);
  return s2_expansion_ld(n) - nd * nd / 4.0L * harmonic_number(n - 1);
}

double expected_log_energy(std::size_t n) {
  require_n(n, 2);
  const long double nd = static_cast<long double>(n);
  const long double ln2 = std::numbers::ln2_v<long double>;
  return static_cast<double>((0.5L - ln2) * nd * nd - 0.5L * nd * harmonic_number(n) + nd * ln2);
}

double expected_log_energy_asymptotic(std::size_t n) {
  require_n(n, 2);
  const double nd = static_cast<double>(n);
  const double ln2 = std::numbers::ln2;
  return (0.5 - ln2) * nd * nd - 0.5 * nd * std::log(nd) + (ln2 - 0.5 * kEulerGamma) * nd - 0.25;
}

double expected_pair_count(std::size_t n, double t) {
  require_n(n, 1);
  if (!(t > 0.0 && t < 2.0)) throw DomainError("t must lie in (0, 2)");
  const double nd = static_cast<double>(n);
  const double u = 0.25 * t * t;
  // (n/2)[n u - 1 + (1 - u)^n] = (n/2) sum_{j>=2} C(n, j)(-u)^j.
  if (nd * u < 0.1) {
    double term = 1.0;
    double sum = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      term *= -(nd - static_cast<double>(j) + 1.0) / static_cast<double>(j) * u;
      if (j >= 2) {
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      }
    }
    return 0.5 * nd * sum;
  }
  return 0.5 * nd * (nd * u + std::expm1(nd * std::log1p(-u)));
}

double pair_count_threshold(std::size_t n, double x) {
  require_n(n, 1);
  return x * std::pow(static_cast<double>(n), -0.75);
}

double min_spacing_limit_cdf(double x) {
  require_x(x);
  const double x2 = x * x;
  return std::exp(-x2 * x2 / 64.0);
}

double iid_min_spacing_limit_cdf(double x) {
  require_x(x);
  return std::exp(-x * x / 8.0);
}

EnergyBounds energy_bounds(double s) {
  if (!(s > -2.0 && s < 2.0) || s == 0.0) throw DomainError("s must lie in (-2, 2) \\ {0}");
  return {std::tgamma(1.0 - 0.5 * s) / std::exp2(s), std::pow(2.0 * std::sqrt(2.0 * kPi), -s)};
}

L2DiscrepancyExpectation expected_l2_discrepancy_sq(std::size_t n) {
  require_n(n, 2);
  const double nd = static_cast<double>(n);
  const double gamma_3_2 = 0.5 * std::sqrt(kPi);
  const double value = gamma_3_2 * nd * nd * boost::math::tgamma_delta_ratio(nd, 1.5);
  return {value, gamma_3_2 * std::sqrt(nd)};
}

namespace iid {

double expected_riesz_energy(std::size_t n, double s) {
  require_n(n, 2);
  if (!(s < 2.0)) throw InfiniteEnergyError(s);
  const double nd = static_cast<double>(n);
  return std::exp2(1.0 - s) / (2.0 - s) * (nd * nd - nd);
}

double expected_log_energy(std::size_t n) {
  require_n(n, 2);
  const double nd = static_cast<double>(n);
  return (0.5 - std::numbers::ln2) * (nd * nd - nd);
}

double expected_l2_discrepancy_sq(std::size_t n) {
  require_n(n, 1);
  return 2.0 / 3.0 * static_cast<double>(n);
}

double expected_pair_count(std::size_t n, double t) {
  require_n(n, 1);
  if (!(t > 0.0 && t < 2.0)) throw DomainError("t must lie in (0, 2)");
  const double nd = static_cast<double>(n);
  return 0.5 * nd * (nd - 1.0) * 0.25 * t * t;
}

double hole_probability(std::size_t n, double alpha) {
  require_n(n, 1);
  require_alpha(alpha);
  return std::pow(1.0 - alpha, static_cast<double>(n));
}

}  // namespace iid

}  // namespace sphens
