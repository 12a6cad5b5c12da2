#pragma once

#include <cstddef>
#include <vector>

namespace sphens {

/// S_n ~ Bin(n, alpha). Throws DomainError unless n >= 1 and 0 <= alpha <= 1.
struct BinomialLaw {
  BinomialLaw(std::size_t n, double alpha);
  std::size_t n;
  double alpha;
};

/// P(S_n > k), 0 <= k <= n - 1.
double binom_tail(const BinomialLaw& law, std::size_t k);
/// log P(S_n <= k).
double log_binom_lower(const BinomialLaw& law, std::size_t k);

/// Success probabilities of the independent Bernoulli summands of the cap count.
struct CountLaw {
  std::vector<double> probs;  // probs[k] = P(S_n > k)
  double mean() const;
  double variance() const;
};

CountLaw cap_count_law(std::size_t n, double alpha);
/// Poisson-binomial pmf of the cap count, entries 0..n.
std::vector<double> cap_count_pmf(std::size_t n, double alpha);

double count_variance_exact(std::size_t n, double alpha);
/// sqrt(n) sqrt(area (4pi - area)) / (4 pi sqrt(pi)).
double count_variance_asymptotic(std::size_t n, double area);
/// (1/2) pi^(-3/4) n^(1/4) (area (4pi - area))^(1/4).
double clt_normalizer(std::size_t n, double area);

/// log of the probability that a cap of area fraction alpha holds no point.
double log_hole_probability(std::size_t n, double alpha);
double hole_probability(std::size_t n, double alpha);
/// (n^2 / 2)(alpha + log(1 - alpha)).
double hole_probability_asymptotic(std::size_t n, double alpha);
/// log of prod_{k=1}^{n-1} P(S_n <= k); cross-checked against
/// log_hole_probability - n log(1 - alpha).
double log_conditional_hole_probability(std::size_t n, double alpha);
double conditional_hole_probability(std::size_t n, double alpha);

/// Finite-n and limiting gap functions of the planar Ginibre ensemble.
struct GapFunctions {
  /// Smallest K with x^(K+1)/(K+1)! < 1e-14.
  static std::size_t truncation_index(double x);
  /// E_n(x) = prod_{k=1}^{n-1} P(Poisson(x) <= k).
  static double log_finite(std::size_t n, double x);
  static double finite(std::size_t n, double x);
  /// E_inf(x).
  static double limit(double x);
  /// Q(x) = -E_inf'(x).
  static double density(double x);
};

double gap_cdf_finite(std::size_t n, double x);
double gap_cdf_limit(double x);
double gap_density(double x);

/// Expected Riesz s-energy, s < 4, n >= 2. s = 2 uses the harmonic form.
/// Throws InfiniteEnergyError for s >= 4.
double expected_riesz_energy(std::size_t n, double s);
/// (n^2 / 4) H_{n-1}.
double expected_riesz_energy_s2(std::size_t n);
/// n^2 log(n)/4 + gamma n^2/4 - n/8 - 1/48.
double expected_riesz_energy_s2_expansion(std::size_t n);
/// The two s = 2 forms evaluated in extended precision: expansion - exact.
long double riesz_s2_expansion_error(std::size_t n);

/// (1/2 - log 2) n^2 - (n/2) H_n + n log 2.
double expected_log_energy(std::size_t n);
/// (1/2 - log 2) n^2 - (n/2) log n + (log 2 - gamma/2) n - 1/4.
double expected_log_energy_asymptotic(std::size_t n);

/// E G_{t,n} = n^2 t^2 / 8 - (n/2)(1 - (1 - t^2/4)^n), 0 < t < 2.
double expected_pair_count(std::size_t n, double t);
/// t = x n^(-3/4).
double pair_count_threshold(std::size_t n, double x);

/// Limit of P(n^(3/4) m_n > x): exp(-x^4 / 64).
double min_spacing_limit_cdf(double x);
/// Limit of P(n m_n > x) for independent uniform points: exp(-x^2 / 8).
double iid_min_spacing_limit_cdf(double x);

struct EnergyBounds {
  double corollary_coeff;  // Gamma(1 - s/2) / 2^s
  double rsz_coeff;        // (2 sqrt(2 pi))^(-s)
};
/// -2 < s < 2, s != 0.
EnergyBounds energy_bounds(double s);

struct L2DiscrepancyExpectation {
  double value;  // Gamma(3/2) Gamma(n) n^2 / Gamma(n + 3/2)
  double bound;  // Gamma(3/2) sqrt(n)
};
L2DiscrepancyExpectation expected_l2_discrepancy_sq(std::size_t n);

/// Reference values for independent uniform points.
namespace iid {
/// (2^(1-s)/(2-s)) (n^2 - n), s < 2.
double expected_riesz_energy(std::size_t n, double s);
/// (1/2 - log 2)(n^2 - n).
double expected_log_energy(std::size_t n);
/// (2/3) n.
double expected_l2_discrepancy_sq(std::size_t n);
/// C(n, 2) t^2 / 4.
double expected_pair_count(std::size_t n, double t);
/// (1 - alpha)^n.
double hole_probability(std::size_t n, double alpha);
}  // namespace iid

}  // namespace sphens
