#pragma once

#include <cstddef>
#include <numbers>

namespace sphens {

inline constexpr double kEulerGamma = std::numbers::egamma;

/// Reentrant log|Gamma(x)|.
double log_gamma(double x) noexcept;

/// log C(n, k) p^k (1-p)^(n-k) by the saddle-point expansion (Loader), exact
/// to a few ulps in the log even for very large n. Requires 0 < p < 1.
double log_binomial_pmf(std::size_t n, std::size_t k, double p) noexcept;

/// Both tails of a binomial law in log form: log P(S <= k), log P(S > k).
struct LogTails {
  double log_lower;
  double log_upper;
};

/// S ~ Bin(n, p). The smaller tail comes from the incomplete-beta continued
/// fraction, the larger as log1p of minus the smaller. 0 <= k <= n - 1.
LogTails binomial_log_tails(std::size_t n, double p, std::size_t k);

/// H_n, summed directly for n <= 10^4 and by Euler-Maclaurin above.
long double harmonic_number(std::size_t n) noexcept;

}  // namespace sphens
