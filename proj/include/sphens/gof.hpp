#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sphens {

struct DistributionTestResult {
  std::string stat_name;  // "chi_square" or "ks"
  double statistic = 0.0;
  double p_value = 0.0;
  std::size_t degrees_of_freedom = 0;  // chi-square only
  std::size_t bins = 0;                // chi-square bins after merging
};

/// Minimum sample size for either test.
inline constexpr std::size_t kMinTestSamples = 100;

/// Chi-square test of integer outcomes against pmf[0..K]. Adjacent bins are
/// merged until each expected count is at least 5. Outcomes beyond K fall in
/// the last bin. Throws TooFewSamplesError below 100 values.
DistributionTestResult chi_square_test(std::span<const long> outcomes, std::span<const double> pmf);

/// Kolmogorov-Smirnov test against a continuous CDF (asymptotic p-value).
DistributionTestResult ks_test(std::span<const double> values,
                               const std::function<double(double)>& cdf);

/// Kolmogorov limiting survival function Q_KS(lambda).
double kolmogorov_survival(double lambda);

}  // namespace sphens
