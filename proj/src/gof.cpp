#include "sphens/gof.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "sphens/errors.hpp"
#include "sphens/estimators.hpp"

namespace sphens {

namespace {
void require_samples(std::size_t n) {
  if (n < kMinTestSamples) {
    throw TooFewSamplesError("TooFewSamples: need at least 100 values, got " + std::to_string(n));
  }
}
}  // namespace

DistributionTestResult chi_square_test(std::span<const long> outcomes, std::span<const double> pmf) {
  require_samples(outcomes.size());
  if (pmf.empty()) throw DomainError("chi_square_test: empty pmf");
  const std::size_t k = pmf.size();
  std::vector<double> observed(k, 0.0);
  for (long v : outcomes) {
    if (v < 0) throw DomainError("chi_square_test: negative outcome");
    observed[std::min<std::size_t>(static_cast<std::size_t>(v), k - 1)] += 1.0;
  }
  const double total = static_cast<double>(outcomes.size());

  // Merge left to right; a short remainder joins the last full bin.
  std::vector<double> obs_bins, exp_bins;
  double o = 0.0, e = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    o += observed[i];
    e += pmf[i] * total;
    if (e >= 5.0) {
      obs_bins.push_back(o);
      exp_bins.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_bins.empty()) {
      obs_bins.push_back(o);
      exp_bins.push_back(e);
    } else {
      obs_bins.back() += o;
      exp_bins.back() += e;
    }
  }

  DistributionTestResult r;
  r.stat_name = "chi_square";
  r.bins = obs_bins.size();
  for (std::size_t i = 0; i < obs_bins.size(); ++i) {
    const double d = obs_bins[i] - exp_bins[i];
    r.statistic += d * d / exp_bins[i];
  }
  if (r.bins < 2) {
    r.degrees_of_freedom = 0;
    r.p_value = 1.0;
    return r;
  }
  r.degrees_of_freedom = r.bins - 1;
  r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(r.degrees_of_freedom), 0.5 * r.statistic);
  return r;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

DistributionTestResult ks_test(std::span<const double> values,
                               const std::function<double(double)>& cdf) {
  require_samples(values.size());
  const Ecdf ecdf(std::vector<double>(values.begin(), values.end()));
  DistributionTestResult r;
  r.stat_name = "ks";
  r.statistic = ecdf.ks_distance(cdf);
  const double sn = std::sqrt(static_cast<double>(values.size()));
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * r.statistic);
  return r;
}

}  // namespace sphens
