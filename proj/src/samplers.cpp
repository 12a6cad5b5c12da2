#include "sphens/samplers.hpp"

#include <cmath>

#include "sphens/errors.hpp"

namespace sphens {

namespace {

void require_positive(std::size_t n, const char* what) {
  if (n == 0) throw DomainError(std::string(what) + ": n must be at least 1");
}

void fill_gaussian(ComplexMatrix& m, Rng& rng) {
  const double scale = std::sqrt(0.5);
  Complex* p = m.data();
  for (std::size_t i = 0; i < m.size() * m.size(); ++i) {
    const double re = rng.normal() * scale;
    const double im = rng.normal() * scale;
    p[i] = {re, im};
  }
}

SpherePoint uniform_point(Rng& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * kPi * rng.uniform();
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return SpherePoint::from_unit(rho * std::cos(phi), rho * std::sin(phi), z);
}

// Unit feature vector of a sphere point with height z and azimuth phi:
//   |u_k|^2 = C(n-1, k) a^k b^(n-1-k),  a = (1+z)/2, b = (1-z)/2,  arg u_k = k phi.
class FeatureMap {
 public:
  explicit FeatureMap(std::size_t n) : n_(n), log_binom_(n) {
    log_binom_[0] = 0.0;
    const double m = static_cast<double>(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
      const double kd = static_cast<double>(k);
      log_binom_[k] = log_binom_[k - 1] + std::log(m - kd + 1.0) - std::log(kd);
    }
  }

  void evaluate(double z, double phi, std::vector<Complex>& u) const {
    const double a = 0.5 * (1.0 + z);
    const double b = 0.5 * (1.0 - z);
    const double log_a = std::log(a);
    const double log_b = std::log(b);
    for (std::size_t k = 0; k < n_; ++k) {
      const double kd = static_cast<double>(k);
      const double rest = static_cast<double>(n_ - 1 - k);
      // Exponent zero contributes zero even when the log is -inf at a pole.
      double lm = log_binom_[k];
      if (k > 0) lm += kd * log_a;
      if (rest > 0.0) lm += rest * log_b;
      const double mag = std::exp(0.5 * lm);
      u[k] = std::polar(mag, kd * phi);
    }
  }

 private:
  std::size_t n_;
  std::vector<double> log_binom_;
};

}  // namespace

std::string_view sampler_name(SamplerKind kind) noexcept {
  switch (kind) {
    case SamplerKind::MatrixModel:
      return "matrix";
    case SamplerKind::HkpvDpp:
      return "dpp";
    case SamplerKind::UniformIid:
      return "iid";
  }
  return "unknown";
}

std::optional<SamplerKind> parse_sampler(std::string_view name) noexcept {
  if (name == "matrix") return SamplerKind::MatrixModel;
  if (name == "dpp") return SamplerKind::HkpvDpp;
  if (name == "iid") return SamplerKind::UniformIid;
  return std::nullopt;
}

SeedTag sampler_tag(SamplerKind kind) noexcept {
  switch (kind) {
    case SamplerKind::MatrixModel:
      return SeedTag::Matrix;
    case SamplerKind::HkpvDpp:
      return SeedTag::Dpp;
    case SamplerKind::UniformIid:
      return SeedTag::Iid;
  }
  return SeedTag::Matrix;
}

ComplexMatrix sample_gaussian_matrix(std::size_t n, std::uint64_t seed) {
  require_positive(n, "sample_gaussian_matrix");
  Rng rng(seed);
  ComplexMatrix m(n);
  fill_gaussian(m, rng);
  return m;
}

Configuration sample_matrix_model(std::size_t n, std::uint64_t seed) {
  require_positive(n, "sample_matrix_model");
  Rng rng(seed);
  ComplexMatrix a(n), b(n);
  fill_gaussian(a, rng);
  fill_gaussian(b, rng);
  const ComplexMatrix product = lu_solve(a, b);
  const auto eigenvalues = complex_eigenvalues(product);
  std::vector<SpherePoint> points;
  points.reserve(n);
  for (const auto& lambda : eigenvalues) points.push_back(inverse_project(lambda));
  return Configuration(std::move(points), "matrix", seed);
}

Configuration sample_dpp_hkpv(std::size_t n, std::uint64_t seed) {
  require_positive(n, "sample_dpp_hkpv");
  Rng rng(seed);
  const FeatureMap features(n);
  // Orthonormal basis of the span of accepted feature vectors, one column per point.
  std::vector<std::vector<Complex>> basis;
  basis.reserve(n);
  std::vector<Complex> u(n), coeff(n);
  std::vector<SpherePoint> points;
  points.reserve(n);

  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t proposals = 0;
    for (;;) {
      if (++proposals > kHkpvProposalBudget) {
        throw RejectionBudgetExceeded("RejectionBudgetExceeded: more than 1e7 proposals at step " +
                                      std::to_string(j));
      }
      const double z = 2.0 * rng.uniform() - 1.0;
      const double phi = 2.0 * kPi * rng.uniform();
      const double threshold = 1.0 - rng.uniform();  // accept iff ||E*u||^2 < threshold
      features.evaluate(z, phi, u);
      double projected = 0.0;
      bool rejected = false;
      for (std::size_t c = 0; c < basis.size(); ++c) {
        Complex acc = 0.0;
        const auto& e = basis[c];
        for (std::size_t k = 0; k < n; ++k) acc += std::conj(e[k]) * u[k];
        coeff[c] = acc;
        projected += std::norm(acc);
        if (projected >= threshold) {
          rejected = true;
          break;
        }
      }
      if (rejected) continue;

      // Accepted: append the normalized residual, orthogonalizing twice.
      std::vector<Complex> v = u;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t c = 0; c < basis.size(); ++c) {
          const auto& e = basis[c];
          Complex acc = 0.0;
          if (pass == 0) {
            acc = coeff[c];
          } else {
            for (std::size_t k = 0; k < n; ++k) acc += std::conj(e[k]) * v[k];
          }
          for (std::size_t k = 0; k < n; ++k) v[k] -= acc * e[k];
        }
      }
      double norm = 0.0;
      for (const auto& x : v) norm += std::norm(x);
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) continue;
      for (auto& x : v) x /= norm;
      basis.push_back(std::move(v));

      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      points.push_back(SpherePoint::from_unit(rho * std::cos(phi), rho * std::sin(phi), z));
      break;
    }
  }
  return Configuration(std::move(points), "dpp", seed);
}

Configuration sample_uniform_iid(std::size_t n, std::uint64_t seed) {
  require_positive(n, "sample_uniform_iid");
  Rng rng(seed);
  std::vector<SpherePoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(uniform_point(rng));
  return Configuration(std::move(points), "iid", seed);
}

std::vector<double> sample_moduli_squared(std::size_t n, std::uint64_t seed) {
  require_positive(n, "sample_moduli_squared");
  Rng rng(seed);
  std::vector<double> q(n);
  for (std::size_t k = 0; k < n; ++k) {
    q[k] = rng.beta_prime(static_cast<double>(k + 1), static_cast<double>(n - k));
  }
  return q;
}

Configuration sample(SamplerKind kind, std::size_t n, std::uint64_t seed) {
  switch (kind) {
    case SamplerKind::MatrixModel:
      return sample_matrix_model(n, seed);
    case SamplerKind::HkpvDpp:
      return sample_dpp_hkpv(n, seed);
    case SamplerKind::UniformIid:
      return sample_uniform_iid(n, seed);
  }
  throw DomainError("sample: unknown sampler");
}

}  // namespace sphens
