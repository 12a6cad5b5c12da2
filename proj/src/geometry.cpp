#include "sphens/geometry.hpp"

#include <algorithm>

#include "sphens/errors.hpp"

namespace sphens {

SpherePoint::SpherePoint(double x, double y, double z) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw DomainError("SpherePoint: non-finite coordinate");
  }
  const double norm = std::hypot(x, y, z);
  if (!(norm > 1e-300)) throw DomainError("SpherePoint: zero vector cannot be normalized");
  c_ = {x / norm, y / norm, z / norm};
}

SpherePoint SpherePoint::from_unit(double x, double y, double z) noexcept {
  SpherePoint p;
  p.c_ = {x, y, z};
  return p;
}

PlanePoint project(const SpherePoint& p) {
  const double denom = 1.0 - p.z();
  if (denom < kNorthPoleTolerance) throw NorthPoleError();
  return {p.x() / denom, p.y() / denom};
}

SpherePoint inverse_project(const PlanePoint& w) noexcept {
  const double r2 = w.norm_sq();
  if (!std::isfinite(r2)) return SpherePoint::from_unit(0.0, 0.0, 1.0);
  const double s = 1.0 + r2;
  // z = 1 - 2 / (1 + |w|^2) keeps precision near the north pole.
  const double x = 2.0 * w.re / s;
  const double y = 2.0 * w.im / s;
  const double z = 1.0 - 2.0 / s;
  const double norm = std::hypot(x, y, z);
  return SpherePoint::from_unit(x / norm, y / norm, z / norm);
}

double chord_distance(const SpherePoint& p, const SpherePoint& q) noexcept {
  const double dx = p.x() - q.x();
  const double dy = p.y() - q.y();
  const double dz = p.z() - q.z();
  return std::min(2.0, std::sqrt(dx * dx + dy * dy + dz * dz));
}

double plane_chord_distance(const PlanePoint& z, const PlanePoint& w) noexcept {
  const double diff = std::abs(z.as_complex() - w.as_complex());
  return 2.0 * diff / std::sqrt((1.0 + z.norm_sq()) * (1.0 + w.norm_sq()));
}

Cap::Cap(const SpherePoint& center, double chord_radius) : center_(center), radius_(chord_radius) {
  if (!(chord_radius >= 0.0 && chord_radius <= 2.0)) {
    throw DomainError("Cap: chord radius must lie in [0, 2]");
  }
}

Cap Cap::from_threshold(const SpherePoint& center, double threshold) {
  const double t = std::clamp(threshold, -1.0, 1.0);
  return Cap(center, std::sqrt(std::max(0.0, 2.0 - 2.0 * t)));
}

Cap cap_from_area(const SpherePoint& center, double area) {
  if (!(area > 0.0 && area < kSphereArea)) {
    throw DomainError("cap_from_area: area must lie in (0, 4pi)");
  }
  return Cap(center, std::sqrt(area / kPi));
}

Configuration::Configuration(std::vector<SpherePoint> points, std::string sampler_id,
                             std::uint64_t seed)
    : points_(std::move(points)), sampler_id_(std::move(sampler_id)), seed_(seed) {
  if (points_.empty()) throw DomainError("Configuration: at least one point is required");
  std::vector<std::array<double, 3>> sorted;
  sorted.reserve(points_.size());
  for (const auto& p : points_) sorted.push_back(p.coords());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("Configuration: duplicate points");
  }
}

Rotation Rotation::about_axis(const SpherePoint& axis, double angle) noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  const double x = axis.x(), y = axis.y(), z = axis.z();
  Rotation r;
  r.m_ = {t * x * x + c,     t * x * y - s * z, t * x * z + s * y,
          t * x * y + s * z, t * y * y + c,     t * y * z - s * x,
          t * x * z - s * y, t * y * z + s * x, t * z * z + c};
  return r;
}

SpherePoint Rotation::apply(const SpherePoint& p) const noexcept {
  const auto& m = m_;
  const double x = m[0] * p.x() + m[1] * p.y() + m[2] * p.z();
  const double y = m[3] * p.x() + m[4] * p.y() + m[5] * p.z();
  const double z = m[6] * p.x() + m[7] * p.y() + m[8] * p.z();
  const double norm = std::hypot(x, y, z);
  return SpherePoint::from_unit(x / norm, y / norm, z / norm);
}

Configuration Rotation::apply(const Configuration& config) const {
  std::vector<SpherePoint> rotated;
  rotated.reserve(config.size());
  for (const auto& p : config.points()) rotated.push_back(apply(p));
  return Configuration(std::move(rotated), config.sampler_id(), config.seed());
}

std::vector<SpherePoint> fibonacci_lattice(std::size_t count) {
  std::vector<SpherePoint> out;
  out.reserve(count);
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  const double m = static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Midpoint rule in z gives the equal-area property.
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / m;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    out.push_back(SpherePoint::from_unit(rho * std::cos(phi), rho * std::sin(phi), z));
  }
  return out;
}

std::array<std::array<double, 3>, 2> tangent_basis(const SpherePoint& p) noexcept {
  // Cross with the coordinate axis least aligned with p.
  std::array<double, 3> a{0.0, 0.0, 0.0};
  const double ax = std::abs(p.x()), ay = std::abs(p.y()), az = std::abs(p.z());
  if (ax <= ay && ax <= az) {
    a[0] = 1.0;
  } else if (ay <= az) {
    a[1] = 1.0;
  } else {
    a[2] = 1.0;
  }
  std::array<double, 3> e1{p.y() * a[2] - p.z() * a[1], p.z() * a[0] - p.x() * a[2],
                           p.x() * a[1] - p.y() * a[0]};
  const double n1 = std::hypot(e1[0], e1[1], e1[2]);
  for (auto& v : e1) v /= n1;
  std::array<double, 3> e2{p.y() * e1[2] - p.z() * e1[1], p.z() * e1[0] - p.x() * e1[2],
                           p.x() * e1[1] - p.y() * e1[0]};
  return {e1, e2};
}

}  // namespace sphens
