#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace sphens {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSphereArea = 4.0 * kPi;

/// Tolerance under which a point counts as the north pole (no plane image).
inline constexpr double kNorthPoleTolerance = 1e-12;

/// Unit vector in R^3. Renormalized on construction.
class SpherePoint {
 public:
  /// The south pole (0, 0, -1).
  SpherePoint() = default;
  /// Throws DomainError for non-finite input or a (numerically) zero vector.
  SpherePoint(double x, double y, double z);

  /// Skips renormalization; the caller guarantees |(x,y,z)| = 1 to rounding.
  static SpherePoint from_unit(double x, double y, double z) noexcept;

  double x() const noexcept { return c_[0]; }
  double y() const noexcept { return c_[1]; }
  double z() const noexcept { return c_[2]; }
  const std::array<double, 3>& coords() const noexcept { return c_; }

  double dot(const SpherePoint& o) const noexcept {
    return c_[0] * o.c_[0] + c_[1] * o.c_[1] + c_[2] * o.c_[2];
  }
  SpherePoint antipode() const noexcept { return from_unit(-c_[0], -c_[1], -c_[2]); }

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

 private:
  std::array<double, 3> c_{0.0, 0.0, -1.0};
};

/// A point of the complex plane, the stereographic image of a sphere point.
struct PlanePoint {
  double re = 0.0;
  double im = 0.0;

  std::complex<double> as_complex() const noexcept { return {re, im}; }
  double norm_sq() const noexcept { return re * re + im * im; }
  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

/// Stereographic projection from the north pole onto the plane z = 0.
/// Throws NorthPoleError when 1 - z < 1e-12.
PlanePoint project(const SpherePoint& p);

/// Inverse stereographic projection: (2re, 2im, |w|^2 - 1) / (1 + |w|^2).
/// Very large |w| approaches the north pole.
SpherePoint inverse_project(const PlanePoint& w) noexcept;

/// Euclidean (chordal) distance, in [0, 2].
double chord_distance(const SpherePoint& p, const SpherePoint& q) noexcept;

/// Chordal distance between two plane points measured on the sphere:
/// 2|z - w| / sqrt((1 + |z|^2)(1 + |w|^2)).
double plane_chord_distance(const PlanePoint& z, const PlanePoint& w) noexcept;

/// Closed spherical cap {p : |p - center| <= chord_radius}.
///
/// Regular caps have chord radius in (0, 2). The degenerate limits 0 (a
/// single point) and 2 (the whole sphere) are representable because
/// discrepancy witnesses can sit exactly at those limits.
class Cap {
 public:
  /// Throws DomainError unless 0 <= chord_radius <= 2.
  Cap(const SpherePoint& center, double chord_radius);

  /// The cap {p : <center, p> >= threshold}, threshold in [-1, 1].
  static Cap from_threshold(const SpherePoint& center, double threshold);

  const SpherePoint& center() const noexcept { return center_; }
  double chord_radius() const noexcept { return radius_; }
  /// pi * r^2.
  double area() const noexcept { return kPi * radius_ * radius_; }
  /// area / 4pi.
  double area_fraction() const noexcept { return radius_ * radius_ / 4.0; }
  /// Inner-product threshold 1 - r^2 / 2 of the bounding circle.
  double threshold() const noexcept { return 1.0 - 0.5 * radius_ * radius_; }

  /// Closed membership in dot-product form: <center, p> >= 1 - r^2 / 2.
  bool contains(const SpherePoint& p) const noexcept { return center_.dot(p) >= threshold(); }
  /// Closed membership in distance form: |p - center| <= r.
  bool contains_by_distance(const SpherePoint& p) const noexcept {
    return chord_distance(center_, p) <= radius_;
  }

 private:
  SpherePoint center_;
  double radius_;
};

/// Cap of the given area about center. Throws DomainError unless 0 < area < 4pi.
Cap cap_from_area(const SpherePoint& center, double area);

/// One sampled n-point set with its provenance.
class Configuration {
 public:
  /// Throws DomainError if points is empty or contains duplicates.
  Configuration(std::vector<SpherePoint> points, std::string sampler_id, std::uint64_t seed);

  std::span<const SpherePoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const SpherePoint& operator[](std::size_t i) const noexcept { return points_[i]; }
  const std::string& sampler_id() const noexcept { return sampler_id_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::vector<SpherePoint> points_;
  std::string sampler_id_;
  std::uint64_t seed_;
};

/// Proper rotation of R^3 stored as a row-major 3x3 matrix.
class Rotation {
 public:
  Rotation() = default;
  /// Rodrigues rotation about a unit axis by angle (radians).
  static Rotation about_axis(const SpherePoint& axis, double angle) noexcept;

  SpherePoint apply(const SpherePoint& p) const noexcept;
  Configuration apply(const Configuration& config) const;

 private:
  std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

/// Spherical Fibonacci lattice with `count` nearly equal-area points.
std::vector<SpherePoint> fibonacci_lattice(std::size_t count);

/// Orthonormal tangent basis (e1, e2) at p, used for local search grids.
std::array<std::array<double, 3>, 2> tangent_basis(const SpherePoint& p) noexcept;

}  // namespace sphens
