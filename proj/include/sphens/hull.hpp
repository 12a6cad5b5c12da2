#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sphens/geometry.hpp"

namespace sphens {

/// Triangle of the convex hull of points on the sphere, outward oriented.
/// The circumcap (circumcenter, circum_chord_radius) has all three vertices on
/// its boundary and lies on the side of the facet away from the origin.
struct HullFacet {
  std::array<std::size_t, 3> vertices;
  SpherePoint circumcenter;
  double circum_chord_radius;
  /// Offset h of the facet plane <circumcenter, p> = h.
  double plane_offset;
};

/// Incremental 3D hull. Checks V - E + F = 2 on the result.
/// Throws DegenerateInputError for fewer than 4 points or a coplanar set.
std::vector<HullFacet> convex_hull_3d(std::span<const SpherePoint> points);

enum class EmptyCapMode { Exact, Grid };

struct EmptyCap {
  double area = 0.0;
  SpherePoint center;
  double chord_radius = 0.0;
  /// Grid mode: bound on chord_radius(exact) - chord_radius(grid). Zero for exact.
  double radius_tolerance = 0.0;
};

/// Emptiness is verified at this tolerance: no point closer than r - 1e-9.
inline constexpr double kEmptyCapTolerance = 1e-9;

struct EmptyCapOptions {
  std::size_t grid_centers = 4096;
  std::size_t refine_factor = 8;
};

/// Largest cap free of points (covering-radius cap), n >= 4.
EmptyCap largest_empty_cap(const Configuration& config, EmptyCapMode mode = EmptyCapMode::Exact,
                           const EmptyCapOptions& options = {});

/// Covering radius (chord) of the Fibonacci lattice with `count` points.
double fibonacci_covering_radius(std::size_t count);

}  // namespace sphens
