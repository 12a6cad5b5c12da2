#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sphens/geometry.hpp"

namespace sphens {

/// Closed-cap count.
std::size_t count_in_cap(const Configuration& config, const Cap& cap);

enum class DiscrepancyMode { Grid, CandidateExact };

std::string_view discrepancy_mode_name(DiscrepancyMode mode) noexcept;
std::optional<DiscrepancyMode> parse_discrepancy_mode(std::string_view name) noexcept;

/// Sup cap discrepancy over a candidate family.
///
/// The witness is the cap {p : <center, p> >= threshold}, or its interior
/// {<center, p> > threshold} when boundary_open is set. Candidate caps through
/// three points are counted with a 1e-12 band around their boundary.
struct DiscrepancyResult {
  double value = 0.0;
  Cap witness_cap{SpherePoint(), 0.0};
  double threshold = 1.0;
  bool boundary_open = false;
  std::size_t witness_count = 0;
  DiscrepancyMode mode = DiscrepancyMode::Grid;
};

struct DiscrepancyOptions {
  std::size_t grid_centers = 4096;
  std::size_t refine_factor = 8;
  /// Candidate families for CandidateExact. All on by default.
  bool use_triples = true;
  bool use_pair_midpoints = true;
  bool use_points = true;
  std::size_t threads = 1;
};

/// CandidateExact rejects n > 512.
inline constexpr std::size_t kCandidateExactMaxPoints = 512;

DiscrepancyResult cap_discrepancy(const Configuration& config, DiscrepancyMode mode,
                                  const DiscrepancyOptions& options = {});

/// Best cap among all thresholds at one center (both open and closed caps).
DiscrepancyResult scan_center(const Configuration& config, const SpherePoint& center);

/// (2/3) n^2 - (1/2) sum_{i,j} |x_i - x_j|.
double l2_discrepancy_sq(const Configuration& config);
/// sum_{i<j} |x_i - x_j|, compensated.
double pairwise_distance_sum(const Configuration& config);

/// Pair distances below this are rejected as coincident.
inline constexpr double kCoincidenceFloor = 1e-14;

/// sum_{i != j} |x_i - x_j|^(-s). Throws CoincidentPointsError.
double riesz_energy(const Configuration& config, double s);
/// sum_{i != j} log(1 / |x_i - x_j|). Throws CoincidentPointsError.
double log_energy(const Configuration& config);

/// Pairwise scans switch to a uniform-grid index from this size on.
inline constexpr std::size_t kSpatialIndexThreshold = 2048;

/// min_{i != j} |x_i - x_j|, n >= 2.
double min_spacing(const Configuration& config);
/// #{i < j : |x_i - x_j| <= t}, n >= 2.
std::size_t pair_count(const Configuration& config, double t);
/// Nearest-neighbour chord distance of every point, n >= 2.
std::vector<double> nearest_neighbor_distances(const Configuration& config);
/// (n/4) d_j^2 for every point.
std::vector<double> nn_spacing_values(const Configuration& config);

/// Right-continuous empirical CDF.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);

  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }
  double operator()(double x) const noexcept;

  /// sup_x |F_n(x) - cdf(x)| for continuous cdf.
  double ks_distance(const std::function<double(double)>& cdf) const;
  /// sup_x |F_n(x) - G_m(x)|.
  double ks_distance(const Ecdf& other) const;

 private:
  std::vector<double> sorted_;
};

}  // namespace sphens
