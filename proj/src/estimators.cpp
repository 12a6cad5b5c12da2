#include "sphens/estimators.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "sphens/compensated.hpp"
#include "sphens/errors.hpp"

namespace sphens {

namespace {

constexpr double kBoundaryBand = 1e-12;

void require_pairs(const Configuration& config, const char* what) {
  if (config.size() < 2) throw DomainError(std::string(what) + ": need at least 2 points");
}

// Flat coordinate arrays for the hot loops.
struct Coords {
  explicit Coords(std::span<const SpherePoint> pts) : x(pts.size()), y(pts.size()), z(pts.size()) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      x[i] = pts[i].x();
      y[i] = pts[i].y();
      z[i] = pts[i].z();
    }
  }
  std::size_t size() const { return x.size(); }
  double dist(std::size_t i, std::size_t j) const {
    const double dx = x[i] - x[j], dy = y[i] - y[j], dz = z[i] - z[j];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  std::vector<double> x, y, z;
};

// Uniform grid over [-1, 1]^3 with cubic cells of side `cell`.
class CellIndex {
 public:
  CellIndex(const Coords& c, double cell) : coords_(c), cell_(cell) {
    dim_ = static_cast<std::size_t>(std::ceil(2.0 / cell_)) + 1;
    std::vector<std::size_t> counts(dim_ * dim_ * dim_ + 1, 0);
    cell_of_.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      cell_of_[i] = linear(bin(c.x[i]), bin(c.y[i]), bin(c.z[i]));
      ++counts[cell_of_[i] + 1];
    }
    for (std::size_t k = 1; k < counts.size(); ++k) counts[k] += counts[k - 1];
    start_ = counts;
    order_.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) order_[counts[cell_of_[i]]++] = i;
  }

  // Calls fn(j) for every point j in the 27 cells around point i (including i).
  template <typename Fn>
  void for_neighbors(std::size_t i, Fn&& fn) const {
    const long bx = bin(coords_.x[i]), by = bin(coords_.y[i]), bz = bin(coords_.z[i]);
    const long d = static_cast<long>(dim_);
    for (long ix = std::max(0L, bx - 1); ix <= std::min(d - 1, bx + 1); ++ix) {
      for (long iy = std::max(0L, by - 1); iy <= std::min(d - 1, by + 1); ++iy) {
        for (long iz = std::max(0L, bz - 1); iz <= std::min(d - 1, bz + 1); ++iz) {
          const std::size_t cell = linear(ix, iy, iz);
          for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) fn(order_[k]);
        }
      }
    }
  }

 private:
  long bin(double v) const {
    const long b = static_cast<long>(std::floor((v + 1.0) / cell_));
    return std::clamp(b, 0L, static_cast<long>(dim_) - 1);
  }
  std::size_t linear(long ix, long iy, long iz) const {
    return (static_cast<std::size_t>(ix) * dim_ + static_cast<std::size_t>(iy)) * dim_ +
           static_cast<std::size_t>(iz);
  }

  const Coords& coords_;
  double cell_;
  std::size_t dim_ = 1;
  std::vector<std::size_t> cell_of_, start_, order_;
};

// Cell side for spacing queries, kept at a few typical spacings and the cell count near 8n.
double spacing_cell(std::size_t n) { return 4.0 / std::sqrt(static_cast<double>(n)); }

double area_fraction_of_threshold(double t) { return 0.5 * (1.0 - std::clamp(t, -1.0, 1.0)); }

DiscrepancyResult make_result(const SpherePoint& center, double threshold, bool open,
                              std::size_t count, double value) {
  DiscrepancyResult r;
  r.value = value;
  r.threshold = threshold;
  r.boundary_open = open;
  r.witness_count = count;
  r.witness_cap = Cap::from_threshold(center, threshold);
  return r;
}

DiscrepancyResult scan_coords(const Coords& c, const SpherePoint& center,
                              std::vector<double>& dots) {
  const std::size_t n = c.size();
  const double nd = static_cast<double>(n);
  dots.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    dots[j] = center.x() * c.x[j] + center.y() * c.y[j] + center.z() * c.z[j];
  }
  std::sort(dots.begin(), dots.end(), std::greater<>());

  // The empty open cap at threshold 1 has discrepancy 0.
  DiscrepancyResult best = make_result(center, 1.0, true, 0, 0.0);
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s + 1;
    while (e < n && dots[e] == dots[s]) ++e;
    const double v = std::clamp(dots[s], -1.0, 1.0);
    const double expected = nd * area_fraction_of_threshold(v);
    const double excess = static_cast<double>(e) - expected;
    const double deficit = expected - static_cast<double>(s);
    if (excess > best.value) best = make_result(center, v, false, e, excess);
    if (deficit > best.value) best = make_result(center, v, true, s, deficit);
    s = e;
  }
  // Open cap {<c,p> > -1}: full area, misses points at the antipode of c.
  std::size_t above = 0;
  while (above < n && dots[above] > -1.0) ++above;
  const double full_deficit = nd - static_cast<double>(above);
  if (full_deficit > best.value) best = make_result(center, -1.0, true, above, full_deficit);
  return best;
}

struct Ranked {
  DiscrepancyResult result;
  bool valid = false;
};

void keep_better(Ranked& acc, const DiscrepancyResult& r) {
  if (!acc.valid || r.value > acc.result.value) {
    acc.result = r;
    acc.valid = true;
  }
}

// Runs job(k) for k in [0, jobs) on `threads` workers and reduces in job order,
// so the winner does not depend on the thread count.
template <typename Job>
DiscrepancyResult run_jobs(std::size_t jobs, std::size_t threads, Job&& job) {
  std::vector<Ranked> results(jobs);
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, jobs));
  if (workers == 1) {
    for (std::size_t k = 0; k < jobs; ++k) results[k] = job(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < jobs; k = next++) results[k] = job(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  Ranked best;
  for (const auto& r : results) {
    if (r.valid) keep_better(best, r.result);
  }
  return best.result;
}

DiscrepancyResult scan_centers(const Coords& c, const std::vector<SpherePoint>& centers,
                               std::size_t threads) {
  constexpr std::size_t chunk = 64;
  const std::size_t jobs = (centers.size() + chunk - 1) / chunk;
  return run_jobs(jobs, threads, [&](std::size_t k) {
    Ranked acc;
    std::vector<double> dots;
    const std::size_t end = std::min(centers.size(), (k + 1) * chunk);
    for (std::size_t i = k * chunk; i < end; ++i) keep_better(acc, scan_coords(c, centers[i], dots));
    return acc;
  });
}

// Caps bounded by the circle through points i < j < k, both sides, each at its own threshold.
Ranked scan_triples_from(const Coords& c, std::size_t i) {
  const std::size_t n = c.size();
  const double nd = static_cast<double>(n);
  Ranked acc;
  for (std::size_t j = i + 1; j < n; ++j) {
    const double ax = c.x[j] - c.x[i], ay = c.y[j] - c.y[i], az = c.z[j] - c.z[i];
    for (std::size_t k = j + 1; k < n; ++k) {
      const double bx = c.x[k] - c.x[i], by = c.y[k] - c.y[i], bz = c.z[k] - c.z[i];
      double mx = ay * bz - az * by;
      double my = az * bx - ax * bz;
      double mz = ax * by - ay * bx;
      const double norm = std::sqrt(mx * mx + my * my + mz * mz);
      if (!(norm > 1e-300)) continue;
      mx /= norm;
      my /= norm;
      mz /= norm;
      const double h = (mx * (c.x[i] + c.x[j] + c.x[k]) + my * (c.y[i] + c.y[j] + c.y[k]) +
                        mz * (c.z[i] + c.z[j] + c.z[k])) /
                       3.0;
      std::size_t above = 0, on = 0;
      for (std::size_t q = 0; q < n; ++q) {
        const double d = mx * c.x[q] + my * c.y[q] + mz * c.z[q];
        if (d > h + kBoundaryBand) {
          ++above;
        } else if (d >= h - kBoundaryBand) {
          ++on;
        }
      }
      const std::size_t below = n - above - on;
      const double hc = std::clamp(h, -1.0, 1.0);
      const double exp_plus = nd * 0.5 * (1.0 - hc);
      const double exp_minus = nd * 0.5 * (1.0 + hc);
      const double cand[4] = {static_cast<double>(above + on) - exp_plus,
                              exp_plus - static_cast<double>(above),
                              static_cast<double>(below + on) - exp_minus,
                              exp_minus - static_cast<double>(below)};
      for (int w = 0; w < 4; ++w) {
        if (acc.valid && cand[w] <= acc.result.value) continue;
        const bool plus_side = w < 2;
        const SpherePoint center =
            plus_side ? SpherePoint::from_unit(mx, my, mz) : SpherePoint::from_unit(-mx, -my, -mz);
        const double t = plus_side ? hc : -hc;
        const bool open = (w % 2) == 1;
        const std::size_t count = plus_side ? (open ? above : above + on) : (open ? below : below + on);
        acc.result = make_result(center, t, open, count, cand[w]);
        acc.valid = true;
      }
    }
  }
  return acc;
}

std::vector<SpherePoint> pair_midpoint_centers(const Coords& c) {
  std::vector<SpherePoint> centers;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double mx = c.x[i] + c.x[j], my = c.y[i] + c.y[j], mz = c.z[i] + c.z[j];
      const double norm = std::sqrt(mx * mx + my * my + mz * mz);
      if (!(norm > 1e-12)) continue;
      centers.push_back(SpherePoint::from_unit(mx / norm, my / norm, mz / norm));
      centers.push_back(SpherePoint::from_unit(-mx / norm, -my / norm, -mz / norm));
    }
  }
  return centers;
}

DiscrepancyResult grid_discrepancy(const Coords& c, const DiscrepancyOptions& opt) {
  const std::size_t g = std::max<std::size_t>(1, opt.grid_centers);
  DiscrepancyResult best = scan_centers(c, fibonacci_lattice(g), opt.threads);
  if (opt.refine_factor > 0) {
    // Local tangent-plane subgrid spanning one lattice spacing on each side.
    const double spacing = std::sqrt(kSphereArea / static_cast<double>(g));
    const long r = static_cast<long>(opt.refine_factor);
    const SpherePoint c0 = best.witness_cap.center();
    const auto basis = tangent_basis(c0);
    std::vector<SpherePoint> local;
    for (long a = -r; a <= r; ++a) {
      for (long b = -r; b <= r; ++b) {
        if (a == 0 && b == 0) continue;
        const double u = spacing * static_cast<double>(a) / static_cast<double>(r);
        const double v = spacing * static_cast<double>(b) / static_cast<double>(r);
        local.emplace_back(c0.x() + u * basis[0][0] + v * basis[1][0],
                           c0.y() + u * basis[0][1] + v * basis[1][1],
                           c0.z() + u * basis[0][2] + v * basis[1][2]);
      }
    }
    const DiscrepancyResult refined = scan_centers(c, local, opt.threads);
    if (refined.value > best.value) best = refined;
  }
  return best;
}

DiscrepancyResult candidate_exact(const Coords& c, const DiscrepancyOptions& opt) {
  const std::size_t n = c.size();
  Ranked best;
  if (opt.use_points) {
    std::vector<SpherePoint> centers;
    centers.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      centers.push_back(SpherePoint::from_unit(c.x[i], c.y[i], c.z[i]));
      centers.push_back(SpherePoint::from_unit(-c.x[i], -c.y[i], -c.z[i]));
    }
    keep_better(best, scan_centers(c, centers, opt.threads));
  }
  if (opt.use_pair_midpoints && n >= 2) {
    keep_better(best, scan_centers(c, pair_midpoint_centers(c), opt.threads));
  }
  if (opt.use_triples && n >= 3) {
    keep_better(best, run_jobs(n, opt.threads, [&](std::size_t i) { return scan_triples_from(c, i); }));
  }
  if (!best.valid) {
    std::vector<double> dots;
    return scan_coords(c, SpherePoint(), dots);
  }
  return best.result;
}

}  // namespace

std::size_t count_in_cap(const Configuration& config, const Cap& cap) {
  std::size_t count = 0;
  for (const auto& p : config.points()) count += cap.contains(p) ? 1 : 0;
  return count;
}

std::string_view discrepancy_mode_name(DiscrepancyMode mode) noexcept {
  return mode == DiscrepancyMode::Grid ? "grid" : "exact";
}

std::optional<DiscrepancyMode> parse_discrepancy_mode(std::string_view name) noexcept {
  if (name == "grid") return DiscrepancyMode::Grid;
  if (name == "exact" || name == "candidate_exact") return DiscrepancyMode::CandidateExact;
  return std::nullopt;
}

DiscrepancyResult scan_center(const Configuration& config, const SpherePoint& center) {
  const Coords c(config.points());
  std::vector<double> dots;
  return scan_coords(c, center, dots);
}

DiscrepancyResult cap_discrepancy(const Configuration& config, DiscrepancyMode mode,
                                  const DiscrepancyOptions& options) {
  const Coords c(config.points());
  DiscrepancyResult r;
  if (mode == DiscrepancyMode::CandidateExact) {
    if (config.size() > kCandidateExactMaxPoints) {
      throw DomainError("cap_discrepancy: exact mode supports at most 512 points");
    }
    r = candidate_exact(c, options);
  } else {
    r = grid_discrepancy(c, options);
  }
  r.mode = mode;
  return r;
}

double pairwise_distance_sum(const Configuration& config) {
  const Coords c(config.points());
  CompensatedSum sum;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) sum.add(c.dist(i, j));
  }
  return sum.value();
}

double l2_discrepancy_sq(const Configuration& config) {
  const double n = static_cast<double>(config.size());
  return 2.0 / 3.0 * n * n - pairwise_distance_sum(config);
}

namespace {
template <typename Kernel>
double pair_energy(const Configuration& config, Kernel&& kernel) {
  const Coords c(config.points());
  CompensatedSum sum;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double d = c.dist(i, j);
      if (d < kCoincidenceFloor) {
        throw CoincidentPointsError("CoincidentPoints: points " + std::to_string(i) + " and " +
                                    std::to_string(j) + " coincide");
      }
      sum.add(kernel(d));
    }
  }
  return 2.0 * sum.value();
}
}  // namespace

double riesz_energy(const Configuration& config, double s) {
  return pair_energy(config, [s](double d) { return std::pow(d, -s); });
}

double log_energy(const Configuration& config) {
  return pair_energy(config, [](double d) { return -std::log(d); });
}

double min_spacing(const Configuration& config) {
  require_pairs(config, "min_spacing");
  const Coords c(config.points());
  const std::size_t n = c.size();
  double best = std::numeric_limits<double>::infinity();
  if (n >= kSpatialIndexThreshold) {
    const double cell = spacing_cell(n);
    const CellIndex index(c, cell);
    for (std::size_t i = 0; i < n; ++i) {
      index.for_neighbors(i, [&](std::size_t j) {
        if (j > i) best = std::min(best, c.dist(i, j));
      });
    }
    if (best <= cell) return best;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) best = std::min(best, c.dist(i, j));
  }
  return best;
}

std::size_t pair_count(const Configuration& config, double t) {
  require_pairs(config, "pair_count");
  const Coords c(config.points());
  const std::size_t n = c.size();
  std::size_t count = 0;
  if (n >= kSpatialIndexThreshold && t < 1.0) {
    const CellIndex index(c, std::max(t, spacing_cell(n) / 4.0));
    for (std::size_t i = 0; i < n; ++i) {
      index.for_neighbors(i, [&](std::size_t j) {
        if (j > i && c.dist(i, j) <= t) ++count;
      });
    }
    return count;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) count += c.dist(i, j) <= t ? 1 : 0;
  }
  return count;
}

std::vector<double> nearest_neighbor_distances(const Configuration& config) {
  require_pairs(config, "nearest_neighbor_distances");
  const Coords c(config.points());
  const std::size_t n = c.size();
  std::vector<double> d(n, std::numeric_limits<double>::infinity());
  auto brute = [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d[i] = std::min(d[i], c.dist(i, j));
    }
  };
  if (n >= kSpatialIndexThreshold) {
    const double cell = spacing_cell(n);
    const CellIndex index(c, cell);
    for (std::size_t i = 0; i < n; ++i) {
      index.for_neighbors(i, [&](std::size_t j) {
        if (j != i) d[i] = std::min(d[i], c.dist(i, j));
      });
      if (!(d[i] <= cell)) brute(i);
    }
    return d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = c.dist(i, j);
      d[i] = std::min(d[i], dij);
      d[j] = std::min(d[j], dij);
    }
  }
  return d;
}

std::vector<double> nn_spacing_values(const Configuration& config) {
  std::vector<double> d = nearest_neighbor_distances(config);
  const double scale = static_cast<double>(config.size()) / 4.0;
  for (auto& v : d) v = scale * v * v;
  return d;
}

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw DomainError("Ecdf: no values");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const noexcept {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::ks_distance(const std::function<double(double)>& cdf) const {
  const double n = static_cast<double>(sorted_.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    const double f = cdf(sorted_[i]);
    sup = std::max(sup, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
  }
  return sup;
}

double Ecdf::ks_distance(const Ecdf& other) const {
  const auto& a = sorted_;
  const auto& b = other.sorted_;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() || j < b.size()) {
    const double x = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

}  // namespace sphens
