#include "sphens/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "sphens/errors.hpp"

namespace sphens {

namespace {

using Vec = std::array<double, 3>;

Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

constexpr double kVisibleEps = 1e-12;

struct Face {
  std::array<std::size_t, 3> v;
  Vec normal;  // unit, outward
  double offset;
  bool alive = true;
};

class Hull {
 public:
  explicit Hull(std::span<const SpherePoint> pts) : pts_(pts) {}

  std::vector<Face> build() {
    const std::size_t n = pts_.size();
    if (n < 4) throw DegenerateInputError("DegenerateInput: convex hull needs at least 4 points");
    const auto seed = initial_simplex();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(seed.begin(), seed.end(), i) != seed.end()) continue;
      insert(i);
    }
    std::vector<Face> out;
    for (const auto& f : faces_) {
      if (f.alive) out.push_back(f);
    }
    return out;
  }

 private:
  const Vec& p(std::size_t i) const { return pts_[i].coords(); }

  std::array<std::size_t, 4> initial_simplex() {
    const std::size_t n = pts_.size();
    std::size_t i1 = 0;
    double best = -1.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double d = norm(sub(p(i), p(0)));
      if (d > best) best = d, i1 = i;
    }
    std::size_t i2 = 0;
    best = -1.0;
    const Vec e = sub(p(i1), p(0));
    for (std::size_t i = 0; i < n; ++i) {
      const double a = norm(cross(e, sub(p(i), p(0))));
      if (a > best) best = a, i2 = i;
    }
    if (best < 1e-12) throw DegenerateInputError("DegenerateInput: points are collinear");
    const Vec nrm = cross(e, sub(p(i2), p(0)));
    std::size_t i3 = 0;
    best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::abs(dot(nrm, sub(p(i), p(0))));
      if (v > best) best = v, i3 = i;
    }
    if (best < 1e-12) throw DegenerateInputError("DegenerateInput: points are coplanar");

    interior_ = {0.0, 0.0, 0.0};
    for (std::size_t idx : {std::size_t{0}, i1, i2, i3}) {
      for (int c = 0; c < 3; ++c) interior_[c] += 0.25 * p(idx)[c];
    }
    add_face(0, i1, i2);
    add_face(0, i2, i3);
    add_face(0, i3, i1);
    add_face(i1, i3, i2);
    return {0, i1, i2, i3};
  }

  static std::uint64_t key(std::size_t a, std::size_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  // Adds a face, flipping it if needed so the normal points away from the interior.
  void add_face(std::size_t a, std::size_t b, std::size_t c) {
    Vec nrm = cross(sub(p(b), p(a)), sub(p(c), p(a)));
    if (dot(nrm, sub(interior_, p(a))) > 0.0) {
      std::swap(b, c);
      nrm = {-nrm[0], -nrm[1], -nrm[2]};
    }
    push_face(a, b, c, nrm);
  }

  void push_face(std::size_t a, std::size_t b, std::size_t c, Vec nrm) {
    const double len = norm(nrm);
    for (auto& x : nrm) x /= len;
    Face f{{a, b, c}, nrm, dot(nrm, p(a))};
    const std::size_t id = faces_.size();
    faces_.push_back(f);
    edges_[key(a, b)] = id;
    edges_[key(b, c)] = id;
    edges_[key(c, a)] = id;
  }

  void insert(std::size_t i) {
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (faces_[f].alive && dot(faces_[f].normal, p(i)) - faces_[f].offset > kVisibleEps) {
        visible.push_back(f);
      }
    }
    if (visible.empty()) return;
    const std::unordered_set<std::size_t> vis(visible.begin(), visible.end());
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    for (std::size_t f : visible) {
      const auto& v = faces_[f].v;
      for (int e = 0; e < 3; ++e) {
        const std::size_t a = v[e], b = v[(e + 1) % 3];
        const auto twin = edges_.find(key(b, a));
        if (twin == edges_.end() || !vis.count(twin->second)) horizon.emplace_back(a, b);
      }
    }
    for (std::size_t f : visible) {
      faces_[f].alive = false;
      const auto& v = faces_[f].v;
      for (int e = 0; e < 3; ++e) edges_.erase(key(v[e], v[(e + 1) % 3]));
    }
    for (const auto& [a, b] : horizon) {
      push_face(a, b, i, cross(sub(p(b), p(a)), sub(p(i), p(a))));
    }
  }

  std::span<const SpherePoint> pts_;
  Vec interior_{};
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
};

HullFacet to_facet(const Face& f, std::span<const SpherePoint> pts) {
  const SpherePoint m = SpherePoint::from_unit(f.normal[0], f.normal[1], f.normal[2]);
  double h = 0.0;
  for (std::size_t v : f.v) h += m.dot(pts[v]);
  h /= 3.0;
  return {f.v, m, std::sqrt(std::max(0.0, 2.0 - 2.0 * h)), h};
}

double nearest_distance(const SpherePoint& c, std::span<const SpherePoint> pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : pts) best = std::min(best, chord_distance(c, q));
  return best;
}

struct CapCandidate {
  double radius;
  SpherePoint center;
};

CapCandidate best_grid_center(const std::vector<SpherePoint>& centers,
                              std::span<const SpherePoint> pts) {
  CapCandidate best{-1.0, SpherePoint()};
  for (const auto& c : centers) {
    const double d = nearest_distance(c, pts);
    if (d > best.radius) best = {d, c};
  }
  return best;
}

}  // namespace

std::vector<HullFacet> convex_hull_3d(std::span<const SpherePoint> points) {
  Hull hull(points);
  const std::vector<Face> faces = hull.build();
  std::unordered_set<std::size_t> vertices;
  for (const auto& f : faces) vertices.insert(f.v.begin(), f.v.end());
  const long v = static_cast<long>(vertices.size());
  const long f = static_cast<long>(faces.size());
  if (3 * f % 2 != 0 || v - 3 * f / 2 + f != 2) {
    throw DegenerateInputError("DegenerateInput: hull fails the Euler characteristic check");
  }
  std::vector<HullFacet> out;
  out.reserve(faces.size());
  for (const auto& face : faces) out.push_back(to_facet(face, points));
  return out;
}

double fibonacci_covering_radius(std::size_t count) {
  static std::mutex mu;
  static std::map<std::size_t, double> cache;
  {
    const std::lock_guard<std::mutex> lock(mu);
    const auto it = cache.find(count);
    if (it != cache.end()) return it->second;
  }
  const auto lattice = fibonacci_lattice(count);
  const Configuration config(lattice, "fibonacci", 0);
  const double r = largest_empty_cap(config, EmptyCapMode::Exact).chord_radius;
  const std::lock_guard<std::mutex> lock(mu);
  cache.emplace(count, r);
  return r;
}

EmptyCap largest_empty_cap(const Configuration& config, EmptyCapMode mode,
                           const EmptyCapOptions& options) {
  const auto pts = config.points();
  if (pts.size() < 4) throw DegenerateInputError("DegenerateInput: need at least 4 points");
  if (mode == EmptyCapMode::Exact) {
    const auto facets = convex_hull_3d(pts);
    EmptyCap best;
    bool found = false;
    for (const auto& f : facets) {
      const double r = f.circum_chord_radius;
      if (found && r <= best.chord_radius) continue;
      if (nearest_distance(f.circumcenter, pts) < r - kEmptyCapTolerance) continue;
      best.center = f.circumcenter;
      best.chord_radius = r;
      found = true;
    }
    if (!found) throw Error("largest_empty_cap: no hull facet passed the emptiness check");
    best.area = kPi * best.chord_radius * best.chord_radius;
    return best;
  }

  const std::size_t g = std::max<std::size_t>(4, options.grid_centers);
  CapCandidate best = best_grid_center(fibonacci_lattice(g), pts);
  if (options.refine_factor > 0) {
    const double spacing = std::sqrt(kSphereArea / static_cast<double>(g));
    const long r = static_cast<long>(options.refine_factor);
    const auto basis = tangent_basis(best.center);
    const SpherePoint c0 = best.center;
    std::vector<SpherePoint> local;
    for (long a = -r; a <= r; ++a) {
      for (long b = -r; b <= r; ++b) {
        const double u = spacing * static_cast<double>(a) / static_cast<double>(r);
        const double v = spacing * static_cast<double>(b) / static_cast<double>(r);
        local.emplace_back(c0.x() + u * basis[0][0] + v * basis[1][0],
                           c0.y() + u * basis[0][1] + v * basis[1][1],
                           c0.z() + u * basis[0][2] + v * basis[1][2]);
      }
    }
    const CapCandidate refined = best_grid_center(local, pts);
    if (refined.radius > best.radius) best = refined;
  }
  EmptyCap out;
  out.center = best.center;
  out.chord_radius = best.radius;
  out.area = kPi * best.radius * best.radius;
  out.radius_tolerance = fibonacci_covering_radius(g);
  return out;
}

}  // namespace sphens
