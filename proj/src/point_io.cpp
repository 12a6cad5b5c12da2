#include "sphens/point_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sphens/errors.hpp"

#ifndef SPHENS_VERSION_STRING
#define SPHENS_VERSION_STRING "0.0.0"
#endif

namespace sphens {

const char* software_version() noexcept { return SPHENS_VERSION_STRING; }

namespace {

std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SpherePoint checked_point(double x, double y, double z, std::size_t row) {
  const double norm = std::hypot(x, y, z);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitRowTolerance) {
    throw IoError("row " + std::to_string(row) + ": not a unit vector (|p| = " +
                  format_coord(norm) + ")");
  }
  // Rows already unit to rounding keep their exact bits.
  if (std::abs(norm - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    return SpherePoint::from_unit(x, y, z);
  }
  return SpherePoint(x, y, z);
}

double parse_double(const std::string& field, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw IoError("row " + std::to_string(row) + ": cannot parse number '" + field + "'");
  }
}

}  // namespace

void write_points_csv(std::ostream& out, std::span<const SpherePoint> points) {
  out << "x,y,z\n";
  for (const auto& p : points) {
    out << format_coord(p.x()) << ',' << format_coord(p.y()) << ',' << format_coord(p.z()) << '\n';
  }
}

std::vector<SpherePoint> read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z") throw IoError("CSV header must be 'x,y,z'");
  std::vector<SpherePoint> points;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string fx, fy, fz, extra;
    if (!std::getline(ss, fx, ',') || !std::getline(ss, fy, ',') || !std::getline(ss, fz, ',') ||
        std::getline(ss, extra, ',')) {
      throw IoError("row " + std::to_string(row) + ": expected three fields");
    }
    points.push_back(
        checked_point(parse_double(fx, row), parse_double(fy, row), parse_double(fz, row), row));
  }
  return points;
}

void write_points_json(std::ostream& out, std::span<const SpherePoint> points) {
  out << "[";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    out << (i == 0 ? "\n  [" : ",\n  [") << format_coord(p.x()) << ", " << format_coord(p.y())
        << ", " << format_coord(p.z()) << "]";
  }
  out << "\n]\n";
}

std::vector<SpherePoint> read_points_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw IoError("JSON point set must be an array of [x, y, z]");
  std::vector<SpherePoint> points;
  points.reserve(doc.size());
  std::size_t row = 0;
  for (const auto& item : doc) {
    ++row;
    if (!item.is_array() || item.size() != 3 || !item[0].is_number() || !item[1].is_number() ||
        !item[2].is_number()) {
      throw IoError("row " + std::to_string(row) + ": expected [x, y, z]");
    }
    points.push_back(
        checked_point(item[0].get<double>(), item[1].get<double>(), item[2].get<double>(), row));
  }
  return points;
}

PointFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? PointFormat::Json : PointFormat::Csv;
}

std::vector<SpherePoint> load_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return format_for_path(path) == PointFormat::Json ? read_points_json(in) : read_points_csv(in);
}

void save_points(const std::filesystem::path& path, std::span<const SpherePoint> points) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  if (format_for_path(path) == PointFormat::Json) {
    write_points_json(out, points);
  } else {
    write_points_csv(out, points);
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::filesystem::path write_sample_manifest(const std::filesystem::path& path,
                                            const Configuration& config) {
  nlohmann::json manifest = {{"sampler", config.sampler_id()},
                             {"n", config.size()},
                             {"seed", config.seed()},
                             {"software_version", software_version()}};
  std::filesystem::path out_path = path;
  out_path += ".manifest.json";
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path.string());
  out << manifest.dump(2) << '\n';
  return out_path;
}

}  // namespace sphens
