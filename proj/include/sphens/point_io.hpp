#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sphens/geometry.hpp"

namespace sphens {

/// Version string written into every manifest.
const char* software_version() noexcept;

enum class PointFormat { Csv, Json };

/// Rows whose norm differs from 1 by more than this are rejected on read.
inline constexpr double kUnitRowTolerance = 1e-6;

/// CSV with header `x,y,z`, 17 significant digits per coordinate.
void write_points_csv(std::ostream& out, std::span<const SpherePoint> points);
std::vector<SpherePoint> read_points_csv(std::istream& in);

/// JSON array of [x, y, z] triples.
void write_points_json(std::ostream& out, std::span<const SpherePoint> points);
std::vector<SpherePoint> read_points_json(std::istream& in);

/// Picks the format from the extension (.json, anything else is CSV).
PointFormat format_for_path(const std::filesystem::path& path);

std::vector<SpherePoint> load_points(const std::filesystem::path& path);
void save_points(const std::filesystem::path& path, std::span<const SpherePoint> points);

/// Writes `<path>.manifest.json` = {sampler, n, seed, software_version}.
std::filesystem::path write_sample_manifest(const std::filesystem::path& path,
                                            const Configuration& config);

}  // namespace sphens
