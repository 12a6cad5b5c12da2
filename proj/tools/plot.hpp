#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace sphens::plot {

enum class PlotKind { Histogram, Curve, Scatter3DProjection };

/// Where a series gets its numbers.
///   {"function": name, "x_min": a, "x_max": b, "samples": k}
///   {"points": [[x, y], ...]}            curve from literal pairs
///   {"values": [...]}                    histogram from literal values
///   {"file": path, "column": name}       CSV column (histogram) or x,y columns (curve)
///   {"file": path}                       point-set file (scatter)
struct Series {
  std::string label;
  nlohmann::json source;
};

struct PlotSpec {
  PlotKind kind = PlotKind::Curve;
  std::vector<Series> series;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::size_t bins = 30;
  std::filesystem::path output;

  /// Throws DomainError for an empty series list or bins < 1.
  static PlotSpec from_json(const nlohmann::json& j);
  void validate() const;
};

/// Functions usable as curve sources.
const std::vector<std::string>& function_names();

/// Named preset specs: "gap-density" (Q(x) against e^-x) and
/// "energy-bounds" (the two energy coefficients over s in (-2, 2)).
PlotSpec preset(const std::string& name);
const std::vector<std::string>& preset_names();

/// Self-contained SVG document.
std::string render_svg(const PlotSpec& spec);

}  // namespace sphens::plot
