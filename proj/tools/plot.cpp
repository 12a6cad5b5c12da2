#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sphens/analytics.hpp"
#include "sphens/errors.hpp"
#include "sphens/experiments.hpp"
#include "sphens/point_io.hpp"

namespace sphens::plot {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 64.0, kRight = 150.0, kTop = 36.0, kBottom = 52.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double eval_function(const std::string& name, double x) {
  if (name == "gap_density") return gap_density(x);
  if (name == "gap_cdf_limit") return gap_cdf_limit(x);
  if (name == "exp_neg") return std::exp(-x);
  if (name == "min_spacing_limit_cdf") return min_spacing_limit_cdf(x);
  if (name == "iid_min_spacing_limit_cdf") return iid_min_spacing_limit_cdf(x);
  if (name == "corollary_coeff") return x == 0.0 ? 1.0 : energy_bounds(x).corollary_coeff;
  if (name == "rsz_coeff") return x == 0.0 ? 1.0 : energy_bounds(x).rsz_coeff;
  throw DomainError("plot: unknown function '" + name + "'");
}

using XY = std::vector<std::pair<double, double>>;

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw IoError(path.string() + ": empty file");
  return rows;
}

std::vector<double> csv_column(const std::filesystem::path& path, const std::string& column) {
  const auto rows = read_csv(path);
  const auto& header = rows.front();
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw IoError(path.string() + ": no column '" + column + "'");
  const auto idx = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (idx >= rows[r].size()) throw IoError(path.string() + ": short row");
    const double v = std::strtod(rows[r][idx].c_str(), nullptr);
    if (std::isfinite(v)) out.push_back(v);
  }
  return out;
}

XY curve_data(const nlohmann::json& src) {
  XY out;
  if (src.contains("function")) {
    const std::string name = src["function"].get<std::string>();
    const double a = src.value("x_min", 0.0);
    const double b = src.value("x_max", 1.0);
    const std::size_t k = src.value("samples", std::size_t{200});
    if (k < 2 || !(b > a)) throw DomainError("plot: need samples >= 2 and x_max > x_min");
    for (std::size_t i = 0; i < k; ++i) {
      const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1);
      out.emplace_back(x, eval_function(name, x));
    }
  } else if (src.contains("points")) {
    for (const auto& p : src["points"]) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  } else if (src.contains("file")) {
    const std::filesystem::path path = src["file"].get<std::string>();
    const auto xs = csv_column(path, src.value("x_column", std::string("x")));
    const auto ys = csv_column(path, src.value("y_column", std::string("y")));
    if (xs.size() != ys.size()) throw IoError(path.string() + ": column lengths differ");
    for (std::size_t i = 0; i < xs.size(); ++i) out.emplace_back(xs[i], ys[i]);
  } else {
    throw DomainError("plot: curve source needs function, points or file");
  }
  if (out.empty()) throw DomainError("plot: series has no data");
  return out;
}

std::vector<double> histogram_data(const nlohmann::json& src) {
  std::vector<double> out;
  if (src.contains("values")) {
    out = src["values"].get<std::vector<double>>();
  } else if (src.contains("file")) {
    const std::filesystem::path path = src["file"].get<std::string>();
    const std::string column = src.value("column", std::string("value"));
    out = csv_column(path, column);
    if (src.contains("statistic")) {
      // Raw experiment file: keep rows of one statistic.
      out.clear();
      for (const auto& row : read_raw_csv(path)) {
        if (row.statistic == src["statistic"].get<std::string>()) {
          const double v = std::strtod(row.value.c_str(), nullptr);
          if (std::isfinite(v)) out.push_back(v);
        }
      }
    }
  } else {
    throw DomainError("plot: histogram source needs values or file");
  }
  if (out.empty()) throw DomainError("plot: series has no data");
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void widen(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
}

void axes(std::ostringstream& svg, const Frame& f, const PlotSpec& spec) {
  const double left = kLeft, right = kWidth - kRight, top = kTop, bottom = kHeight - kBottom;
  svg << "<rect x=\"" << fmt3(left) << "\" y=\"" << fmt3(top) << "\" width=\"" << fmt3(right - left)
      << "\" height=\"" << fmt3(bottom - top) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    svg << "<text x=\"" << fmt3(f.px(xv)) << "\" y=\"" << fmt3(bottom + 16) << "\" font-size=\"11\" "
        << "text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    svg << "<text x=\"" << fmt3(left - 6) << "\" y=\"" << fmt3(f.py(yv) + 4) << "\" font-size=\"11\" "
        << "text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  svg << "<text x=\"" << fmt3((left + right) / 2) << "\" y=\"" << fmt3(kHeight - 12)
      << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fmt3((top + bottom) / 2) << "\" font-size=\"13\" "
      << "text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt3((top + bottom) / 2) << ")\">"
      << escape(spec.y_label) << "</text>\n";
  svg << "<text x=\"" << fmt3((left + right) / 2) << "\" y=\"22\" font-size=\"14\" "
      << "text-anchor=\"middle\">" << escape(spec.title) << "</text>\n";
}

void legend(std::ostringstream& svg, std::size_t i, const std::string& label) {
  const double y = kTop + 14.0 + 18.0 * static_cast<double>(i);
  const double x = kWidth - kRight + 10.0;
  svg << "<rect x=\"" << fmt3(x) << "\" y=\"" << fmt3(y - 8) << "\" width=\"12\" height=\"8\" fill=\""
      << kPalette[i % 6] << "\"/>\n";
  svg << "<text x=\"" << fmt3(x + 16) << "\" y=\"" << fmt3(y) << "\" font-size=\"11\">"
      << escape(label) << "</text>\n";
}

void render_curves(std::ostringstream& svg, const PlotSpec& spec) {
  std::vector<XY> data;
  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : spec.series) {
    data.push_back(curve_data(s.source));
    for (const auto& [x, y] : data.back()) {
      f.x0 = std::min(f.x0, x);
      f.x1 = std::max(f.x1, x);
      f.y0 = std::min(f.y0, y);
      f.y1 = std::max(f.y1, y);
    }
  }
  widen(f.x0, f.x1);
  widen(f.y0, f.y1);
  axes(svg, f, spec);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::string xs, ys, pts;
    for (const auto& [x, y] : data[i]) {
      if (!xs.empty()) {
        xs += ' ';
        ys += ' ';
        pts += ' ';
      }
      xs += full(x);
      ys += full(y);
      pts += fmt3(f.px(x)) + "," + fmt3(f.py(y));
    }
    svg << "<polyline class=\"series\" data-label=\"" << escape(spec.series[i].label) << "\" data-x=\""
        << xs << "\" data-y=\"" << ys << "\" points=\"" << pts << "\" fill=\"none\" stroke=\""
        << kPalette[i % 6] << "\" stroke-width=\"1.5\"/>\n";
    legend(svg, i, spec.series[i].label);
  }
}

void render_histograms(std::ostringstream& svg, const PlotSpec& spec) {
  std::vector<std::vector<double>> data;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : spec.series) {
    data.push_back(histogram_data(s.source));
    for (double v : data.back()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  widen(lo, hi);
  const std::size_t bins = spec.bins;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::vector<double>> density(data.size(), std::vector<double>(bins, 0.0));
  double ymax = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data[i]) {
      auto b = static_cast<std::size_t>((v - lo) / width);
      density[i][std::min(b, bins - 1)] += 1.0;
    }
    for (auto& d : density[i]) {
      d /= static_cast<double>(data[i].size()) * width;
      ymax = std::max(ymax, d);
    }
  }
  const Frame f{lo, hi, 0.0, ymax > 0.0 ? ymax : 1.0};
  axes(svg, f, spec);
  for (std::size_t i = 0; i < data.size(); ++i) {
    svg << "<g class=\"series\" data-label=\"" << escape(spec.series[i].label) << "\">\n";
    for (std::size_t b = 0; b < bins; ++b) {
      const double x0 = lo + width * static_cast<double>(b);
      const double y = density[i][b];
      svg << "<rect data-x=\"" << full(x0) << "\" data-y=\"" << full(y) << "\" x=\"" << fmt3(f.px(x0))
          << "\" y=\"" << fmt3(f.py(y)) << "\" width=\"" << fmt3(f.px(x0 + width) - f.px(x0))
          << "\" height=\"" << fmt3(f.py(0.0) - f.py(y)) << "\" fill=\"" << kPalette[i % 6]
          << "\" fill-opacity=\"0.45\"/>\n";
    }
    svg << "</g>\n";
    legend(svg, i, spec.series[i].label);
  }
}

void render_scatter(std::ostringstream& svg, const PlotSpec& spec) {
  const Frame f{-1.05, 1.05, -1.05, 1.05};
  axes(svg, f, spec);
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& src = spec.series[i].source;
    if (!src.contains("file")) throw DomainError("plot: scatter source needs a point file");
    const auto pts = load_points(src["file"].get<std::string>());
    if (pts.empty()) throw DomainError("plot: series has no data");
    svg << "<g class=\"series\" data-label=\"" << escape(spec.series[i].label) << "\">\n";
    for (const auto& p : pts) {
      // Orthographic view from +z; lower hemisphere drawn hollow.
      svg << "<circle cx=\"" << fmt3(f.px(p.x())) << "\" cy=\"" << fmt3(f.py(p.y()))
          << "\" r=\"2\" fill=\"" << (p.z() >= 0.0 ? kPalette[i % 6] : "none") << "\" stroke=\""
          << kPalette[i % 6] << "\"/>\n";
    }
    svg << "</g>\n";
    legend(svg, i, spec.series[i].label);
  }
}

}  // namespace

void PlotSpec::validate() const {
  if (series.empty()) throw DomainError("plot: at least one series is required");
  if (bins < 1) throw DomainError("plot: histogram bin count must be at least 1");
}

PlotSpec PlotSpec::from_json(const nlohmann::json& j) {
  PlotSpec spec;
  try {
    const std::string kind = j.value("kind", std::string("curve"));
    if (kind == "histogram") {
      spec.kind = PlotKind::Histogram;
    } else if (kind == "curve") {
      spec.kind = PlotKind::Curve;
    } else if (kind == "scatter") {
      spec.kind = PlotKind::Scatter3DProjection;
    } else {
      throw DomainError("plot: kind must be histogram, curve or scatter");
    }
    spec.title = j.value("title", std::string());
    spec.x_label = j.value("x_label", std::string());
    spec.y_label = j.value("y_label", std::string());
    const long bins = j.value("bins", 30L);
    if (bins < 1) throw DomainError("plot: histogram bin count must be at least 1");
    spec.bins = static_cast<std::size_t>(bins);
    if (j.contains("output")) spec.output = j["output"].get<std::string>();
    for (const auto& s : j.value("series", nlohmann::json::array())) {
      spec.series.push_back({s.value("label", std::string()), s.at("source")});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("plot spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names = {
      "gap_density",     "gap_cdf_limit", "exp_neg", "min_spacing_limit_cdf", "iid_min_spacing_limit_cdf",
      "corollary_coeff", "rsz_coeff"};
  return names;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"gap-density", "energy-bounds"};
  return names;
}

PlotSpec preset(const std::string& name) {
  PlotSpec spec;
  spec.kind = PlotKind::Curve;
  if (name == "gap-density") {
    spec.title = "Nearest-neighbour spacing density";
    spec.x_label = "x";
    spec.y_label = "density";
    spec.series = {
        {"Q(x)", {{"function", "gap_density"}, {"x_min", 0.0}, {"x_max", 4.0}, {"samples", 201}}},
        {"exp(-x)", {{"function", "exp_neg"}, {"x_min", 0.0}, {"x_max", 4.0}, {"samples", 201}}}};
    return spec;
  }
  if (name == "energy-bounds") {
    spec.title = "Riesz energy bound coefficients";
    spec.x_label = "s";
    spec.y_label = "coefficient";
    spec.series = {
        {"Gamma(1-s/2)/2^s", {{"function", "corollary_coeff"}, {"x_min", -1.9}, {"x_max", 1.9}, {"samples", 191}}},
        {"(2 sqrt(2 pi))^-s", {{"function", "rsz_coeff"}, {"x_min", -1.9}, {"x_max", 1.9}, {"samples", 191}}}};
    return spec;
  }
  throw DomainError("plot: unknown preset '" + name + "'");
}

std::string render_svg(const PlotSpec& spec) {
  spec.validate();
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  switch (spec.kind) {
    case PlotKind::Curve:
      render_curves(svg, spec);
      break;
    case PlotKind::Histogram:
      render_histograms(svg, spec);
      break;
    case PlotKind::Scatter3DProjection:
      render_scatter(svg, spec);
      break;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sphens::plot
