#pragma once

#include <string>
#include <utility>
#include <vector>

namespace pxg::cli {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  ///< (x, y), y > 0 on log axes
};

struct PlotStyle {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
};

/// Static SVG with one polyline (plus markers) per series.
std::string render_svg(const std::vector<Series>& series, const PlotStyle& style);

}  // namespace pxg::cli
