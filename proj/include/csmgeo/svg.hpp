#pragma once
// Minimal SVG plotter: polylines, point markers, axes, and a diverging color
// map. CSV files are the authoritative outputs; these renders are a visual
// convenience without external dependencies.

#include <sstream>
#include <string>
#include <vector>

namespace csmgeo {

struct SvgPlot {
  double x_min, x_max, y_min, y_max;  // data window
  double size = 560.0;                // drawing area, px
  double pad = 60.0;

  SvgPlot(double x_min, double x_max, double y_min, double y_max);

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double width = 1.5);
  void circle(double x, double y, double radius_px, const std::string& fill);
  void square(double x, double y, double half_px, const std::string& fill);
  void text(double x, double y, const std::string& s, int font_px = 12);
  void axes(const std::string& x_label, const std::string& y_label);
  void save(const std::string& path) const;

  double px(double x) const;  // data -> pixel
  double py(double y) const;

 private:
  std::ostringstream body_;
};

// Diverging blue-white-red map on [-1, 1] (clamped), returned as "#rrggbb".
std::string diverging_color(double v);

}  // namespace csmgeo
