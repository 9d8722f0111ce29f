#include "csmgeo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "csmgeo/util.hpp"

namespace csmgeo {

SvgPlot::SvgPlot(double x_min, double x_max, double y_min, double y_max)
    : x_min(x_min), x_max(x_max), y_min(y_min), y_max(y_max) {
  if (!(x_max > x_min) || !(y_max > y_min))
    throw std::invalid_argument("SvgPlot: empty data window");
}

double SvgPlot::px(double x) const { return pad + (x - x_min) / (x_max - x_min) * size; }
double SvgPlot::py(double y) const { return pad + (y_max - y) / (y_max - y_min) * size; }

void SvgPlot::polyline(const std::vector<std::pair<double, double>>& pts,
                       const std::string& color, double width) {
  if (pts.size() < 2) return;
  body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
        << "\" points=\"";
  for (const auto& [x, y] : pts) body_ << fmt17(px(x)) << "," << fmt17(py(y)) << " ";
  body_ << "\"/>\n";
}

void SvgPlot::circle(double x, double y, double radius_px, const std::string& fill) {
  body_ << "<circle cx=\"" << fmt17(px(x)) << "\" cy=\"" << fmt17(py(y)) << "\" r=\"" << radius_px
        << "\" fill=\"" << fill << "\"/>\n";
}

void SvgPlot::square(double x, double y, double half_px, const std::string& fill) {
  body_ << "<rect x=\"" << fmt17(px(x) - half_px) << "\" y=\"" << fmt17(py(y) - half_px)
        << "\" width=\"" << 2 * half_px << "\" height=\"" << 2 * half_px << "\" fill=\"" << fill
        << "\"/>\n";
}

void SvgPlot::text(double x, double y, const std::string& s, int font_px) {
  body_ << "<text x=\"" << fmt17(x) << "\" y=\"" << fmt17(y) << "\" font-size=\"" << font_px
        << "\" font-family=\"sans-serif\">" << s << "</text>\n";
}

void SvgPlot::axes(const std::string& x_label, const std::string& y_label) {
  double x0 = pad, x1 = pad + size, y0 = pad, y1 = pad + size;
  body_ << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << size << "\" height=\"" << size
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  text(0.5 * (x0 + x1) - 20, y1 + 36, x_label);
  text(12, 0.5 * (y0 + y1), y_label);
  text(x0 - 8, y1 + 16, fmt17(x_min).substr(0, 5));
  text(x1 - 24, y1 + 16, fmt17(x_max).substr(0, 5));
  text(x0 - 40, y1 + 4, fmt17(y_min).substr(0, 5));
  text(x0 - 40, y0 + 8, fmt17(y_max).substr(0, 5));
}

void SvgPlot::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write svg: " + path);
  double total = size + 2 * pad;
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << total
    << "\" viewBox=\"0 0 " << total << " " << total << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << body_.str() << "</svg>\n";
}

std::string diverging_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  // blue (-1) -> white (0) -> red (+1)
  double r, g, b;
  if (v < 0) {
    r = 1.0 + v;
    g = 1.0 + v;
    b = 1.0;
  } else {
    r = 1.0;
    g = 1.0 - v;
    b = 1.0 - v;
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(r * 255)),
                static_cast<int>(std::lround(g * 255)), static_cast<int>(std::lround(b * 255)));
  return buf;
}

}  // namespace csmgeo
