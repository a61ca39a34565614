#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gpt2d/types.hpp"

namespace gpt2d {

struct SvgPolyline {
  std::vector<Complex> points;
  std::string stroke = "#000000";
  double width = 1.5;
  bool dashed = false;
  bool closed = true;
};

/// Fixed-size overlay plot of closed curves, equal-aspect, y up.
inline void write_svg(std::ostream& os, const std::vector<SvgPolyline>& lines, int size = 640) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& l : lines)
    for (const Complex& p : l.points) {
      xmin = std::min(xmin, p.real());
      xmax = std::max(xmax, p.real());
      ymin = std::min(ymin, p.imag());
      ymax = std::max(ymax, p.imag());
    }
  if (!(xmin <= xmax)) {
    xmin = ymin = -1;
    xmax = ymax = 1;
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double margin = 0.08 * span;
  const double scale = size / (span + 2 * margin);
  const double x0 = 0.5 * (xmin + xmax) - 0.5 * (span + 2 * margin);
  const double y0 = 0.5 * (ymin + ymax) - 0.5 * (span + 2 * margin);

  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
     << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"#ffffff\"/>\n";
  for (const auto& l : lines) {
    os << (l.closed ? "<polygon" : "<polyline") << " points=\"";
    for (size_t i = 0; i < l.points.size(); ++i) {
      const double px = (l.points[i].real() - x0) * scale;
      const double py = size - (l.points[i].imag() - y0) * scale;
      os << (i ? " " : "") << fmt(px) << ',' << fmt(py);
    }
    os << "\" fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\"" << fmt(l.width)
       << "\"";
    if (l.dashed) os << " stroke-dasharray=\"6,4\"";
    os << "/>\n";
  }
  os << "</svg>\n";
}

}  // namespace gpt2d
