#pragma once

// Static SVG 1.1 rendering of a trace: the initial figure and every step as
// nested polygons with stroke opacity fading by depth, the center locus as a
// polyline with point markers, and a small legend. The canvas autoscales to
// the bounding box of everything drawn (for decreasing tunnels that is the
// initial figure; for increasing ones the final figure) plus a 5% margin.

#include <cstdio>

#include "tunnel/engine.hpp"

namespace tunnel {

namespace detail {

inline std::string fmt_svg(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

struct SvgMapper {
  double min_x, min_y, max_x, max_y;
  double scale, width, height;

  std::string map(Point p) const {
    const double sx = (p.x - min_x) * scale;
    const double sy = (max_y - p.y) * scale;  // SVG y grows downward
    return fmt_svg(sx) + "," + fmt_svg(sy);
  }
};

}  // namespace detail

inline std::string render_svg(const TunnelTrace& trace) {
  std::vector<Point> everything = figure_vertices(trace.initial);
  for (const TunnelStep& s : trace.steps) {
    const auto v = figure_vertices(s.figure);
    everything.insert(everything.end(), v.begin(), v.end());
    everything.push_back(s.center);
  }

  double min_x = everything[0].x, max_x = everything[0].x;
  double min_y = everything[0].y, max_y = everything[0].y;
  for (const Point& p : everything) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double extent = std::max({max_x - min_x, max_y - min_y, 1e-30});
  const double margin = 0.05 * extent;
  min_x -= margin;
  min_y -= margin;
  max_x += margin;
  max_y += margin;

  detail::SvgMapper m{min_x, min_y, max_x, max_y, 0, 0, 0};
  m.width = 880.0;
  m.scale = m.width / (max_x - min_x);
  m.height = (max_y - min_y) * m.scale;

  auto polygon_points = [&](const Figure& f) {
    std::string pts;
    for (const Point& p : figure_vertices(f)) {
      if (!pts.empty()) pts += ' ';
      pts += m.map(p);
    }
    return pts;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt_svg(m.width) +
         "\" height=\"" + detail::fmt_svg(m.height + 28.0) + "\" viewBox=\"0 -28 " +
         detail::fmt_svg(m.width) + " " + detail::fmt_svg(m.height + 28.0) + "\">\n";

  // legend
  const std::string name = transform_info(trace.spec.kind).name;
  std::string legend = name + "  |  steps: " + std::to_string(trace.steps.size()) +
                       "  |  termination: " + termination_name(trace.termination.kind);
  if (trace.termination.error) legend += std::string(" (") + errc_name(*trace.termination.error) + ")";
  svg += "  <text x=\"6\" y=\"-10\" font-family=\"monospace\" font-size=\"13\" fill=\"#111\">" +
         legend + "</text>\n";

  // initial figure
  svg += "  <polygon points=\"" + polygon_points(trace.initial) +
         "\" fill=\"none\" stroke=\"#111111\" stroke-width=\"1.6\"/>\n";

  // steps, fading with depth
  const std::size_t n = trace.steps.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double opacity = std::max(0.12, 0.9 * (1.0 - static_cast<double>(i) / std::max<std::size_t>(n, 1)) + 0.1);
    svg += "  <polygon points=\"" + polygon_points(trace.steps[i].figure) +
           "\" fill=\"none\" stroke=\"#2563eb\" stroke-width=\"1\" stroke-opacity=\"" +
           detail::fmt_svg(opacity) + "\"/>\n";
  }

  // center locus
  if (!trace.steps.empty()) {
    std::string pts;
    for (const TunnelStep& s : trace.steps) {
      if (!pts.empty()) pts += ' ';
      pts += m.map(s.center);
    }
    if (n > 1)
      svg += "  <polyline points=\"" + pts +
             "\" fill=\"none\" stroke=\"#dc2626\" stroke-width=\"0.8\"/>\n";
    for (const TunnelStep& s : trace.steps) {
      const std::string at = m.map(s.center);
      const auto comma = at.find(',');
      svg += "  <circle cx=\"" + at.substr(0, comma) + "\" cy=\"" + at.substr(comma + 1) +
             "\" r=\"2.2\" fill=\"#dc2626\"/>\n";
    }
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace tunnel
