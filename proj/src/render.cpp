#include "transona/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "transona/error.hpp"

namespace transona {

namespace {

std::string fmt(double v, int decimals = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

struct CanvasMap {
  double scale = 1.0;
  double ox = 0.0, oy = 0.0;
  double cw = 0.0, ch = 0.0;

  // y flipped: layout y grows up, SVG y grows down
  double x(double lx) const { return ox + lx * scale; }
  double y(double ly) const { return oy - ly * scale; }
};

CanvasMap make_map(const NodeLayout& layout, const RenderStyle& style) {
  CanvasMap m;
  m.cw = style.canvas_w;
  m.ch = style.canvas_h;
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (std::size_t i = 0; i < layout.x.size(); ++i) {
    min_x = std::min(min_x, layout.x[i]);
    max_x = std::max(max_x, layout.x[i]);
    min_y = std::min(min_y, layout.y[i]);
    max_y = std::max(max_y, layout.y[i]);
  }
  const double margin = 0.15;
  const double span_x = std::max(max_x - min_x, 1e-9);
  const double span_y = std::max(max_y - min_y, 1e-9);
  m.scale = std::min(style.canvas_w * (1 - 2 * margin) / span_x,
                     style.canvas_h * (1 - 2 * margin) / span_y);
  m.ox = style.canvas_w / 2 - (min_x + max_x) / 2 * m.scale;
  m.oy = style.canvas_h / 2 + (min_y + max_y) / 2 * m.scale;
  return m;
}

std::size_t node_index(const NodeLayout& layout, const Code& code) {
  for (std::size_t i = 0; i < layout.universe.size(); ++i)
    if (layout.universe[i] == code) return i;
  throw DataError("render: code " + code.id() + " missing from layout");
}

// triangle with its base at the source node, apex at the target
std::string triangle(double sx, double sy, double tx, double ty, double half_width,
                     const std::string& color, double opacity) {
  const double dx = tx - sx, dy = ty - sy;
  const double len = std::hypot(dx, dy);
  if (len < 1e-9) return "";
  const double px = -dy / len, py = dx / len;
  std::ostringstream os;
  os << "<polygon points=\"" << fmt(sx + px * half_width) << ',' << fmt(sy + py * half_width)
     << ' ' << fmt(sx - px * half_width) << ',' << fmt(sy - py * half_width) << ' ' << fmt(tx)
     << ',' << fmt(ty) << "\" fill=\"" << color << "\" fill-opacity=\"" << fmt(opacity)
     << "\"/>";
  return os.str();
}

std::string arrow_mark(double sx, double sy, double tx, double ty, const std::string& color) {
  const double mx = (sx + tx) / 2, my = (sy + ty) / 2;
  const double dx = tx - sx, dy = ty - sy;
  const double len = std::hypot(dx, dy);
  if (len < 1e-9) return "";
  const double ux = dx / len, uy = dy / len;
  const double px = -uy, py = ux;
  const double s = 6.0;
  std::ostringstream os;
  os << "<polygon class=\"arrow\" points=\"" << fmt(mx + ux * s) << ',' << fmt(my + uy * s)
     << ' ' << fmt(mx - ux * s + px * s) << ',' << fmt(my - uy * s + py * s) << ' '
     << fmt(mx - ux * s - px * s) << ',' << fmt(my - uy * s - py * s) << "\" fill=\"" << color
     << "\"/>";
  return os.str();
}

std::string svg_open(const RenderStyle& style) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(style.canvas_w, 0)
     << "\" height=\"" << fmt(style.canvas_h, 0) << "\" viewBox=\"0 0 "
     << fmt(style.canvas_w, 0) << ' ' << fmt(style.canvas_h, 0) << "\">\n";
  return os.str();
}

}  // namespace

void RenderStyle::validate() const {
  if (canvas_w <= 0 || canvas_h <= 0 || edge_width_scale <= 0 || node_radius_scale <= 0 ||
      font_size <= 0)
    throw ConfigError("render style scales must be positive");
  if (edge_threshold_frac < 0 || edge_threshold_frac > 1)
    throw ConfigError("edge_threshold_frac must lie in [0,1]");
}

std::string render_network(const NodeLayout& layout, const GroupNetwork& network,
                           const RenderStyle& style) {
  style.validate();
  const std::size_t c = network.universe.size();
  double max_edge = 0.0, max_self = 0.0;
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b) {
      if (a == b)
        max_self = std::max(max_self, network.weight(a, a));
      else
        max_edge = std::max(max_edge, network.weight(a, b));
    }
  const double threshold = style.edge_threshold_frac * max_edge;

  std::vector<std::size_t> pos(c);
  for (std::size_t i = 0; i < c; ++i) pos[i] = node_index(layout, network.universe[i]);
  CanvasMap map = make_map(layout, style);

  std::ostringstream os;
  os << svg_open(style);
  os << "<g class=\"edges\">\n";
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a + 1; b < c; ++b) {
      const double wab = network.weight(a, b), wba = network.weight(b, a);
      const bool draw_ab = max_edge > 0 && wab >= threshold && wab > 0;
      const bool draw_ba = max_edge > 0 && wba >= threshold && wba > 0;
      if (!draw_ab && !draw_ba) continue;
      const double ax = map.x(layout.x[pos[a]]), ay = map.y(layout.y[pos[a]]);
      const double bx = map.x(layout.x[pos[b]]), by = map.y(layout.y[pos[b]]);
      os << "<g class=\"edge\" data-pair=\"" << network.universe[a].id() << '|'
         << network.universe[b].id() << "\">";
      if (draw_ab)
        os << triangle(ax, ay, bx, by, style.edge_width_scale * wab / 2.0,
                       style.color_positive, 0.55);
      if (draw_ba)
        os << triangle(bx, by, ax, ay, style.edge_width_scale * wba / 2.0,
                       style.color_positive, 0.55);
      if (wab >= wba)
        os << arrow_mark(ax, ay, bx, by, "#222222");
      else
        os << arrow_mark(bx, by, ax, ay, "#222222");
      os << "</g>\n";
    }
  }
  os << "</g>\n<g class=\"nodes\">\n";
  for (std::size_t i = 0; i < c; ++i) {
    const double x = map.x(layout.x[pos[i]]), y = map.y(layout.y[pos[i]]);
    const double ring = style.min_radius + style.node_radius_scale * network.response_strength[i];
    const double self = network.self_strength[i];
    const double disc = style.min_radius * 0.5 + style.node_radius_scale * self;
    const double sat = max_self > 0 ? self / max_self : 0.0;
    os << "<g class=\"node\" data-code=\"" << network.universe[i].id() << "\">"
       << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(ring)
       << "\" fill=\"none\" stroke=\"" << style.color_positive << "\" stroke-width=\"1.5\"/>"
       << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(disc)
       << "\" fill=\"" << style.color_positive << "\" fill-opacity=\""
       << fmt(0.25 + 0.75 * sat) << "\"/>"
       << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y - ring - 4) << "\" font-size=\""
       << fmt(style.font_size, 0) << "\" text-anchor=\"middle\">" << network.universe[i].id()
       << "</text></g>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string render_subtracted(const NodeLayout& layout, const SubtractedNetwork& subtracted,
                              const RenderStyle& style) {
  style.validate();
  const std::size_t c = subtracted.universe.size();
  auto diff = [&](std::size_t a, std::size_t b) { return subtracted.diff_weights[a * c + b]; };
  double max_abs = 0.0;
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b)
      if (a != b) max_abs = std::max(max_abs, std::abs(diff(a, b)));
  const double threshold = style.edge_threshold_frac * max_abs;

  std::vector<std::size_t> pos(c);
  for (std::size_t i = 0; i < c; ++i) pos[i] = node_index(layout, subtracted.universe[i]);
  CanvasMap map = make_map(layout, style);

  std::ostringstream os;
  os << svg_open(style);
  os << "<g class=\"legend\"><rect x=\"10\" y=\"10\" width=\"12\" height=\"12\" fill=\""
     << style.color_positive << "\"/><text x=\"26\" y=\"20\" font-size=\""
     << fmt(style.font_size, 0) << "\">" << subtracted.group_a
     << "</text><rect x=\"10\" y=\"28\" width=\"12\" height=\"12\" fill=\""
     << style.color_negative << "\"/><text x=\"26\" y=\"38\" font-size=\""
     << fmt(style.font_size, 0) << "\">" << subtracted.group_b << "</text></g>\n";
  os << "<g class=\"edges\">\n";
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a + 1; b < c; ++b) {
      bool any = false;
      std::ostringstream eg;
      for (auto [s, t] : {std::pair{a, b}, std::pair{b, a}}) {
        const double d = diff(s, t);
        if (max_abs <= 0 || std::abs(d) < threshold || d == 0.0) continue;
        const std::string& color = d > 0 ? style.color_positive : style.color_negative;
        const double sx = map.x(layout.x[pos[s]]), sy = map.y(layout.y[pos[s]]);
        const double tx = map.x(layout.x[pos[t]]), ty = map.y(layout.y[pos[t]]);
        eg << triangle(sx, sy, tx, ty, style.edge_width_scale * std::abs(d) / 2.0, color,
                       0.2 + 0.8 * std::abs(d) / max_abs);
        any = true;
      }
      if (!any) continue;
      os << "<g class=\"edge\" data-pair=\"" << subtracted.universe[a].id() << '|'
         << subtracted.universe[b].id() << "\">" << eg.str() << "</g>\n";
    }
  }
  os << "</g>\n<g class=\"nodes\">\n";
  for (std::size_t i = 0; i < c; ++i) {
    const double x = map.x(layout.x[pos[i]]), y = map.y(layout.y[pos[i]]);
    const double d = diff(i, i);
    const std::string& color =
        d >= 0 ? style.color_positive : style.color_negative;
    const double disc =
        style.min_radius + (max_abs > 0 ? style.node_radius_scale * std::abs(d) : 0.0);
    os << "<g class=\"node\" data-code=\"" << subtracted.universe[i].id() << "\">"
       << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(disc)
       << "\" fill=\"" << color << "\" fill-opacity=\"0.5\"/>"
       << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y - disc - 4) << "\" font-size=\""
       << fmt(style.font_size, 0) << "\" text-anchor=\"middle\">" << subtracted.universe[i].id()
       << "</text></g>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string export_dot(const NodeLayout& layout, const GroupNetwork& network,
                       const RenderStyle& style) {
  style.validate();
  const std::size_t c = network.universe.size();
  double max_edge = 0.0;
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b)
      if (a != b) max_edge = std::max(max_edge, network.weight(a, b));
  const double threshold = style.edge_threshold_frac * max_edge;

  std::ostringstream os;
  os << "digraph ona {\n";
  for (std::size_t i = 0; i < c; ++i) {
    const std::size_t p = node_index(layout, network.universe[i]);
    os << "  \"" << network.universe[i].id() << "\" [pos=\"" << fmt(layout.x[p], 6) << ','
       << fmt(layout.y[p], 6) << "!\", self=\"" << fmt(network.self_strength[i], 6)
       << "\", response=\"" << fmt(network.response_strength[i], 6) << "\"];\n";
  }
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b) {
      if (a == b) continue;
      const double w = network.weight(a, b);
      if (w <= 0 || (max_edge > 0 && w < threshold)) continue;
      os << "  \"" << network.universe[a].id() << "\" -> \"" << network.universe[b].id()
         << "\" [weight=\"" << fmt(w, 6) << "\"];\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace transona
