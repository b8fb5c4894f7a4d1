#include "shapemap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace shapemap {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
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

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

// Polyline shifted sideways by `off` (positive to the left), with mitred
// joints.
std::vector<Point> offset(const std::vector<Point>& pts, double off) {
  if (off == 0.0 || pts.size() < 2) return pts;
  std::vector<Point> normals;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    Point d = pts[k + 1] - pts[k];
    double n = norm(d);
    normals.push_back(n > 0.0 ? perp(d) * (1.0 / n) : Point{0, 0});
  }
  std::vector<Point> out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    Point a = normals[k == 0 ? 0 : k - 1];
    Point b = normals[std::min(k, normals.size() - 1)];
    Point m = a + b;
    double len = norm(m);
    if (len < 1e-12) {
      out.push_back(pts[k] + b * off);
      continue;
    }
    m = m * (1.0 / len);
    double c = std::max(dot(m, b), 0.5);
    out.push_back(pts[k] + m * (off / c));
  }
  return out;
}

std::string path_data(const std::vector<Point>& pts, bool closed) {
  std::string d;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    d += k == 0 ? "M" : " L";
    d += fmt(pts[k].x) + ' ' + fmt(pts[k].y);
  }
  if (closed) d += " Z";
  return d;
}

}  // namespace

std::string emit_svg(const TransitNetwork& net, const std::vector<Point>& positions,
                     const std::vector<std::vector<Point>>& paths,
                     const std::vector<char>& routed, const GuideShape* shape,
                     const SvgOptions& options) {
  BBox box = BBox::of(positions);
  for (const auto& p : paths) {
    for (Point q : p) box.extend(q);
  }
  if (shape && options.draw_shape) box.extend(shape->bbox());
  const double span = std::max({box.width(), box.height(), 1e-9});
  const double scale = (options.width - 2 * options.margin) / span;
  const double height = box.height() * scale + 2 * options.margin;
  auto map = [&](Point p) {
    return Point{options.margin + (p.x - box.min_x) * scale,
                 options.margin + (box.max_y - p.y) * scale};
  };
  auto map_all = [&](const std::vector<Point>& pts) {
    std::vector<Point> out;
    for (Point p : pts) out.push_back(map(p));
    return out;
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt(options.width) + "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " +
         fmt(options.width) + ' ' + fmt(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  if (shape && options.draw_shape) {
    out += "<g id=\"shape\" fill=\"none\" stroke=\"#c8c8c8\" stroke-width=\"" +
           fmt(options.stroke * 4) + "\" stroke-linejoin=\"round\" stroke-linecap=\"round\">\n";
    for (const auto& l : shape->polylines()) {
      out += "<path d=\"" + path_data(map_all(l.vertices()), l.closed()) + "\"/>\n";
    }
    out += "</g>\n";
  }

  // Screen-space geometry of one line's pass over connection c, oriented
  // from station `from`.
  auto piece = [&](const std::string& line, std::size_t c, std::size_t from) {
    const auto& lines = net.connections()[c].lines;
    auto it = lines.find(line);
    double j = static_cast<double>(std::distance(lines.begin(), it));
    double k = static_cast<double>(lines.size());
    double off = (j - (k - 1) / 2) * options.line_spacing * options.stroke;
    // Left of the stored direction in model space is right on screen.
    std::vector<Point> pts = offset(map_all(paths[c]), -off);
    if (net.from_index(c) != from) std::reverse(pts.begin(), pts.end());
    return pts;
  };
  auto is_routed = [&](std::size_t c) { return routed.empty() || routed[c]; };

  out += "<g id=\"lines\" fill=\"none\" stroke-width=\"" + fmt(options.stroke) +
         "\" stroke-linejoin=\"round\" stroke-linecap=\"round\">\n";
  for (const auto& l : net.lines()) {
    std::string color = hex(l.color);
    std::vector<Point> chain;
    auto flush = [&] {
      if (chain.size() >= 2) {
        out += "<path data-line=\"" + escape(l.id) + "\" stroke=\"" + color + "\" d=\"" +
               path_data(chain, false) + "\"/>\n";
      }
      chain.clear();
    };
    for (std::size_t i = 0; i + 1 < l.stations.size(); ++i) {
      std::size_t a = net.station_at(l.stations[i]);
      std::size_t b = net.station_at(l.stations[i + 1]);
      auto c = net.connection_between(a, b);
      if (!c) continue;
      auto pts = piece(l.id, *c, a);
      if (!is_routed(*c)) {
        flush();
        out += "<path data-line=\"" + escape(l.id) + "\" stroke=\"" + color +
               "\" stroke-dasharray=\"" + fmt(options.stroke * 2) + "\" d=\"" +
               path_data(pts, false) + "\"/>\n";
        continue;
      }
      for (Point p : pts) {
        if (chain.empty() || !(chain.back() == p)) chain.push_back(p);
      }
    }
    flush();
  }
  out += "</g>\n";

  // One circle per input station.
  std::vector<std::string> order;
  std::map<std::string, std::pair<Point, int>> merged;
  for (std::size_t s = 0; s < net.stations().size(); ++s) {
    const auto& st = net.stations()[s];
    if (st.kind != StationKind::Real) continue;
    const std::string& key = st.origin.empty() ? st.id : st.origin;
    auto [it, fresh] = merged.try_emplace(key, Point{0, 0}, 0);
    if (fresh) order.push_back(key);
    it->second.first = it->second.first + positions[s];
    ++it->second.second;
  }
  out += "<g id=\"stations\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"" +
         fmt(options.stroke / 2) + "\">\n";
  for (const auto& key : order) {
    auto [sum, n] = merged[key];
    Point p = map(sum * (1.0 / n));
    out += "<circle data-station=\"" + escape(key) + "\" cx=\"" + fmt(p.x) + "\" cy=\"" +
           fmt(p.y) + "\" r=\"" + fmt(options.station_radius) + "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace shapemap
