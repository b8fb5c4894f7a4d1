// SVG rendering of a laid-out network.

#pragma once

#include <string>
#include <vector>

#include "shapemap/network.hpp"
#include "shapemap/route_matching.hpp"

namespace shapemap {

struct SvgOptions {
  double width = 800.0;  // drawing width in px; height follows the aspect ratio
  double margin = 20.0;
  double stroke = 3.0;
  // Distance between parallel lines on one connection, in strokes.
  double line_spacing = 1.5;
  double station_radius = 3.0;
  bool draw_shape = true;
};

/// One path element per line per chain of consecutive routed connections
/// (unrouted connections get a dashed path of their own), a circle per input
/// station, and the guide shape in gray underneath. Split fragments are drawn
/// as one circle at their centroid; planarization dummies get none. Lines
/// sharing a connection are offset perpendicular to it.
/// `paths` holds the drawn geometry of every connection of `net` and
/// `routed` flags the ones that came out of routing (empty means all).
std::string emit_svg(const TransitNetwork& net, const std::vector<Point>& positions,
                     const std::vector<std::vector<Point>>& paths,
                     const std::vector<char>& routed, const GuideShape* shape,
                     const SvgOptions& options = {});

}  // namespace shapemap
