// Small instance builders shared by the test binaries.

#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "shapemap/geometry.hpp"

namespace fixtures {

using shapemap::Point;
using shapemap::Polyline;

// Open curve sampled from a random sum of low-frequency sinusoids.
inline Polyline smooth_curve(std::mt19937_64& rng, int vertices = 120) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  double ax[3], ay[3], px[3], py[3];
  for (int k = 0; k < 3; ++k) {
    ax[k] = amp(rng) / (k + 1);
    ay[k] = amp(rng) / (k + 1);
    px[k] = phase(rng);
    py[k] = phase(rng);
  }
  std::vector<Point> pts;
  for (int i = 0; i < vertices; ++i) {
    double t = static_cast<double>(i) / (vertices - 1);
    Point p{2.0 * t, 0.0};
    for (int k = 0; k < 3; ++k) {
      p.x += ax[k] * std::sin((k + 1) * 3.0 * t + px[k]);
      p.y += ay[k] * std::sin((k + 1) * 3.0 * t + py[k]);
    }
    pts.push_back(p);
  }
  return Polyline(pts, false);
}

// Random polyline with a few long straight pieces.
inline Polyline random_polyline(std::mt19937_64& rng, int vertices) {
  std::uniform_real_distribution<double> c(0.0, 10.0);
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < vertices) {
    Point p{c(rng), c(rng)};
    if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
  }
  return Polyline(pts, false);
}

}  // namespace fixtures

#include "shapemap/network.hpp"

namespace fixtures {

struct EdgeSpec {
  std::string a;
  std::string b;
};

// Network with stations "s0".."s<k>" at the given points; every edge becomes a
// two-station line of its own.
inline shapemap::TransitNetwork make_network(const std::vector<Point>& pts,
                                             const std::vector<std::pair<int, int>>& edges) {
  shapemap::TransitNetwork net;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    net.add_station({"s" + std::to_string(i), "", pts[i]});
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::string a = "s" + std::to_string(edges[e].first);
    std::string b = "s" + std::to_string(edges[e].second);
    std::string line = "L" + std::to_string(e);
    net.add_connection({"c" + std::to_string(e), a, b, {line}});
    net.add_line({line, {}, {a, b}});
  }
  return net;
}

}  // namespace fixtures

namespace fixtures {

// rows x cols lattice with unit spacing; station "r<i>c<j>" at (j, i). Every
// row and every column is a line.
inline shapemap::TransitNetwork grid_network(int rows, int cols,
                                             double spacing = 1.0) {
  shapemap::TransitNetwork net;
  auto id = [](int i, int j) {
    return "r" + std::to_string(i) + "c" + std::to_string(j);
  };
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      net.add_station({id(i, j), "", {j * spacing, i * spacing}});
    }
  }
  for (int i = 0; i < rows; ++i) {
    shapemap::Line l{"row" + std::to_string(i), {200, 0, 0}, {}};
    for (int j = 0; j < cols; ++j) {
      l.stations.push_back(id(i, j));
      if (j > 0) net.add_connection({id(i, j - 1) + "-" + id(i, j), id(i, j - 1), id(i, j), {l.id}});
    }
    net.add_line(l);
  }
  for (int j = 0; j < cols; ++j) {
    shapemap::Line l{"col" + std::to_string(j), {0, 0, 200}, {}};
    for (int i = 0; i < rows; ++i) {
      l.stations.push_back(id(i, j));
      if (i > 0) net.add_connection({id(i - 1, j) + "|" + id(i, j), id(i - 1, j), id(i, j), {l.id}});
    }
    net.add_line(l);
  }
  return net;
}

inline Polyline square(double side, Point origin = {0, 0}) {
  return Polyline({origin, origin + Point{side, 0}, origin + Point{side, side},
                   origin + Point{0, side}},
                  true);
}

}  // namespace fixtures
