#include "shapemap/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace shapemap {

double angle_diff(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 2 * kPi);
  return d > kPi ? 2 * kPi - d : d;
}

BBox BBox::of(const std::vector<Point>& pts) {
  BBox b{std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) b.extend(p);
  return b;
}

void BBox::extend(Point p) {
  min_x = std::min(min_x, p.x);
  min_y = std::min(min_y, p.y);
  max_x = std::max(max_x, p.x);
  max_y = std::max(max_y, p.y);
}

void BBox::extend(const BBox& o) {
  min_x = std::min(min_x, o.min_x);
  min_y = std::min(min_y, o.min_y);
  max_x = std::max(max_x, o.max_x);
  max_y = std::max(max_y, o.max_y);
}

// _____________________________________________________________________________
Polyline::Polyline(std::vector<Point> vertices, bool closed)
    : vertices_(std::move(vertices)), closed_(closed) {
  if (vertices_.size() < 2) {
    throw std::invalid_argument("polyline needs at least 2 vertices");
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& p = vertices_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("polyline vertex " + std::to_string(i) +
                                  " is not finite");
    }
    if (i > 0 && vertices_[i - 1] == p) {
      throw std::invalid_argument("polyline repeats vertex " +
                                  std::to_string(i));
    }
  }
  if (closed_ && vertices_.front() == vertices_.back()) {
    throw std::invalid_argument(
        "closed polyline must not repeat its first vertex");
  }
}

std::size_t Polyline::segment_count() const {
  if (vertices_.size() < 2) return 0;
  return closed_ ? vertices_.size() : vertices_.size() - 1;
}

Segment Polyline::segment(std::size_t i) const {
  return {vertices_[i], vertices_[(i + 1) % vertices_.size()]};
}

double Polyline::length() const {
  double len = 0.0;
  for (std::size_t i = 0; i < segment_count(); ++i) len += segment(i).length();
  return len;
}

// _____________________________________________________________________________
Point closest_point_on_segment(const Segment& s, Point p) {
  Point d = s.b - s.a;
  double len2 = dot(d, d);
  if (len2 == 0.0) return s.a;
  double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + d * t;
}

double point_segment_distance(Point p, const Segment& s) {
  return dist(p, closest_point_on_segment(s, p));
}

ClosestPoint closest_point(const Polyline& line, Point p) {
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  double total = line.length();
  double before = 0.0;
  for (std::size_t i = 0; i < line.segment_count(); ++i) {
    Segment s = line.segment(i);
    Point q = closest_point_on_segment(s, p);
    double d = dist(p, q);
    if (d < best.distance) {
      best.point = q;
      best.distance = d;
      best.segment = i;
      best.arc_fraction = total > 0 ? (before + dist(s.a, q)) / total : 0.0;
    }
    before += s.length();
  }
  return best;
}

Polyline resample(const Polyline& line, double max_seg) {
  if (!(max_seg > 0.0)) {
    throw std::invalid_argument("resample: max_seg must be positive");
  }
  std::vector<Point> out;
  for (std::size_t i = 0; i < line.segment_count(); ++i) {
    Segment s = line.segment(i);
    double len = s.length();
    auto parts = static_cast<std::size_t>(std::ceil(len / max_seg));
    if (parts == 0) parts = 1;
    if (parts > 1 && static_cast<double>(parts - 1) * max_seg >= len) --parts;
    out.push_back(s.a);
    for (std::size_t k = 1; k < parts; ++k) {
      out.push_back(s.a + (s.b - s.a) * (static_cast<double>(k) /
                                          static_cast<double>(parts)));
    }
  }
  if (!line.closed()) out.push_back(line.vertices().back());
  return Polyline(std::move(out), line.closed());
}

Polyline resample_uniform(const Polyline& line, double spacing) {
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("resample_uniform: spacing must be positive");
  }
  const double total = line.length();
  auto steps = static_cast<std::size_t>(std::lround(total / spacing));
  steps = std::max<std::size_t>(steps, line.closed() ? 3 : 1);
  std::vector<Point> out;
  std::size_t seg = 0;
  double before = 0.0;
  const std::size_t count = line.closed() ? steps : steps + 1;
  for (std::size_t k = 0; k < count; ++k) {
    double at = total * static_cast<double>(k) / static_cast<double>(steps);
    while (seg + 1 < line.segment_count() && before + line.segment(seg).length() < at) {
      before += line.segment(seg).length();
      ++seg;
    }
    Segment s = line.segment(seg);
    double len = s.length();
    double t = len > 0.0 ? std::clamp((at - before) / len, 0.0, 1.0) : 0.0;
    out.push_back(s.a + (s.b - s.a) * t);
  }
  if (!line.closed()) out.back() = line.vertices().back();
  return Polyline(std::move(out), line.closed());
}

// _____________________________________________________________________________
int orientation(Point a, Point b, Point c) {
  double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

namespace {

// c is collinear with a-b; is it inside the closed bounding box of a-b?
bool within(Point a, Point b, Point c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}

bool plain_intersect(const Segment& s1, const Segment& s2) {
  int o1 = orientation(s1.a, s1.b, s2.a);
  int o2 = orientation(s1.a, s1.b, s2.b);
  int o3 = orientation(s2.a, s2.b, s1.a);
  int o4 = orientation(s2.a, s2.b, s1.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && within(s1.a, s1.b, s2.a)) return true;
  if (o2 == 0 && within(s1.a, s1.b, s2.b)) return true;
  if (o3 == 0 && within(s2.a, s2.b, s1.a)) return true;
  if (o4 == 0 && within(s2.a, s2.b, s1.b)) return true;
  return false;
}

}  // namespace

bool segments_intersect(const Segment& s1, const Segment& s2,
                        bool shared_endpoint) {
  if (!shared_endpoint) return plain_intersect(s1, s2);

  Point c, u, v;
  if (s1.a == s2.a) {
    c = s1.a, u = s1.b, v = s2.b;
  } else if (s1.a == s2.b) {
    c = s1.a, u = s1.b, v = s2.a;
  } else if (s1.b == s2.a) {
    c = s1.b, u = s1.a, v = s2.b;
  } else if (s1.b == s2.b) {
    c = s1.b, u = s1.a, v = s2.a;
  } else {
    return plain_intersect(s1, s2);
  }
  // Two segments leaving one point meet elsewhere only when they overlap.
  Point du = u - c;
  Point dv = v - c;
  if (du == Point{} || dv == Point{}) return false;
  return cross(du, dv) == 0.0 && dot(du, dv) > 0.0;
}

bool line_intersection(const Segment& s1, const Segment& s2, LineHit& out) {
  Point r = s1.b - s1.a;
  Point s = s2.b - s2.a;
  double denom = cross(r, s);
  if (denom == 0.0) return false;
  Point qp = s2.a - s1.a;
  out.t1 = cross(qp, s) / denom;
  out.t2 = cross(qp, r) / denom;
  out.point = s1.a + r * out.t1;
  return true;
}

// _____________________________________________________________________________
Polyline Similarity::apply(const Polyline& line) const {
  std::vector<Point> pts;
  pts.reserve(line.size());
  for (const auto& p : line.vertices()) pts.push_back(apply(p));
  return Polyline(std::move(pts), line.closed());
}

Similarity Similarity::then(const Similarity& next) const {
  return {scale * next.scale, next.apply(translation)};
}

Similarity bbox_align(const BBox& source, const BBox& target) {
  if (source.degenerate() || target.degenerate()) {
    throw std::invalid_argument("bbox_align: bounding box has zero area");
  }
  Similarity t;
  t.scale = std::min(target.width() / source.width(),
                     target.height() / source.height());
  t.translation = target.center() - source.center() * t.scale;
  return t;
}

}  // namespace shapemap
