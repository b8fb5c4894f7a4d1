// Geometry kernels shared by all layout stages.

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace shapemap {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Point& o) const = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return norm(a - b); }
inline double angle_of(Point v) { return std::atan2(v.y, v.x); }
// Counter-clockwise quarter turn.
inline Point perp(Point v) { return {-v.y, v.x}; }

// Absolute difference of two directions, wrapped to [0, pi].
double angle_diff(double a, double b);

struct Segment {
  Point a;
  Point b;
  double length() const { return dist(a, b); }
};

struct BBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  static BBox of(const std::vector<Point>& pts);
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  Point center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }
  void extend(Point p);
  void extend(const BBox& o);
  bool degenerate() const { return !(width() > 0.0) || !(height() > 0.0); }
  bool contains(Point p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

/// Ordered vertex sequence, optionally closed. A closed polyline stores each
/// vertex once; the closing segment from last to first vertex is implicit.
///
/// Throws std::invalid_argument for fewer than two vertices, non-finite
/// coordinates, or repeated consecutive vertices.
class Polyline {
 public:
  Polyline() = default;
  Polyline(std::vector<Point> vertices, bool closed = false);

  const std::vector<Point>& vertices() const { return vertices_; }
  bool closed() const { return closed_; }
  std::size_t size() const { return vertices_.size(); }
  std::size_t segment_count() const;
  Segment segment(std::size_t i) const;
  double length() const;
  BBox bbox() const { return BBox::of(vertices_); }

  bool operator==(const Polyline& o) const = default;

 private:
  std::vector<Point> vertices_;
  bool closed_ = false;
};

struct ClosestPoint {
  Point point;
  double distance = 0.0;
  std::size_t segment = 0;
  // Position along the polyline as a fraction of its total length.
  double arc_fraction = 0.0;
};

ClosestPoint closest_point(const Polyline& line, Point p);
Point closest_point_on_segment(const Segment& s, Point p);
double point_segment_distance(Point p, const Segment& s);

/// Splits every segment longer than `max_seg` into equal parts. Input
/// vertices are kept. Throws std::invalid_argument if max_seg <= 0.
Polyline resample(const Polyline& line, double max_seg);

/// Points at equal arc-length steps as close to `spacing` as the length
/// allows: round(length / spacing) steps, at least one for an open polyline
/// and three for a closed one. Corners between the steps are cut. Throws
/// std::invalid_argument if spacing <= 0.
Polyline resample_uniform(const Polyline& line, double spacing);

// -- Segment predicates ------------------------------------------------------

/// Sign of the turn a -> b -> c: +1 left, -1 right, 0 collinear.
int orientation(Point a, Point b, Point c);

/// True iff the closed segments share at least one point. When
/// `shared_endpoint` is set the segments are declared to meet at a common
/// endpoint and only contact beyond that single point counts.
bool segments_intersect(const Segment& s1, const Segment& s2,
                        bool shared_endpoint = false);

/// Intersection point of two non-parallel segment supporting lines, with the
/// parameters along each segment.
struct LineHit {
  Point point;
  double t1 = 0.0;
  double t2 = 0.0;
};
bool line_intersection(const Segment& s1, const Segment& s2, LineHit& out);

// -- Similarity transforms ---------------------------------------------------

/// Uniform scale followed by translation. No rotation.
struct Similarity {
  double scale = 1.0;
  Point translation;

  Point apply(Point p) const { return p * scale + translation; }
  Polyline apply(const Polyline& line) const;
  Similarity then(const Similarity& next) const;
};

/// Maps `source` onto `target`: scale is the smaller of the two axis ratios and
/// the box centers coincide. Throws std::invalid_argument on zero-area boxes.
Similarity bbox_align(const BBox& source, const BBox& target);

// -- Direction-based integral Frechet distance -------------------------------

/// Tangent angles sampled at the midpoints of `n` equal arc-length intervals.
struct DirectionSample {
  double position = 0.0;  // fraction of total length
  double angle = 0.0;     // radians in [-pi, pi)
};
using DirectionProfile = std::vector<DirectionSample>;

DirectionProfile direction_profile(const Polyline& line, int n);

struct MatchResult {
  double distance = 0.0;
  // Monotone coupling path as (sample index on first curve, sample index on
  // second curve). For partial matches the second index is relative to the
  // whole second curve.
  std::vector<std::pair<int, int>> correspondence;
  double start = 0.0;
  double end = 1.0;
};

inline constexpr int kDefaultSamples = 64;

/// Minimum over monotone couplings of the integrated wrapped angle difference,
/// measured by the L1 length of the coupling path in normalized arc length.
/// Lies in [0, 2*pi]; invariant under translation and uniform scaling.
///
/// The value is evaluated exactly on the lattice of both curves' vertex
/// breakpoints. The sample counts set the resolution of the reported
/// correspondence.
MatchResult integral_frechet(const Polyline& a, const Polyline& b,
                             int n_samples = kDefaultSamples);
MatchResult integral_frechet(const Polyline& a, const Polyline& b, int n_a,
                             int n_b);

/// Distance only, without the correspondence.
double frechet_distance(const Polyline& a, const Polyline& b);

/// Same distance for equal-length steps of the given angles.
MatchResult frechet_on_angles(const std::vector<double>& a,
                              const std::vector<double>& b);

/// Best match of `w` against a sub-curve of `p`. Sub-curve endpoints are
/// restricted to the sample boundaries k / n_samples of `p`, and a sub-curve
/// covers at least two samples. Ties resolve to the earliest start, then the
/// longest sub-curve.
MatchResult partial_frechet(const Polyline& w, const Polyline& p,
                            int n_samples = kDefaultSamples);

}  // namespace shapemap
