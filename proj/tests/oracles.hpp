// Reference implementations used only by the tests. They are written
// independently of the library code paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "shapemap/geometry.hpp"
#include "shapemap/network.hpp"

namespace oracle {

using shapemap::Point;
using shapemap::Polyline;

inline constexpr double kPi = 3.14159265358979323846;

// Tangent angle at arc-length fraction t, found by walking the segments.
inline double tangent_at(const Polyline& line, double t) {
  std::vector<Point> v = line.vertices();
  if (line.closed()) v.push_back(v.front());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    total += std::hypot(v[i + 1].x - v[i].x, v[i + 1].y - v[i].y);
  }
  double target = t * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    double len = std::hypot(v[i + 1].x - v[i].x, v[i + 1].y - v[i].y);
    if (acc + len > target || i + 2 == v.size()) {
      return std::atan2(v[i + 1].y - v[i].y, v[i + 1].x - v[i].x);
    }
    acc += len;
  }
  return 0.0;
}

inline double wrapped(double a, double b) {
  double d = std::fabs(a - b);
  while (d > 2 * kPi) d -= 2 * kPi;
  return std::min(d, 2 * kPi - d);
}

// Full O(n_a * n_b) coupling DP over midpoint samples. Each step pays the
// entered cell's cost times the arc length it advances on each curve.
inline double frechet(const Polyline& a, const Polyline& b, int na, int nb) {
  std::vector<double> ta(na), tb(nb);
  for (int i = 0; i < na; ++i) ta[i] = tangent_at(a, (i + 0.5) / na);
  for (int j = 0; j < nb; ++j) tb[j] = tangent_at(b, (j + 0.5) / nb);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(na, std::vector<double>(nb, inf));
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      double c = wrapped(ta[i], tb[j]);
      if (i == 0 && j == 0) {
        dp[i][j] = c * (1.0 / na + 1.0 / nb);
        continue;
      }
      if (i > 0) dp[i][j] = std::min(dp[i][j], dp[i - 1][j] + c / na);
      if (j > 0) dp[i][j] = std::min(dp[i][j], dp[i][j - 1] + c / nb);
      if (i > 0 && j > 0) {
        dp[i][j] = std::min(dp[i][j], dp[i - 1][j - 1] + c * (1.0 / na + 1.0 / nb));
      }
    }
  }
  return dp[na - 1][nb - 1];
}

// Vertex positions of `line` as fractions of its length.
inline std::vector<double> breakpoints(const Polyline& line) {
  std::vector<Point> v = line.vertices();
  if (line.closed()) v.push_back(v.front());
  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    cum.push_back(cum.back() +
                  std::hypot(v[i + 1].x - v[i].x, v[i + 1].y - v[i].y));
  }
  for (auto& c : cum) c /= cum.back();
  return cum;
}

// Exact distance of two polylines by enumerating every monotone staircase of
// cells in the breakpoint lattice. Along a staircase each a-interval is
// traversed inside the visited cells of its row, so its cheapest such cell
// is what it pays; likewise for b-intervals and columns. Exponential; keep
// the inputs to a handful of segments.
inline double exact_frechet(const Polyline& a, const Polyline& b) {
  const auto sa = breakpoints(a);
  const auto sb = breakpoints(b);
  const int A = static_cast<int>(sa.size()) - 1, B = static_cast<int>(sb.size()) - 1;
  std::vector<std::vector<double>> cell(A, std::vector<double>(B));
  for (int i = 0; i < A; ++i) {
    for (int j = 0; j < B; ++j) {
      cell[i][j] = wrapped(tangent_at(a, (sa[i] + sa[i + 1]) / 2),
                           tangent_at(b, (sb[j] + sb[j + 1]) / 2));
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> path{{0, 0}};
  auto evaluate = [&] {
    std::vector<double> row(A, std::numeric_limits<double>::infinity());
    std::vector<double> col(B, std::numeric_limits<double>::infinity());
    for (auto [i, j] : path) {
      row[i] = std::min(row[i], cell[i][j]);
      col[j] = std::min(col[j], cell[i][j]);
    }
    double total = 0.0;
    for (int i = 0; i < A; ++i) total += row[i] * (sa[i + 1] - sa[i]);
    for (int j = 0; j < B; ++j) total += col[j] * (sb[j + 1] - sb[j]);
    return total;
  };
  auto walk = [&](auto&& self) -> void {
    auto [i, j] = path.back();
    if (i == A - 1 && j == B - 1) {
      best = std::min(best, evaluate());
      return;
    }
    for (auto [di, dj] : {std::pair{1, 0}, {0, 1}, {1, 1}}) {
      if (i + di < A && j + dj < B) {
        path.emplace_back(i + di, j + dj);
        self(self);
        path.pop_back();
      }
    }
  };
  walk(walk);
  return best;
}

// Piece of `line` between arc-length fractions t0 < t1, as an open polyline.
inline Polyline sub_polyline(const Polyline& line, double t0, double t1) {
  std::vector<Point> v = line.vertices();
  if (line.closed()) v.push_back(v.front());
  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    cum.push_back(cum.back() +
                  std::hypot(v[i + 1].x - v[i].x, v[i + 1].y - v[i].y));
  }
  const double total = cum.back();
  auto at = [&](double s) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (s <= cum[i + 1] || i + 2 == v.size()) {
        double f = (s - cum[i]) / (cum[i + 1] - cum[i]);
        return Point{v[i].x + f * (v[i + 1].x - v[i].x),
                     v[i].y + f * (v[i + 1].y - v[i].y)};
      }
    }
    return v.back();
  };
  double s0 = t0 * total, s1 = t1 * total;
  std::vector<Point> out{at(s0)};
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (cum[i] > s0 && cum[i] < s1) out.push_back(v[i]);
  }
  Point end = at(s1);
  if (!(end == out.back())) out.push_back(end);
  return Polyline(out, false);
}

// Exact test for closed integer segments sharing a point, by Cramer's rule on
// the two parametric lines and interval overlap in the collinear case.
inline bool int_segments_meet(std::int64_t ax, std::int64_t ay, std::int64_t bx,
                              std::int64_t by, std::int64_t cx, std::int64_t cy,
                              std::int64_t dx, std::int64_t dy) {
  std::int64_t rx = bx - ax, ry = by - ay, sx = dx - cx, sy = dy - cy;
  std::int64_t qx = cx - ax, qy = cy - ay;
  std::int64_t den = rx * sy - ry * sx;
  if (den != 0) {
    std::int64_t tn = qx * sy - qy * sx;
    std::int64_t un = qx * ry - qy * rx;
    if (den < 0) den = -den, tn = -tn, un = -un;
    return tn >= 0 && tn <= den && un >= 0 && un <= den;
  }
  if (qx * ry - qy * rx != 0) return false;  // parallel, distinct lines
  // Collinear: project onto the dominant axis and intersect intervals.
  bool use_x = (rx != 0) || (sx != 0);
  auto lo_hi = [](std::int64_t p, std::int64_t q) {
    return std::pair{std::min(p, q), std::max(p, q)};
  };
  auto [l1, h1] = use_x ? lo_hi(ax, bx) : lo_hi(ay, by);
  auto [l2, h2] = use_x ? lo_hi(cx, dx) : lo_hi(cy, dy);
  if (rx == 0 && ry == 0 && sx == 0 && sy == 0) return ax == cx && ay == cy;
  return std::max(l1, l2) <= std::min(h1, h2);
}

// Segments ab and cd cross at a single interior point of both.
inline bool segments_cross_properly(Point a, Point b, Point c, Point d) {
  auto side = [](Point p, Point q, Point r) {
    double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return (v > 0) - (v < 0);
  };
  return side(a, b, c) * side(a, b, d) < 0 && side(c, d, a) * side(c, d, b) < 0;
}

// Crossing pairs by testing every pair of connections: parametric solve for
// non-parallel pairs, interval overlap for collinear ones. Pairs sharing a
// station count only when they overlap beyond it.
inline std::size_t brute_crossings(const shapemap::TransitNetwork& net,
                                   const std::vector<Point>& x) {
  const std::size_t m = net.connections().size();
  std::size_t count = 0;
  for (std::size_t c1 = 0; c1 < m; ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < m; ++c2) {
      std::size_t a = net.from_index(c1), b = net.to_index(c1);
      std::size_t c = net.from_index(c2), d = net.to_index(c2);
      Point p = x[a], r = x[b] - x[a], q = x[c], s = x[d] - x[c];
      double den = r.x * s.y - r.y * s.x;
      bool shared = a == c || a == d || b == c || b == d;
      if (den != 0.0) {
        if (shared) continue;
        Point qp = q - p;
        double t = (qp.x * s.y - qp.y * s.x) / den;
        double u = (qp.x * r.y - qp.y * r.x) / den;
        if (t >= 0 && t <= 1 && u >= 0 && u <= 1) ++count;
        continue;
      }
      Point qp = q - p;
      if (qp.x * r.y - qp.y * r.x != 0.0) continue;
      double rr = r.x * r.x + r.y * r.y;
      double t0 = (qp.x * r.x + qp.y * r.y) / rr;
      double t1 = t0 + (s.x * r.x + s.y * r.y) / rr;
      double lo = std::max(0.0, std::min(t0, t1));
      double hi = std::min(1.0, std::max(t0, t1));
      if (shared ? hi > lo : hi >= lo) ++count;
    }
  }
  return count;
}

// Minimum distance to `target` over every simple path (and, for a closed
// target, every simple cycle) with at most `max_edges` connections.
inline double exhaustive_route_minimum(const shapemap::TransitNetwork& net, const Polyline& target,
                          std::size_t max_edges) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> path;
  std::vector<char> used(net.stations().size(), 0);
  auto positions = [&](bool drop_last) {
    std::vector<Point> pts;
    for (std::size_t k = 0; k + (drop_last ? 1 : 0) < path.size(); ++k) {
      pts.push_back(net.stations()[path[k]].pos);
    }
    return pts;
  };
  std::function<void()> extend = [&] {
    std::size_t tail = path.back();
    for (std::size_t c : net.incident(tail)) {
      std::size_t v = net.other_end(c, tail);
      if (v == path.front() && target.closed() && path.size() >= 3) {
        path.push_back(v);
        best = std::min(best, shapemap::frechet_distance(Polyline(positions(true), true), target));
        path.pop_back();
      }
      if (used[v] || path.size() > max_edges) continue;
      used[v] = 1;
      path.push_back(v);
      best = std::min(best, shapemap::frechet_distance(Polyline(positions(false)), target));
      extend();
      path.pop_back();
      used[v] = 0;
    }
  };
  for (std::size_t s = 0; s < net.stations().size(); ++s) {
    path = {s};
    used[s] = 1;
    extend();
    used[s] = 0;
  }
  return best;
}

// Exhaustive minimum total rotation over injective sector choices.
inline double brute_rotation(const std::vector<double>& dirs) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(dirs.size());
  std::function<void(std::size_t, unsigned, double)> rec =
      [&](std::size_t e, unsigned used, double acc) {
        if (acc >= best) return;
        if (e == dirs.size()) {
          best = acc;
          return;
        }
        for (int k = 0; k < 8; ++k) {
          if (used & (1u << k)) continue;
          rec(e + 1, used | (1u << k),
              acc + wrapped(dirs[e], k * kPi / 4));
        }
      };
  rec(0, 0, 0.0);
  return best;
}

}  // namespace oracle
