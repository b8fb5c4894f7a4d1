#include "shapemap/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shapemap::synthetic {

namespace {

const Rgb kPalette[] = {
    {0xe4, 0x1a, 0x1c}, {0x37, 0x7e, 0xb8}, {0x4d, 0xaf, 0x4a}, {0x98, 0x4e, 0xa3},
    {0xff, 0x7f, 0x00}, {0xa6, 0x56, 0x28}, {0xf7, 0x81, 0xbf}, {0x1b, 0x9e, 0x77},
    {0x66, 0x66, 0x66}, {0xd9, 0x5f, 0x02}, {0x75, 0x70, 0xb3}, {0xe6, 0xab, 0x02},
};

Rgb color(std::size_t k) { return kPalette[k % std::size(kPalette)]; }

void add_station(TransitNetwork& net, const std::string& id, Point p) {
  Station s;
  s.id = id;
  s.name = id;
  s.pos = p;
  net.add_station(std::move(s));
}

// Adds `line` with its connections; consecutive stations get a connection
// carrying the line (merged into an existing one between the same pair).
void add_line(TransitNetwork& net, const std::string& id, Rgb c,
              const std::vector<std::string>& stations) {
  for (std::size_t k = 0; k + 1 < stations.size(); ++k) {
    Connection con;
    con.id = "c" + std::to_string(net.connections().size());
    con.from = stations[k];
    con.to = stations[k + 1];
    con.lines = {id};
    net.add_connection(std::move(con));
  }
  net.add_line({id, c, stations});
}

Polyline closed_curve(int n, auto fn) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(fn(2 * kPi * i / n));
  return Polyline(std::move(pts), true);
}

}  // namespace

double uniform(std::mt19937_64& rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::size_t index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform(rng, 0.0, static_cast<double>(n)));
}

// _____________________________________________________________________________
TransitNetwork grid(int cols, int rows, double jitter, std::uint64_t seed) {
  if (cols < 2 || rows < 2) throw std::invalid_argument("grid: need at least 2x2");
  std::mt19937_64 rng(seed);
  TransitNetwork net;
  auto id = [](int c, int r) { return "g" + std::to_string(c) + "_" + std::to_string(r); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double dx = uniform(rng, -jitter, jitter), dy = uniform(rng, -jitter, jitter);
      add_station(net, id(c, r), {c + dx, r + dy});
    }
  }
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    std::vector<std::string> seq;
    for (int c = 0; c < cols; ++c) seq.push_back(id(c, r));
    add_line(net, "R" + std::to_string(r), color(k++), seq);
  }
  for (int c = 0; c < cols; ++c) {
    std::vector<std::string> seq;
    for (int r = 0; r < rows; ++r) seq.push_back(id(c, r));
    add_line(net, "C" + std::to_string(c), color(k++), seq);
  }
  return net;
}

TransitNetwork ring(int rings, int spokes, double jitter, std::uint64_t seed) {
  if (rings < 1 || spokes < 3) throw std::invalid_argument("ring: need 1 ring, 3 spokes");
  std::mt19937_64 rng(seed);
  TransitNetwork net;
  auto id = [](int k, int i) { return "r" + std::to_string(k) + "_" + std::to_string(i); };
  add_station(net, "hub", {0, 0});
  // Ring k has (k + 1) stations per spoke, so station spacing stays near 1.
  for (int k = 0; k < rings; ++k) {
    int count = spokes * (k + 1);
    for (int i = 0; i < count; ++i) {
      double a = 2 * kPi * i / count + uniform(rng, -jitter, jitter) / (k + 1);
      double r = k + 1 + uniform(rng, -jitter, jitter);
      add_station(net, id(k, i), {r * std::cos(a), r * std::sin(a)});
    }
  }
  std::size_t n = 0;
  for (int k = 0; k < rings; ++k) {
    int count = spokes * (k + 1);
    std::vector<std::string> seq;
    for (int i = 0; i <= count; ++i) seq.push_back(id(k, i % count));
    add_line(net, "O" + std::to_string(k), color(n++), seq);
  }
  for (int i = 0; i < spokes; ++i) {
    std::vector<std::string> seq{"hub"};
    for (int k = 0; k < rings; ++k) seq.push_back(id(k, i * (k + 1)));
    add_line(net, "S" + std::to_string(i), color(n++), seq);
  }
  return net;
}

TransitNetwork tree(int stations, std::uint64_t seed) {
  if (stations < 2) throw std::invalid_argument("tree: need 2 stations");
  std::mt19937_64 rng(seed);
  std::vector<Point> pos{{0, 0}};
  std::vector<std::size_t> parent{0};
  std::vector<double> heading{0.0};
  std::vector<std::vector<std::size_t>> children(1);
  auto blocked = [&](Point a, Point b, std::size_t from) {
    for (std::size_t s = 0; s < pos.size(); ++s) {
      if (dist(pos[s], b) < 0.6) return true;
    }
    for (std::size_t s = 1; s < pos.size(); ++s) {
      std::size_t p = parent[s];
      bool shared = s == from || p == from;
      if (segments_intersect({a, b}, {pos[p], pos[s]}, shared)) return true;
    }
    return false;
  };
  int stalls = 0;
  while (static_cast<int>(pos.size()) < stations) {
    std::size_t p = index(rng, pos.size());
    std::size_t limit = p == 0 ? 4 : 2;
    if (children[p].size() >= limit) continue;
    double h = p == 0 ? uniform(rng, -kPi, kPi) : heading[p] + uniform(rng, -1.0, 1.0);
    Point q = pos[p] + Point{std::cos(h), std::sin(h)} * uniform(rng, 0.9, 1.3);
    if (blocked(pos[p], q, p)) {
      if (++stalls > 100000) throw std::runtime_error("tree: cannot place stations");
      continue;
    }
    pos.push_back(q);
    parent.push_back(p);
    heading.push_back(h);
    children.emplace_back();
    children[p].push_back(pos.size() - 1);
  }
  TransitNetwork net;
  auto id = [](std::size_t s) { return "t" + std::to_string(s); };
  for (std::size_t s = 0; s < pos.size(); ++s) add_station(net, id(s), pos[s]);
  // Path cover: the first child continues its parent's line.
  std::size_t lines = 0;
  std::vector<std::pair<std::size_t, std::size_t>> todo;  // (line start, first hop)
  for (std::size_t c : children[0]) todo.emplace_back(0, c);
  while (!todo.empty()) {
    auto [start, at] = todo.back();
    todo.pop_back();
    std::vector<std::string> seq{id(start)};
    while (true) {
      seq.push_back(id(at));
      for (std::size_t k = 1; k < children[at].size(); ++k) {
        todo.emplace_back(at, children[at][k]);
      }
      if (children[at].empty()) break;
      at = children[at][0];
    }
    add_line(net, "T" + std::to_string(lines), color(lines), seq);
    ++lines;
  }
  return net;
}

TransitNetwork metro(int stations, int lines, std::uint64_t seed) {
  if (stations < 4 || lines < 1) throw std::invalid_argument("metro: too small");
  std::mt19937_64 rng(seed);
  TransitNetwork net;
  std::vector<Point> pos;
  const double radius = 1.1 * stations / (2.0 * lines);
  const double snap = 0.45;
  for (int l = 0; l < lines; ++l) {
    double a = uniform(rng, -kPi, kPi);
    double b = a + kPi + uniform(rng, -0.8, 0.8);
    Point from{radius * std::cos(a), radius * std::sin(a)};
    Point to{radius * std::cos(b), radius * std::sin(b)};
    Point side = perp(to - from) * (1.0 / dist(from, to));
    double amp = uniform(rng, -0.25, 0.25) * radius;
    double waves = uniform(rng, 0.5, 1.5);
    const int m = std::max(2, static_cast<int>(std::ceil(dist(from, to))));
    std::vector<std::string> seq;
    std::vector<std::size_t> own;
    for (int k = 0; k <= m; ++k) {
      double t = static_cast<double>(k) / m;
      Point p = from + (to - from) * t + side * (amp * std::sin(kPi * waves * t));
      std::size_t pick = pos.size();
      double best = snap;
      for (std::size_t s = 0; s < pos.size(); ++s) {
        double d = dist(pos[s], p);
        if (d < best && std::find(own.begin(), own.end(), s) == own.end()) {
          best = d;
          pick = s;
        }
      }
      if (pick == pos.size()) {
        pos.push_back(p);
        add_station(net, "m" + std::to_string(pick), p);
      }
      own.push_back(pick);
      seq.push_back("m" + std::to_string(pick));
    }
    add_line(net, "M" + std::to_string(l), color(static_cast<std::size_t>(l)), seq);
  }
  return net;
}

// _____________________________________________________________________________
GuideShape heart(int n) {
  return GuideShape({closed_curve(n, [](double t) {
    double s = std::sin(t);
    return Point{s * s * s, (13 * std::cos(t) - 5 * std::cos(2 * t) -
                             2 * std::cos(3 * t) - std::cos(4 * t)) / 16.0};
  })});
}

GuideShape flower(int petals, int n) {
  return GuideShape({closed_curve(n, [petals](double t) {
    double r = 0.7 + 0.3 * std::cos(petals * t);
    return Point{r * std::cos(t), r * std::sin(t)};
  })});
}

GuideShape eye(int n) {
  std::vector<Point> lens;
  int half = std::max(n / 2, 4);
  for (int i = 0; i < half; ++i) {
    double s = static_cast<double>(i) / half;
    lens.push_back({-1 + 2 * s, 0.5 * std::sin(kPi * s)});
  }
  for (int i = 0; i < half; ++i) {
    double s = static_cast<double>(i) / half;
    lens.push_back({1 - 2 * s, -0.5 * std::sin(kPi * s)});
  }
  Polyline pupil = closed_curve(std::max(n / 3, 8), [](double t) {
    return Point{0.25 * std::cos(t), 0.25 * std::sin(t)};
  });
  return GuideShape({Polyline(std::move(lens), true), pupil});
}

GuideShape circle(int n) {
  return GuideShape({closed_curve(n, [](double t) {
    return Point{std::cos(t), std::sin(t)};
  })});
}

GuideShape square() {
  return GuideShape({Polyline({{-1, 1}, {1, 1}, {1, -1}, {-1, -1}}, true)});
}

GuideShape stadium(int n) {
  std::vector<Point> pts;
  int half = std::max(n / 2, 4);
  for (int i = 0; i <= half; ++i) {
    double a = -kPi / 2 + kPi * i / half;
    pts.push_back({0.5 + 0.5 * std::cos(a), 0.5 * std::sin(a)});
  }
  for (int i = 0; i <= half; ++i) {
    double a = kPi / 2 + kPi * i / half;
    pts.push_back({-0.5 + 0.5 * std::cos(a), 0.5 * std::sin(a)});
  }
  return GuideShape({Polyline(std::move(pts), true)});
}

GuideShape shape_by_name(const std::string& name) {
  if (name == "heart") return heart();
  if (name == "flower") return flower();
  if (name == "eye") return eye();
  if (name == "circle") return circle();
  if (name == "square") return square();
  if (name == "stadium") return stadium();
  throw std::invalid_argument("unknown shape '" + name + "'");
}

TransitNetwork network_by_kind(const std::string& kind, int stations,
                               std::uint64_t seed) {
  if (kind == "grid") {
    int side = std::max(2, static_cast<int>(std::lround(std::sqrt(stations))));
    int other = std::max(2, static_cast<int>(std::lround(static_cast<double>(stations) / side)));
    return grid(side, other, 0.15, seed);
  }
  if (kind == "ring") {
    // 1 + 6 * rings * (rings + 1) / 2 stations.
    int rings = 1;
    while (1 + 3 * (rings + 1) * (rings + 2) <= stations) ++rings;
    return ring(rings, 6, 0.1, seed);
  }
  if (kind == "tree") return tree(stations, seed);
  if (kind == "metro") {
    return metro(stations, std::max(3, stations / 20), seed);
  }
  throw std::invalid_argument("unknown network kind '" + kind + "'");
}

}  // namespace shapemap::synthetic
