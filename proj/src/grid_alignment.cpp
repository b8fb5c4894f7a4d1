#include "shapemap/grid_alignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace shapemap {

namespace {

constexpr std::size_t kNone = GridGraph::kNone;

bool boxes_overlap(const BBox& a, const BBox& b) {
  return a.min_x <= b.max_x && b.min_x <= a.max_x && a.min_y <= b.max_y &&
         b.min_y <= a.max_y;
}

// Uniform bucket index over bounding boxes.
class Buckets {
 public:
  explicit Buckets(double size) : size_(size) {}

  template <typename Fn>
  void cover(const BBox& b, Fn fn) const {
    auto lo_x = cell(b.min_x), hi_x = cell(b.max_x);
    auto lo_y = cell(b.min_y), hi_y = cell(b.max_y);
    for (auto x = lo_x; x <= hi_x; ++x) {
      for (auto y = lo_y; y <= hi_y; ++y) fn(key(x, y));
    }
  }

  void insert(const BBox& b, std::size_t item) {
    cover(b, [&](std::int64_t k) { map_[k].push_back(item); });
  }

  const std::unordered_map<std::int64_t, std::vector<std::size_t>>& map() const {
    return map_;
  }

  template <typename Fn>
  void query(const BBox& b, Fn fn) const {
    cover(b, [&](std::int64_t k) {
      auto it = map_.find(k);
      if (it == map_.end()) return;
      for (std::size_t item : it->second) fn(item);
    });
  }

 private:
  std::int64_t cell(double v) const {
    return static_cast<std::int64_t>(std::floor(v / size_));
  }
  static std::int64_t key(std::int64_t x, std::int64_t y) {
    return x * 4000037 + y;
  }

  double size_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> map_;
};

}  // namespace

// _____________________________________________________________________________
double default_grid_factor(std::size_t stations) {
  return stations > 150 ? 0.2 : 0.3;
}

double grid_cell_size(const TransitNetwork& net,
                      const std::vector<Point>& positions,
                      const GridConfig& cfg) {
  if (cfg.cell > 0.0) return cfg.cell;
  double f = cfg.f_d > 0.0 ? cfg.f_d : default_grid_factor(net.stations().size());
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    if (net.connections()[c].kind == ConnectionKind::DummyShortcut) continue;
    sum += dist(positions[net.from_index(c)], positions[net.to_index(c)]);
    ++n;
  }
  if (n == 0 || !(sum > 0.0)) {
    throw std::invalid_argument("grid: network has no connection of positive length");
  }
  return f * sum / static_cast<double>(n);
}

// _____________________________________________________________________________
GridGraph::GridGraph(double cell, double c_hop, double c_sink)
    : cell_(cell), c_hop_(c_hop), c_sink_(c_sink) {}

std::size_t GridGraph::add_sink(Sink s) {
  sinks_.push_back(std::move(s));
  sink_used_.push_back(0);
  station_.push_back(kNone);
  return sinks_.size() - 1;
}

std::size_t GridGraph::add_hop(std::size_t a, std::size_t b, double cost,
                               HopKind kind) {
  Hop h;
  h.a = a;
  h.b = b;
  h.cost = cost;
  h.kind = kind;
  hops_.push_back(h);
  hop_used_.push_back(0);
  hop_blocked_.push_back(0);
  std::size_t idx = hops_.size() - 1;
  sinks_[a].hops.push_back(idx);
  sinks_[b].hops.push_back(idx);
  return idx;
}

void GridGraph::remove_hop(std::size_t h) { hops_[h].removed = true; }

void GridGraph::remove_sink(std::size_t s) {
  sinks_[s].removed = true;
  for (std::size_t h : sinks_[s].hops) hops_[h].removed = true;
}

void GridGraph::set_lattice(int cols, int rows) {
  cols_ = cols;
  rows_ = rows;
}

std::optional<std::size_t> GridGraph::grid_sink(int col, int row) const {
  if (col < 0 || row < 0 || col > cols_ || row > rows_) return std::nullopt;
  return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_ + 1) +
         static_cast<std::size_t>(col);
}

std::size_t GridGraph::other_end(std::size_t h, std::size_t s) const {
  return hops_[h].a == s ? hops_[h].b : hops_[h].a;
}

std::size_t GridGraph::port_count(std::size_t s) const {
  std::size_t n = 0;
  for (std::size_t h : sinks_[s].hops) n += hops_[h].removed ? 0 : 1;
  return n;
}

double GridGraph::within_sink_cost(std::size_t s, std::size_t h1,
                                   std::size_t h2) const {
  Point p = sinks_[s].pos;
  double a1 = angle_of(sinks_[other_end(h1, s)].pos - p);
  double a2 = angle_of(sinks_[other_end(h2, s)].pos - p);
  double theta = angle_diff(a1, a2);
  double k = sinks_[s].shape ? 1.0 : 2.0 * c_hop_ / (3.0 * kPi);
  return k * (2.0 * kPi - theta);
}

void GridGraph::index_crossings() {
  Buckets buckets(cell_);
  std::vector<BBox> boxes(hops_.size());
  for (std::size_t h = 0; h < hops_.size(); ++h) {
    hops_[h].crossing.clear();
    if (hops_[h].removed) continue;
    boxes[h] = BBox::of({sinks_[hops_[h].a].pos, sinks_[hops_[h].b].pos});
    buckets.insert(boxes[h], h);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [key, items] : buckets.map()) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (std::size_t j = i + 1; j < items.size(); ++j) {
        std::size_t h1 = std::min(items[i], items[j]);
        std::size_t h2 = std::max(items[i], items[j]);
        const Hop& x = hops_[h1];
        const Hop& y = hops_[h2];
        // Two lattice hops only meet inside one cell, as crossing diagonals.
        if (x.kind == HopKind::Grid && y.kind == HopKind::Grid &&
            (sinks_[x.a].col == sinks_[x.b].col ||
             sinks_[x.a].row == sinks_[x.b].row ||
             sinks_[y.a].col == sinks_[y.b].col ||
             sinks_[y.a].row == sinks_[y.b].row)) {
          continue;
        }
        if (!boxes_overlap(boxes[h1], boxes[h2])) continue;
        bool shared = x.a == y.a || x.a == y.b || x.b == y.a || x.b == y.b;
        Segment s1{sinks_[x.a].pos, sinks_[x.b].pos};
        Segment s2{sinks_[y.a].pos, sinks_[y.b].pos};
        if (segments_intersect(s1, s2, shared)) pairs.emplace_back(h1, h2);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  for (auto [a, b] : pairs) {
    hops_[a].crossing.push_back(b);
    hops_[b].crossing.push_back(a);
  }
}

bool GridGraph::sink_free(std::size_t s) const {
  return !sinks_[s].removed && !sink_used_[s] && station_[s] == kNone;
}

bool GridGraph::hop_free(std::size_t h) const {
  return !hops_[h].removed && !hop_used_[h] && hop_blocked_[h] == 0;
}

void GridGraph::occupy_path(const std::vector<std::size_t>& sinks,
                            const std::vector<std::size_t>& hops,
                            std::size_t from_station, std::size_t to_station) {
  for (std::size_t k = 0; k < sinks.size(); ++k) {
    if (k == 0) {
      station_[sinks[k]] = from_station;
    } else if (k + 1 == sinks.size()) {
      station_[sinks[k]] = to_station;
    } else {
      sink_used_[sinks[k]] = 1;
    }
  }
  for (std::size_t h : hops) {
    hop_used_[h] = 1;
    for (std::size_t x : hops_[h].crossing) ++hop_blocked_[x];
  }
}

// _____________________________________________________________________________
GridGraph build_grid(const BBox& area, const GridConfig& cfg) {
  const double d = cfg.cell;
  if (!(d > 0.0)) throw std::invalid_argument("grid: cell size must be positive");
  const double c_sink = cfg.c_sink > 0.0 ? cfg.c_sink : 10.0 * cfg.c_hop;
  GridGraph g(d, cfg.c_hop, c_sink);
  auto cells = [&](double extent) {
    return static_cast<int>(std::ceil(extent / d - 1e-9));
  };
  const int pad = std::max(cfg.padding, 0);
  const int cols = std::max(cells(area.width()), 0) + 2 * pad;
  const int rows = std::max(cells(area.height()), 0) + 2 * pad;
  const Point origin{area.min_x - pad * d, area.min_y - pad * d};
  g.set_lattice(cols, rows);
  for (int r = 0; r <= rows; ++r) {
    for (int c = 0; c <= cols; ++c) {
      GridGraph::Sink s;
      s.pos = origin + Point{c * d, r * d};
      s.col = c;
      s.row = r;
      g.add_sink(std::move(s));
    }
  }
  for (int r = 0; r <= rows; ++r) {
    for (int c = 0; c <= cols; ++c) {
      std::size_t s = *g.grid_sink(c, r);
      for (auto [dc, dr] : {std::pair{1, 0}, {0, 1}, {1, 1}, {-1, 1}}) {
        if (auto t = g.grid_sink(c + dc, r + dr)) {
          g.add_hop(s, *t, cfg.c_hop, HopKind::Grid);
        }
      }
    }
  }
  g.index_crossings();
  return g;
}

GridGraph overlay_shape(GridGraph grid, const GuideShape& shape,
                        const GridConfig& cfg) {
  const double d = grid.cell();
  const double c_hop = grid.c_hop();
  auto lattice_range = [&](const BBox& b, double margin, auto fn) {
    const Point o = grid.sinks().front().pos;
    int c0 = static_cast<int>(std::floor((b.min_x - margin - o.x) / d));
    int c1 = static_cast<int>(std::ceil((b.max_x + margin - o.x) / d));
    int r0 = static_cast<int>(std::floor((b.min_y - margin - o.y) / d));
    int r1 = static_cast<int>(std::ceil((b.max_y + margin - o.y) / d));
    for (int r = std::max(r0, 0); r <= std::min(r1, grid.rows()); ++r) {
      for (int c = std::max(c0, 0); c <= std::min(c1, grid.cols()); ++c) {
        fn(*grid.grid_sink(c, r));
      }
    }
  };

  // Shape sinks and the hops along the shape.
  struct ShapeSeg {
    Segment seg;
    std::size_t a, b;  // shape sinks
  };
  std::vector<ShapeSeg> segs;
  std::vector<std::vector<std::size_t>> vertex_sinks;
  for (const auto& line : shape.polylines()) {
    std::vector<std::size_t> ids;
    for (const auto& v : line.vertices()) {
      GridGraph::Sink s;
      s.pos = v;
      s.shape = true;
      ids.push_back(grid.add_sink(std::move(s)));
    }
    for (std::size_t k = 0; k < line.segment_count(); ++k) {
      std::size_t a = ids[k], b = ids[(k + 1) % ids.size()];
      grid.add_hop(a, b, c_hop / 20.0, HopKind::Shape);
      segs.push_back({line.segment(k), a, b});
    }
    vertex_sinks.push_back(std::move(ids));
  }
  Buckets seg_index(d);
  for (std::size_t k = 0; k < segs.size(); ++k) {
    seg_index.insert(BBox::of({segs[k].seg.a, segs[k].seg.b}), k);
  }

  // Lattice hops that meet the shape.
  for (const auto& s : segs) {
    lattice_range(BBox::of({s.seg.a, s.seg.b}), d, [&](std::size_t sink) {
      for (std::size_t h : grid.sinks()[sink].hops) {
        const auto& hop = grid.hops()[h];
        if (hop.removed || hop.kind != HopKind::Grid) continue;
        Segment hs{grid.sinks()[hop.a].pos, grid.sinks()[hop.b].pos};
        if (segments_intersect(hs, s.seg)) grid.remove_hop(h);
      }
    });
  }
  // Lattice sinks crowding a shape vertex.
  for (const auto& ids : vertex_sinks) {
    for (std::size_t v : ids) {
      Point p = grid.sinks()[v].pos;
      lattice_range(BBox::of({p}), cfg.d_min * d, [&](std::size_t sink) {
        if (dist(grid.sinks()[sink].pos, p) < cfg.d_min * d) grid.remove_sink(sink);
      });
    }
  }
  // Connectors from shape vertices to lattice sinks.
  const double lo = cfg.d_low * d, hi = cfg.d_up * d;
  const double eps = 1e-9 * d;
  for (std::size_t k = 0; k < vertex_sinks.size(); ++k) {
    std::size_t added = 0;
    for (std::size_t v : vertex_sinks[k]) {
      Point p = grid.sinks()[v].pos;
      std::vector<std::size_t> near;
      lattice_range(BBox::of({p}), hi, [&](std::size_t sink) {
        if (grid.sinks()[sink].removed) return;
        double dd = dist(grid.sinks()[sink].pos, p);
        if (dd >= lo && dd <= hi) near.push_back(sink);
      });
      for (std::size_t sink : near) {
        Segment con{p, grid.sinks()[sink].pos};
        bool bad = false;
        seg_index.query(BBox::of({con.a, con.b}), [&](std::size_t idx) {
          if (bad) return;
          const auto& s = segs[idx];
          bool shared = s.a == v || s.b == v;
          if (segments_intersect(con, s.seg, shared)) bad = true;
        });
        // A connector must not run through another sink.
        lattice_range(BBox::of({con.a, con.b}), 0.0, [&](std::size_t other) {
          if (bad || other == sink || grid.sinks()[other].removed) return;
          if (point_segment_distance(grid.sinks()[other].pos, con) <= eps) bad = true;
        });
        if (bad) continue;
        grid.add_hop(v, sink, c_hop / 2.0, HopKind::Connector);
        ++added;
      }
    }
    if (added == 0) {
      throw std::runtime_error("grid: guide shape polyline " + std::to_string(k + 1) +
                               " cannot be connected to the grid");
    }
  }
  grid.index_crossings();
  return grid;
}

// _____________________________________________________________________________
std::size_t ReducedNetwork::removed() const {
  return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), 0));
}

namespace {

bool collapsible(const LayoutState& mixed, const TransitNetwork& net,
                 std::size_t s) {
  if (net.degree(s) != 2 || mixed.shape_stations[s]) return false;
  int k1 = mixed.sectors[net.incident(s)[0]];
  int k2 = mixed.sectors[net.incident(s)[1]];
  if (k1 == kNoSector || k2 == kNoSector) return false;
  return k1 == k2 || (k1 + 4) % 8 == k2;
}

// Chains between kept stations. Returns false (and marks one more station
// kept) when a chain closes on itself.
bool build_chains(const TransitNetwork& net, const LayoutState& mixed,
                  ReducedNetwork& out) {
  out.edges.clear();
  std::vector<char> seen(net.connections().size(), 0);
  for (std::size_t u = 0; u < net.stations().size(); ++u) {
    if (!out.kept[u]) continue;
    for (std::size_t c0 : net.incident(u)) {
      if (seen[c0]) continue;
      ReducedEdge e;
      e.from = u;
      std::size_t at = u, c = c0;
      while (true) {
        seen[c] = 1;
        e.connections.push_back(c);
        std::size_t nx = net.other_end(c, at);
        if (out.kept[nx]) {
          e.to = nx;
          break;
        }
        e.interior.push_back(nx);
        const auto& inc = net.incident(nx);
        c = inc[0] == c ? inc[1] : inc[0];
        at = nx;
      }
      if (e.to == e.from) {
        out.kept[e.interior[e.interior.size() / 2]] = 1;
        return false;
      }
      e.shape = true;
      for (std::size_t k : e.connections) e.shape = e.shape && mixed.shape_edges[k];
      out.edges.push_back(std::move(e));
    }
  }
  // Cycles made only of removed stations.
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    if (seen[c]) continue;
    std::size_t a = net.from_index(c);
    out.kept[a] = 1;
    // The station opposite on the cycle becomes the second kept one.
    std::vector<std::size_t> cyc{a};
    std::size_t at = a, cc = c;
    while (true) {
      std::size_t nx = net.other_end(cc, at);
      if (nx == a) break;
      cyc.push_back(nx);
      const auto& inc = net.incident(nx);
      cc = inc[0] == cc ? inc[1] : inc[0];
      at = nx;
    }
    out.kept[cyc[cyc.size() / 2]] = 1;
    return false;
  }
  return true;
}

}  // namespace

ReducedNetwork collapse_network(const LayoutState& mixed,
                                const TransitNetwork& net) {
  ReducedNetwork out;
  const std::size_t n = net.stations().size();
  out.kept.assign(n, 1);
  for (std::size_t s = 0; s < n; ++s) {
    if (collapsible(mixed, net, s)) out.kept[s] = 0;
  }
  while (!build_chains(net, mixed, out)) {
  }
  return out;
}

std::vector<std::size_t> route_order(const ReducedNetwork& reduced,
                                     const LayoutState& mixed,
                                     const TransitNetwork& net,
                                     const GuideShape& shape) {
  const auto& edges = reduced.edges;
  const auto& x = mixed.positions;
  auto length = [&](std::size_t e) {
    return dist(x[edges[e].from], x[edges[e].to]);
  };
  auto first_id = [&](std::size_t e) {
    return net.connections()[edges[e].connections.front()].id;
  };

  std::vector<std::size_t> order;
  std::vector<std::pair<std::pair<std::size_t, double>, std::size_t>> shape_keys;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!edges[e].shape) continue;
    Point mid = (x[edges[e].from] + x[edges[e].to]) * 0.5;
    std::size_t best_line = 0;
    ClosestPoint best;
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < shape.polylines().size(); ++k) {
      ClosestPoint cp = closest_point(shape.polylines()[k], mid);
      if (cp.distance < best.distance) {
        best = cp;
        best_line = k;
      }
    }
    shape_keys.push_back({{best_line, best.arc_fraction}, e});
  }
  std::sort(shape_keys.begin(), shape_keys.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return first_id(a.second) < first_id(b.second);
  });

  std::vector<char> placed(edges.size(), 0);
  std::vector<char> reached(net.stations().size(), 0);
  std::deque<std::size_t> queue;
  auto reach = [&](std::size_t s) {
    if (!reached[s]) {
      reached[s] = 1;
      queue.push_back(s);
    }
  };
  for (const auto& [key, e] : shape_keys) {
    order.push_back(e);
    placed[e] = 1;
    reach(edges[e].from);
    reach(edges[e].to);
  }

  std::vector<std::vector<std::size_t>> at(net.stations().size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    at[edges[e].from].push_back(e);
    at[edges[e].to].push_back(e);
  }
  auto before = [&](std::size_t a, std::size_t b) {
    double la = length(a), lb = length(b);
    if (la != lb) return la > lb;
    return first_id(a) < first_id(b);
  };
  while (order.size() < edges.size()) {
    if (queue.empty()) {
      std::optional<std::size_t> seed;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!placed[e] && (!seed || before(e, *seed))) seed = e;
      }
      order.push_back(*seed);
      placed[*seed] = 1;
      reach(edges[*seed].from);
      reach(edges[*seed].to);
      continue;
    }
    std::size_t s = queue.front();
    queue.pop_front();
    std::vector<std::size_t> next;
    for (std::size_t e : at[s]) {
      if (!placed[e]) next.push_back(e);
    }
    std::sort(next.begin(), next.end(), before);
    for (std::size_t e : next) {
      order.push_back(e);
      placed[e] = 1;
      reach(edges[e].from == s ? edges[e].to : edges[e].from);
    }
  }
  return order;
}

// _____________________________________________________________________________
namespace {

std::vector<std::pair<std::size_t, double>> candidates(
    const GridGraph& grid, const LayoutState& mixed, std::size_t station,
    const std::vector<std::size_t>& fixed_sink, const GridConfig& cfg) {
  if (fixed_sink[station] != kNone) return {{fixed_sink[station], 0.0}};
  const Point p = mixed.positions[station];
  const double d = grid.cell();
  const double unit_cost = grid.c_hop() / 2.0 / d;
  std::vector<std::pair<double, std::size_t>> found;
  if (mixed.shape_stations[station]) {
    // Shape sinks first; lattice sinks only once the shape is full.
    for (int pass = 0; pass < 2 && found.empty(); ++pass) {
      for (std::size_t s = 0; s < grid.sinks().size(); ++s) {
        if (grid.sinks()[s].shape != (pass == 0) || !grid.sink_free(s)) continue;
        found.emplace_back(dist(grid.sinks()[s].pos, p), s);
      }
    }
    std::size_t keep = std::min(cfg.shape_candidates, found.size());
    std::partial_sort(found.begin(), found.begin() + static_cast<long>(keep),
                      found.end());
    found.resize(keep);
  } else {
    const double r = cfg.radius * d;
    const Point o = grid.sinks().front().pos;
    int c0 = static_cast<int>(std::floor((p.x - r - o.x) / d));
    int c1 = static_cast<int>(std::ceil((p.x + r - o.x) / d));
    int r0 = static_cast<int>(std::floor((p.y - r - o.y) / d));
    int r1 = static_cast<int>(std::ceil((p.y + r - o.y) / d));
    for (int row = std::max(r0, 0); row <= std::min(r1, grid.rows()); ++row) {
      for (int col = std::max(c0, 0); col <= std::min(c1, grid.cols()); ++col) {
        std::size_t s = *grid.grid_sink(col, row);
        double dd = dist(grid.sinks()[s].pos, p);
        if (dd <= r && grid.sink_free(s)) found.emplace_back(dd, s);
      }
    }
    std::sort(found.begin(), found.end());
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (auto [dd, s] : found) out.emplace_back(s, dd * unit_cost);
  return out;
}

}  // namespace

RoutedEdge route_edge(GridGraph& grid, const ReducedNetwork& reduced,
                      std::size_t edge, const LayoutState& mixed,
                      std::vector<std::size_t>& fixed_sink,
                      const GridConfig& cfg) {
  const ReducedEdge& e = reduced.edges[edge];
  RoutedEdge out;
  out.edge = edge;
  auto sources = candidates(grid, mixed, e.from, fixed_sink, cfg);
  auto targets = candidates(grid, mixed, e.to, fixed_sink, cfg);
  if (sources.empty() || targets.empty()) return out;

  const auto& hops = grid.hops();
  const auto& sinks = grid.sinks();
  const std::size_t ports = 2 * hops.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::unordered_map<std::size_t, double> target_cost;
  for (auto [s, c] : targets) target_cost.emplace(s, c);

  std::vector<double> best(ports, kInf);
  std::vector<std::size_t> pred(ports, kNone), origin(ports, kNone);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  auto port_of = [&](std::size_t h, std::size_t sink) {
    return 2 * h + (hops[h].a == sink ? 0 : 1);
  };
  auto sink_of = [&](std::size_t p) {
    return p % 2 == 0 ? hops[p / 2].a : hops[p / 2].b;
  };
  auto enterable = [&](std::size_t v) {
    return grid.sink_free(v) || target_cost.count(v);
  };
  auto relax = [&](std::size_t p, double cost, std::size_t from, std::size_t org) {
    if (cost < best[p]) {
      best[p] = cost;
      pred[p] = from;
      origin[p] = org;
      heap.emplace(cost, p);
    }
  };

  for (auto [s, c] : sources) {
    for (std::size_t h : sinks[s].hops) {
      if (!grid.hop_free(h)) continue;
      std::size_t v = grid.other_end(h, s);
      if (v == s || !enterable(v)) continue;
      relax(port_of(h, v), c + grid.c_sink() + hops[h].cost, kNone, s);
    }
  }

  double done = kInf;
  std::size_t done_port = kNone;
  while (!heap.empty()) {
    auto [cost, p] = heap.top();
    heap.pop();
    if (cost > best[p]) continue;
    if (cost >= done) break;
    const std::size_t u = sink_of(p);
    const std::size_t h = p / 2;
    if (auto it = target_cost.find(u); it != target_cost.end() && u != origin[p]) {
      double total = cost + grid.c_sink() + it->second;
      if (total < done) {
        done = total;
        done_port = p;
      }
    }
    if (!grid.sink_free(u)) continue;
    for (std::size_t h2 : sinks[u].hops) {
      if (h2 == h || !grid.hop_free(h2)) continue;
      std::size_t v = grid.other_end(h2, u);
      if (v == origin[p] || !enterable(v)) continue;
      relax(port_of(h2, v), cost + grid.within_sink_cost(u, h, h2) + hops[h2].cost,
            p, origin[p]);
    }
  }
  if (done_port == kNone) return out;

  std::vector<std::size_t> chain;
  for (std::size_t p = done_port; p != kNone; p = pred[p]) chain.push_back(p);
  std::reverse(chain.begin(), chain.end());
  out.sinks.push_back(origin[done_port]);
  for (std::size_t p : chain) {
    out.hops.push_back(p / 2);
    out.sinks.push_back(sink_of(p));
  }
  for (std::size_t s : out.sinks) {
    out.polyline.push_back(sinks[s].pos);
    out.on_shape.push_back(sinks[s].shape ? 1 : 0);
  }
  out.routed = true;
  out.cost = done;
  grid.occupy_path(out.sinks, out.hops, e.from, e.to);
  fixed_sink[e.from] = out.sinks.front();
  fixed_sink[e.to] = out.sinks.back();
  return out;
}

// _____________________________________________________________________________
namespace {

// Splits `line` at the given increasing arc lengths.
std::vector<std::vector<Point>> split_at(const std::vector<Point>& line,
                                         const std::vector<double>& cuts) {
  std::vector<std::vector<Point>> out(1, std::vector<Point>{line.front()});
  double walked = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 0; k + 1 < line.size(); ++k) {
    Point a = line[k], b = line[k + 1];
    double len = dist(a, b);
    while (next < cuts.size() && cuts[next] <= walked + len) {
      double t = len > 0.0 ? (cuts[next] - walked) / len : 0.0;
      Point p = a + (b - a) * std::clamp(t, 0.0, 1.0);
      if (!(out.back().back() == p)) out.back().push_back(p);
      out.push_back({p});
      ++next;
    }
    if (!(out.back().back() == b)) out.back().push_back(b);
    walked += len;
  }
  while (out.size() < cuts.size() + 1) out.push_back({line.back()});
  return out;
}

}  // namespace

GridLayout reinsert_stations(const TransitNetwork& net, const ReducedNetwork& reduced,
                             const std::vector<RoutedEdge>& routed,
                             const std::vector<Point>& station_positions) {
  GridLayout out;
  out.positions = station_positions;
  out.routed = routed;
  out.paths.assign(net.connections().size(), {});
  out.connection_routed.assign(net.connections().size(), 0);
  for (std::size_t e = 0; e < reduced.edges.size(); ++e) {
    const ReducedEdge& re = reduced.edges[e];
    const RoutedEdge& r = routed[e];
    std::vector<Point> line =
        r.routed ? r.polyline
                 : std::vector<Point>{station_positions[re.from],
                                      station_positions[re.to]};
    if (!r.routed) ++out.failed;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < line.size(); ++k) total += dist(line[k], line[k + 1]);
    std::vector<double> cuts;
    const std::size_t m = re.interior.size();
    for (std::size_t k = 1; k <= m; ++k) {
      cuts.push_back(total * static_cast<double>(k) / static_cast<double>(m + 1));
    }
    auto pieces = split_at(line, cuts);
    for (std::size_t k = 0; k < m; ++k) out.positions[re.interior[k]] = pieces[k + 1].front();
    std::size_t at = re.from;
    for (std::size_t k = 0; k < re.connections.size(); ++k) {
      std::size_t c = re.connections[k];
      auto piece = pieces[k];
      if (net.from_index(c) != at) std::reverse(piece.begin(), piece.end());
      out.paths[c] = std::move(piece);
      out.connection_routed[c] = r.routed ? 1 : 0;
      at = net.other_end(c, at);
    }
    if (r.routed) {
      for (std::size_t k = 0; k + 1 < r.polyline.size(); ++k) {
        out.segments.push_back({{r.polyline[k], r.polyline[k + 1]},
                                re.shape,
                                r.on_shape[k] || r.on_shape[k + 1]});
      }
    }
  }
  return out;
}

GridLayout align_to_grid(const TransitNetwork& net, const LayoutState& mixed,
                         const GuideShape& shape, const GridConfig& cfg) {
  GridConfig c = cfg;
  c.cell = grid_cell_size(net, mixed.positions, cfg);
  GuideShape fine = shape.spaced(c.cell * c.shape_spacing);
  BBox area = BBox::of(mixed.positions);
  area.extend(fine.bbox());
  GridGraph grid = overlay_shape(build_grid(area, c), fine, c);

  ReducedNetwork reduced = collapse_network(mixed, net);
  std::vector<std::size_t> fixed(net.stations().size(), kNone);
  std::vector<RoutedEdge> routed(reduced.edges.size());
  for (std::size_t e : route_order(reduced, mixed, net, fine)) {
    routed[e] = route_edge(grid, reduced, e, mixed, fixed, c);
  }
  std::vector<Point> pos = mixed.positions;
  for (std::size_t s = 0; s < pos.size(); ++s) {
    if (fixed[s] != kNone) pos[s] = grid.sinks()[fixed[s]].pos;
  }
  GridLayout out = reinsert_stations(net, reduced, routed, pos);
  out.cell = c.cell;
  out.sink_count = grid.sinks().size();
  return out;
}

std::size_t routed_crossings(const GridLayout& layout) {
  TransitNetwork drawing;
  std::map<std::pair<double, double>, std::string> ids;
  auto id_of = [&](Point p) {
    auto key = std::pair{p.x, p.y};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    std::string id = "p" + std::to_string(ids.size());
    ids.emplace(key, id);
    Station st;
    st.id = id;
    st.pos = p;
    drawing.add_station(std::move(st));
    return id;
  };
  std::size_t k = 0;
  for (const auto& s : layout.segments) {
    std::string a = id_of(s.seg.a), b = id_of(s.seg.b);
    drawing.add_connection({"g" + std::to_string(k++), a, b, {"x"}});
  }
  return count_crossings(drawing, drawing.positions());
}

}  // namespace shapemap
