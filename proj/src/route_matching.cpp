#include "shapemap/route_matching.hpp"

#include <algorithm>
#include <stdexcept>

namespace shapemap {

namespace {

// Distances within this margin count as equal during the search.
constexpr double kTol = 1e-9;

double dummy_penalty(const RouteMatchConfig& cfg, std::size_t dummies,
                     std::size_t edges) {
  if (edges == 0 || dummies == 0) return 0.0;
  return cfg.dummy_penalty * (kPi / 8) * static_cast<double>(dummies) /
         static_cast<double>(edges);
}

Polyline polyline_of(const TransitNetwork& net,
                     const std::vector<std::size_t>& stations, bool closed) {
  std::vector<Point> pts;
  pts.reserve(stations.size());
  for (std::size_t s : stations) pts.push_back(net.stations()[s].pos);
  return Polyline(std::move(pts), closed);
}

MatchedRoute to_route(const TransitNetwork& net,
                      const std::vector<std::size_t>& stations,
                      const std::vector<std::size_t>& edges) {
  MatchedRoute r;
  for (std::size_t s : stations) r.stations.push_back(net.stations()[s].id);
  for (std::size_t c : edges) {
    r.edges.push_back(net.connections()[c].id);
    if (net.connections()[c].kind == ConnectionKind::DummyShortcut) ++r.dummy_count;
  }
  return r;
}

}  // namespace

// _____________________________________________________________________________
GuideShape::GuideShape(std::vector<Polyline> polylines)
    : polylines_(std::move(polylines)) {
  if (polylines_.empty()) {
    throw std::invalid_argument("guide shape needs at least one polyline");
  }
  BBox box = bbox();
  Point corner{box.min_x, box.max_y};
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < polylines_.size(); ++k) {
    for (const auto& v : polylines_[k].vertices()) {
      double d = dist(v, corner);
      if (d < best) {
        best = d;
        anchor_ = k;
      }
    }
  }
}

BBox GuideShape::bbox() const {
  BBox box = polylines_.front().bbox();
  for (const auto& p : polylines_) box.extend(p.bbox());
  return box;
}

GuideShape GuideShape::transformed(const Similarity& t) const {
  GuideShape out = *this;
  for (auto& p : out.polylines_) p = t.apply(p);
  return out;
}

GuideShape GuideShape::resampled(double max_seg) const {
  GuideShape out = *this;
  for (auto& p : out.polylines_) p = resample(p, max_seg);
  return out;
}

GuideShape GuideShape::spaced(double spacing) const {
  std::vector<Polyline> lines;
  for (const auto& p : polylines_) lines.push_back(resample_uniform(p, spacing));
  return GuideShape(std::move(lines));
}

// _____________________________________________________________________________
Polyline route_polyline(const TransitNetwork& net, const MatchedRoute& route) {
  std::vector<std::size_t> idx;
  for (const auto& id : route.stations) idx.push_back(net.station_at(id));
  bool closed = route.closed();
  if (closed) idx.pop_back();
  return polyline_of(net, idx, closed);
}

MatchedRoute grow_path(const TransitNetwork& net, const GuideShape& shape,
                       const std::string& start, const RouteMatchConfig& cfg) {
  const Polyline& target = shape.anchor_polyline();
  const bool may_close = target.closed();
  std::vector<std::size_t> path{net.station_at(start)};
  std::vector<std::size_t> edges;
  std::vector<char> in_path(net.stations().size(), 0);
  in_path[path[0]] = 1;
  std::size_t dummies = 0;
  double current = std::numeric_limits<double>::infinity();
  std::vector<double> history;

  struct Candidate {
    std::size_t station;
    std::size_t connection;
    bool closing;
    double rank;
    double start;
    double full;
  };

  while (true) {
    const std::size_t tail = path.back();
    const Point tail_pos = net.stations()[tail].pos;
    std::optional<Candidate> best;
    for (std::size_t c : net.incident(tail)) {
      std::size_t v = net.other_end(c, tail);
      bool closing = may_close && v == path.front() && path.size() >= 3;
      if (in_path[v] && !closing) continue;
      if (net.stations()[v].pos == tail_pos) continue;
      if (!closing) path.push_back(v);
      Polyline w = polyline_of(net, path, closing);
      if (!closing) path.pop_back();

      double full = frechet_distance(w, target);
      if (!(full < current - kTol)) continue;
      MatchResult part = partial_frechet(w, target, cfg.samples);
      bool dummy = net.connections()[c].kind == ConnectionKind::DummyShortcut;
      Candidate cand{v, c, closing,
                     part.distance +
                         dummy_penalty(cfg, dummies + dummy, edges.size() + 1),
                     part.start, full};
      auto better = [&](const Candidate& a, const Candidate& b) {
        if (std::fabs(a.rank - b.rank) > kTol) return a.rank < b.rank;
        if (a.start != b.start) return a.start < b.start;
        if (std::fabs(a.full - b.full) > kTol) return a.full < b.full;
        return net.stations()[a.station].id < net.stations()[b.station].id;
      };
      if (!best || better(cand, *best)) best = cand;
    }
    if (!best) break;
    path.push_back(best->station);
    edges.push_back(best->connection);
    if (net.connections()[best->connection].kind == ConnectionKind::DummyShortcut) {
      ++dummies;
    }
    current = best->full;
    history.push_back(current);
    if (best->closing) break;
    in_path[best->station] = 1;
  }

  MatchedRoute r = to_route(net, path, edges);
  r.score = current;
  r.history = std::move(history);
  return r;
}

MatchedRoute match_route(const TransitNetwork& net, const GuideShape& shape,
                         const RouteMatchConfig& cfg) {
  std::optional<MatchedRoute> best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool best_flat = true;
  for (const auto& st : net.stations()) {
    if (cfg.window && !cfg.window->contains(st.pos)) continue;
    MatchedRoute r = grow_path(net, shape, st.id, cfg);
    if (r.stations.size() < 2 || !std::isfinite(r.score)) continue;
    // A route with a zero-area bounding box cannot place the shape; it only
    // wins when nothing else matches.
    bool flat = route_polyline(net, r).bbox().degenerate();
    double cost = r.score + dummy_penalty(cfg, r.dummy_count, r.edges.size());
    bool take = !best;
    if (!take) {
      if (flat != best_flat) {
        take = !flat;
      } else if (std::fabs(cost - best_cost) > kTol) {
        take = cost < best_cost;
      } else if (r.dummy_count != best->dummy_count) {
        take = r.dummy_count < best->dummy_count;
      } else {
        take = r.stations < best->stations;
      }
    }
    if (take) {
      best_cost = cost;
      best_flat = flat;
      best = std::move(r);
    }
  }
  if (!best) {
    throw std::runtime_error("no path in the network matches the guide shape");
  }
  return *best;
}

MatchedRoute manual_route(const TransitNetwork& net, const GuideShape& shape,
                          const std::vector<std::string>& station_ids) {
  if (station_ids.size() < 2) {
    throw std::invalid_argument("manual route needs at least two stations");
  }
  std::vector<std::size_t> idx;
  std::vector<std::size_t> edges;
  for (std::size_t k = 0; k < station_ids.size(); ++k) {
    auto s = net.station_index(station_ids[k]);
    if (!s) {
      throw std::invalid_argument("manual route: unknown station '" +
                                  station_ids[k] + "'");
    }
    if (k > 0) {
      auto c = net.connection_between(idx.back(), *s);
      if (!c) {
        throw std::invalid_argument("manual route: stations '" +
                                    station_ids[k - 1] + "' and '" +
                                    station_ids[k] + "' are not adjacent");
      }
      edges.push_back(*c);
    }
    idx.push_back(*s);
  }
  MatchedRoute r = to_route(net, idx, edges);
  r.score = frechet_distance(route_polyline(net, r), shape.anchor_polyline());
  r.history = {r.score};
  return r;
}

GuideShape place_shape(const GuideShape& shape, const TransitNetwork& net,
                       MatchedRoute& route) {
  if (route.stations.size() < 2) {
    throw std::invalid_argument("place_shape: route needs at least two stations");
  }
  BBox target = route_polyline(net, route).bbox();
  route.placement = bbox_align(shape.anchor_polyline().bbox(), target);
  return shape.transformed(route.placement);
}

}  // namespace shapemap
