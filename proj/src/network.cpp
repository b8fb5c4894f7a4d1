#include "shapemap/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace shapemap {

// _____________________________________________________________________________
std::size_t TransitNetwork::add_station(Station s) {
  std::size_t idx = stations_.size();
  station_ids_.emplace(s.id, idx);
  stations_.push_back(std::move(s));
  incident_.emplace_back();
  return idx;
}

std::size_t TransitNetwork::add_connection(Connection c) {
  auto a = station_index(c.from);
  auto b = station_index(c.to);
  if (a && b && *a != *b) {
    auto key = std::minmax(*a, *b);
    auto it = pair_index_.find(key);
    if (it != pair_index_.end()) {
      auto& existing = connections_[it->second];
      existing.lines.insert(c.lines.begin(), c.lines.end());
      if (existing.kind != ConnectionKind::Real && c.kind == ConnectionKind::Real) {
        existing.kind = ConnectionKind::Real;
      }
      return it->second;
    }
  }
  std::size_t idx = connections_.size();
  connection_ids_.emplace(c.id, idx);
  if (a && b && *a != *b) {
    ends_.emplace_back(*a, *b);
    pair_index_.emplace(std::minmax(*a, *b), idx);
    incident_[*a].push_back(idx);
    incident_[*b].push_back(idx);
  } else {
    ends_.emplace_back(kMissing, kMissing);
  }
  connections_.push_back(std::move(c));
  return idx;
}

void TransitNetwork::add_line(Line l) { lines_.push_back(std::move(l)); }

std::optional<std::size_t> TransitNetwork::station_index(
    const std::string& id) const {
  auto it = station_ids_.find(id);
  if (it == station_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TransitNetwork::connection_index(
    const std::string& id) const {
  auto it = connection_ids_.find(id);
  if (it == connection_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TransitNetwork::connection_between(
    std::size_t a, std::size_t b) const {
  auto it = pair_index_.find(std::minmax(a, b));
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TransitNetwork::station_at(const std::string& id) const {
  auto idx = station_index(id);
  if (!idx) throw std::out_of_range("unknown station '" + id + "'");
  return *idx;
}

std::size_t TransitNetwork::other_end(std::size_t c, std::size_t s) const {
  return ends_[c].first == s ? ends_[c].second : ends_[c].first;
}

std::size_t TransitNetwork::max_degree() const {
  std::size_t m = 0;
  for (const auto& inc : incident_) m = std::max(m, inc.size());
  return m;
}

Segment TransitNetwork::segment(std::size_t c) const {
  return {stations_[ends_[c].first].pos, stations_[ends_[c].second].pos};
}

double TransitNetwork::average_connection_length() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < connections_.size(); ++c) {
    if (ends_[c].first == kMissing) continue;
    if (connections_[c].kind == ConnectionKind::DummyShortcut) continue;
    sum += segment(c).length();
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

std::vector<Point> TransitNetwork::positions() const {
  std::vector<Point> out;
  out.reserve(stations_.size());
  for (const auto& s : stations_) out.push_back(s.pos);
  return out;
}

bool TransitNetwork::operator==(const TransitNetwork& o) const {
  return stations_ == o.stations_ && connections_ == o.connections_ &&
         lines_ == o.lines_;
}

// _____________________________________________________________________________
std::vector<Violation> validate(const TransitNetwork& net) {
  std::vector<Violation> out;
  std::map<std::string, int> seen;
  for (const auto& s : net.stations()) {
    if (++seen[s.id] == 2) out.push_back({s.id, "duplicate station id"});
    if (!std::isfinite(s.pos.x) || !std::isfinite(s.pos.y)) {
      out.push_back({s.id, "station position is not finite"});
    }
  }
  seen.clear();
  for (const auto& c : net.connections()) {
    if (++seen[c.id] == 2) out.push_back({c.id, "duplicate connection id"});
    bool ok = true;
    for (const auto* end : {&c.from, &c.to}) {
      if (!net.station_index(*end)) {
        out.push_back({c.id, "connection references unknown station '" +
                                 *end + "'"});
        ok = false;
      }
    }
    if (ok && c.from == c.to) {
      out.push_back({c.id, "connection joins a station to itself"});
    }
    if (c.kind == ConnectionKind::Real && c.lines.empty()) {
      out.push_back({c.id, "connection belongs to no line"});
    }
    if (c.kind == ConnectionKind::DummyShortcut && !c.lines.empty()) {
      out.push_back({c.id, "dummy connection must not carry lines"});
    }
  }
  seen.clear();
  for (const auto& l : net.lines()) {
    if (++seen[l.id] == 2) out.push_back({l.id, "duplicate line id"});
    if (l.stations.size() < 2) {
      out.push_back({l.id, "line needs at least two stations"});
    }
    for (std::size_t i = 0; i < l.stations.size(); ++i) {
      auto a = net.station_index(l.stations[i]);
      if (!a) {
        out.push_back({l.id, "line references unknown station '" +
                                 l.stations[i] + "'"});
        continue;
      }
      if (i == 0) continue;
      auto b = net.station_index(l.stations[i - 1]);
      if (!b) continue;
      auto c = net.connection_between(*a, *b);
      if (!c) {
        out.push_back({l.id, "no connection between '" + l.stations[i - 1] +
                                 "' and '" + l.stations[i] + "'"});
      } else if (!net.connections()[*c].lines.count(l.id)) {
        out.push_back({l.id, "connection '" + net.connections()[*c].id +
                                 "' does not carry the line"});
      }
    }
  }
  return out;
}

// _____________________________________________________________________________
std::vector<std::pair<std::size_t, std::size_t>> crossing_pairs(
    const TransitNetwork& net, const std::vector<Point>& positions) {
  struct Item {
    std::size_t c;
    double lo, hi;
  };
  const auto& conns = net.connections();
  std::vector<Item> items;
  items.reserve(conns.size());
  for (std::size_t c = 0; c < conns.size(); ++c) {
    if (!net.station_index(conns[c].from) || !net.station_index(conns[c].to)) {
      continue;
    }
    Point a = positions[net.from_index(c)];
    Point b = positions[net.to_index(c)];
    items.push_back({c, std::min(a.x, b.x), std::max(a.x, b.x)});
  }
  std::sort(items.begin(), items.end(), [](const Item& l, const Item& r) {
    return l.lo < r.lo || (l.lo == r.lo && l.c < r.c);
  });

  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<std::size_t> active;
  for (const auto& it : items) {
    std::erase_if(active, [&](std::size_t k) { return items[k].hi < it.lo; });
    std::size_t c1 = it.c;
    std::size_t a1 = net.from_index(c1), b1 = net.to_index(c1);
    Segment s1{positions[a1], positions[b1]};
    double lo_y1 = std::min(s1.a.y, s1.b.y), hi_y1 = std::max(s1.a.y, s1.b.y);
    for (std::size_t k : active) {
      std::size_t c2 = items[k].c;
      std::size_t a2 = net.from_index(c2), b2 = net.to_index(c2);
      Segment s2{positions[a2], positions[b2]};
      if (std::max(s2.a.y, s2.b.y) < lo_y1 || std::min(s2.a.y, s2.b.y) > hi_y1) {
        continue;
      }
      bool shared = a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2;
      if (segments_intersect(s1, s2, shared)) {
        out.emplace_back(std::min(c1, c2), std::max(c1, c2));
      }
    }
    active.push_back(static_cast<std::size_t>(&it - items.data()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_crossings(const TransitNetwork& net,
                            const std::vector<Point>& positions) {
  return crossing_pairs(net, positions).size();
}

}  // namespace shapemap
