// Network normalization: planarization, high-degree splitting and dummy
// shortcut insertion.

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "shapemap/network.hpp"

namespace shapemap {

namespace {

std::string fresh_id(const TransitNetwork& net, const std::string& prefix,
                     std::size_t& counter) {
  std::string id;
  do {
    id = prefix + std::to_string(++counter);
  } while (net.station_index(id) || net.connection_index(id));
  return id;
}

struct SplitPoint {
  double t;
  std::string station;
};

// Rewrites each line's station sequence through the given per-connection
// chains. `chain_of(a, b)` returns the interior stations met when walking the
// original connection from a to b.
template <typename ChainFn>
std::vector<Line> rewrite_lines(const std::vector<Line>& lines,
                                ChainFn chain_of) {
  std::vector<Line> out;
  out.reserve(lines.size());
  for (const auto& l : lines) {
    Line nl{l.id, l.color, {}};
    for (std::size_t i = 0; i < l.stations.size(); ++i) {
      if (i > 0) {
        for (auto& s : chain_of(l.stations[i - 1], l.stations[i])) {
          nl.stations.push_back(std::move(s));
        }
      }
      nl.stations.push_back(l.stations[i]);
    }
    out.push_back(std::move(nl));
  }
  return out;
}

}  // namespace

// _____________________________________________________________________________
TransitNetwork planarize(const TransitNetwork& net) {
  const auto& conns = net.connections();
  const auto positions = net.positions();
  const BBox box = BBox::of(positions);
  const double merge_eps =
      1e-9 * std::max(1.0, std::hypot(box.width(), box.height()));

  std::vector<std::vector<SplitPoint>> splits(conns.size());
  std::vector<Station> dummies;
  std::size_t counter = 0;
  TransitNetwork probe = net;  // used for id uniqueness checks

  auto dummy_at = [&](Point p) -> std::string {
    for (const auto& d : dummies) {
      if (dist(d.pos, p) <= merge_eps) return d.id;
    }
    Station s;
    s.id = fresh_id(probe, "~x", counter);
    s.pos = p;
    s.kind = StationKind::DummyPlanarization;
    probe.add_station(s);
    dummies.push_back(s);
    return s.id;
  };
  auto add_split = [&](std::size_t c, double t, const std::string& station) {
    for (const auto& sp : splits[c]) {
      if (sp.station == station) return;
    }
    splits[c].push_back({t, station});
  };

  for (auto [c1, c2] : crossing_pairs(net, positions)) {
    std::size_t a1 = net.from_index(c1), b1 = net.to_index(c1);
    std::size_t a2 = net.from_index(c2), b2 = net.to_index(c2);
    const bool shared = a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2;
    Segment s1 = net.segment(c1);
    Segment s2 = net.segment(c2);
    LineHit hit;
    if (shared || !line_intersection(s1, s2, hit)) {
      throw std::runtime_error("connections '" + conns[c1].id + "' and '" +
                               conns[c2].id + "' overlap");
    }
    constexpr double kEndEps = 1e-12;
    bool end1 = hit.t1 <= kEndEps || hit.t1 >= 1 - kEndEps;
    bool end2 = hit.t2 <= kEndEps || hit.t2 >= 1 - kEndEps;
    if (end1 && end2) {
      throw std::runtime_error("connections '" + conns[c1].id + "' and '" +
                               conns[c2].id + "' touch at coincident stations");
    }
    if (end1) {
      const auto& st = hit.t1 <= kEndEps ? conns[c1].from : conns[c1].to;
      add_split(c2, hit.t2, st);
    } else if (end2) {
      const auto& st = hit.t2 <= kEndEps ? conns[c2].from : conns[c2].to;
      add_split(c1, hit.t1, st);
    } else {
      std::string d = dummy_at(hit.point);
      add_split(c1, hit.t1, d);
      add_split(c2, hit.t2, d);
    }
  }

  TransitNetwork out;
  for (const auto& s : net.stations()) out.add_station(s);
  for (const auto& d : dummies) out.add_station(d);

  // Interior stations of each split connection, ordered from `from` to `to`.
  std::vector<std::vector<std::string>> chains(conns.size());
  for (std::size_t c = 0; c < conns.size(); ++c) {
    auto& sp = splits[c];
    if (sp.empty()) {
      out.add_connection(conns[c]);
      continue;
    }
    std::sort(sp.begin(), sp.end(), [](const SplitPoint& l, const SplitPoint& r) {
      return l.t < r.t;
    });
    std::vector<std::string> seq{conns[c].from};
    for (const auto& p : sp) {
      seq.push_back(p.station);
      chains[c].push_back(p.station);
    }
    seq.push_back(conns[c].to);
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
      Connection piece = conns[c];
      piece.id = conns[c].id + "~" + std::to_string(k + 1);
      piece.from = seq[k];
      piece.to = seq[k + 1];
      out.add_connection(std::move(piece));
    }
  }

  for (auto& l : rewrite_lines(net.lines(), [&](const std::string& a,
                                                const std::string& b) {
         std::vector<std::string> mid;
         auto ia = net.station_index(a);
         auto ib = net.station_index(b);
         if (!ia || !ib) return mid;
         auto c = net.connection_between(*ia, *ib);
         if (!c) return mid;
         mid = chains[*c];
         if (conns[*c].from != a) std::reverse(mid.begin(), mid.end());
         return mid;
       })) {
    out.add_line(std::move(l));
  }
  return out;
}

// _____________________________________________________________________________
TransitNetwork split_high_degree(const TransitNetwork& net) {
  const std::size_t n = net.stations().size();
  // fragment_of[s][k]: fragment index (into frag ids of s) holding incident k.
  std::vector<std::vector<std::string>> frag_ids(n);
  std::map<std::size_t, std::size_t> conn_fragment_from, conn_fragment_to;
  TransitNetwork out;

  for (std::size_t s = 0; s < n; ++s) {
    const auto& st = net.stations()[s];
    const auto& inc = net.incident(s);
    if (inc.size() <= kMaxStationDegree) {
      out.add_station(st);
      continue;
    }
    const std::size_t deg = inc.size();
    // Chain of m fragments: the two ends hold up to 7 connections, the middle
    // ones up to 6.
    std::size_t m = 2;
    while (14 + 6 * (m - 2) < deg) ++m;

    std::vector<std::pair<double, std::size_t>> dirs;
    double min_len = std::numeric_limits<double>::infinity();
    for (std::size_t c : inc) {
      Point v = net.stations()[net.other_end(c, s)].pos - st.pos;
      dirs.emplace_back(angle_of(v), c);
      min_len = std::min(min_len, norm(v));
    }
    std::sort(dirs.begin(), dirs.end());
    // Start the fan sequence after the widest angular gap.
    std::size_t start = 0;
    double widest = -1.0;
    for (std::size_t k = 0; k < deg; ++k) {
      double a = dirs[k].first;
      double b = dirs[(k + 1) % deg].first + (k + 1 == deg ? 2 * kPi : 0.0);
      if (b - a > widest) {
        widest = b - a;
        start = (k + 1) % deg;
      }
    }
    std::vector<std::size_t> sizes(m, deg / m);
    std::size_t rest = deg % m;
    // Remainder goes to the chain ends first.
    for (std::size_t k = 0; k < rest; ++k) {
      std::size_t slot = k == 0 ? 0 : (k == 1 ? m - 1 : k - 1);
      ++sizes[slot];
    }
    const double eps = 1e-3 * min_len;
    std::size_t pos = start;
    for (std::size_t f = 0; f < m; ++f) {
      Point mean{};
      for (std::size_t k = 0; k < sizes[f]; ++k) {
        auto [ang, c] = dirs[pos % deg];
        mean = mean + Point{std::cos(ang), std::sin(ang)};
        if (net.from_index(c) == s) {
          conn_fragment_from[c] = f;
        } else {
          conn_fragment_to[c] = f;
        }
        ++pos;
      }
      if (norm(mean) < 1e-9) mean = Point{1.0, 0.0};
      Station frag = st;
      frag.id = st.id + "/" + std::to_string(f + 1);
      frag.origin = st.origin.empty() ? st.id : st.origin;
      frag.pos = st.pos + mean * (eps / norm(mean));
      frag_ids[s].push_back(frag.id);
      out.add_station(std::move(frag));
    }
  }

  auto endpoint = [&](std::size_t c, bool from) -> std::string {
    std::size_t s = from ? net.from_index(c) : net.to_index(c);
    if (frag_ids[s].empty()) return net.stations()[s].id;
    return frag_ids[s][from ? conn_fragment_from[c] : conn_fragment_to[c]];
  };
  for (std::size_t c = 0; c < net.connections().size(); ++c) {
    Connection nc = net.connections()[c];
    nc.from = endpoint(c, true);
    nc.to = endpoint(c, false);
    out.add_connection(std::move(nc));
  }

  // Which fragment of station s does the connection towards station t use?
  auto fragment_towards = [&](std::size_t s, std::size_t t) -> std::size_t {
    auto c = *net.connection_between(s, t);
    return net.from_index(c) == s ? conn_fragment_from[c] : conn_fragment_to[c];
  };
  std::vector<std::map<std::size_t, std::set<std::string>>> aux_lines(n);
  std::vector<Line> lines;
  for (const auto& l : net.lines()) {
    Line nl{l.id, l.color, {}};
    for (std::size_t i = 0; i < l.stations.size(); ++i) {
      std::size_t s = net.station_at(l.stations[i]);
      if (frag_ids[s].empty()) {
        nl.stations.push_back(l.stations[i]);
        continue;
      }
      std::optional<std::size_t> in, outf;
      if (i > 0) in = fragment_towards(s, net.station_at(l.stations[i - 1]));
      if (i + 1 < l.stations.size()) {
        outf = fragment_towards(s, net.station_at(l.stations[i + 1]));
      }
      std::size_t a = in.value_or(outf.value_or(0));
      std::size_t b = outf.value_or(a);
      int step = b >= a ? 1 : -1;
      for (std::size_t f = a;; f = static_cast<std::size_t>(static_cast<long>(f) + step)) {
        nl.stations.push_back(frag_ids[s][f]);
        if (f == b) break;
        aux_lines[s][std::min(f, f + step)].insert(l.id);
      }
    }
    lines.push_back(std::move(nl));
  }

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t f = 0; f + 1 < frag_ids[s].size(); ++f) {
      Connection aux;
      aux.id = net.stations()[s].id + "/aux" + std::to_string(f + 1);
      aux.from = frag_ids[s][f];
      aux.to = frag_ids[s][f + 1];
      aux.kind = ConnectionKind::Auxiliary;
      auto it = aux_lines[s].find(f);
      if (it != aux_lines[s].end()) aux.lines = it->second;
      out.add_connection(std::move(aux));
    }
  }
  for (auto& l : lines) out.add_line(std::move(l));
  return out;
}

// _____________________________________________________________________________
TransitNetwork insert_dummy_edges(const TransitNetwork& net, double threshold) {
  TransitNetwork out = net;
  const auto& st = net.stations();
  std::size_t counter = 0;
  for (std::size_t a = 0; a < st.size(); ++a) {
    for (std::size_t b = a + 1; b < st.size(); ++b) {
      if (!(dist(st[a].pos, st[b].pos) < threshold)) continue;
      if (out.connection_between(a, b)) continue;
      if (!st[a].origin.empty() && st[a].origin == st[b].origin) continue;
      Connection c;
      c.id = fresh_id(out, "~d", counter);
      c.from = st[a].id;
      c.to = st[b].id;
      c.kind = ConnectionKind::DummyShortcut;
      out.add_connection(std::move(c));
    }
  }
  return out;
}

TransitNetwork normalize(const TransitNetwork& net) {
  return split_high_degree(planarize(net));
}

}  // namespace shapemap
