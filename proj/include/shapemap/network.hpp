// Transit network model: stations, connections and the lines covering them.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shapemap/geometry.hpp"

namespace shapemap {

enum class StationKind : std::uint8_t {
  Real,
  DummyPlanarization,  // inserted at a crossing of two connections
  DummyShortcut,
};

enum class ConnectionKind : std::uint8_t {
  Real,
  DummyShortcut,  // matching-only shortcut between nearby stations
  Auxiliary,      // joins the fragments of a split high-degree station
};

struct Station {
  std::string id;
  std::string name;
  Point pos;
  StationKind kind = StationKind::Real;
  // Id of the input station this one was split from, empty if not split.
  std::string origin;

  bool operator==(const Station&) const = default;
};

struct Connection {
  std::string id;
  std::string from;
  std::string to;
  std::set<std::string> lines;
  ConnectionKind kind = ConnectionKind::Real;

  bool operator==(const Connection&) const = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

struct Line {
  std::string id;
  Rgb color;
  std::vector<std::string> stations;

  bool operator==(const Line&) const = default;
};

/// Network value with index-based adjacency. Stations and connections keep
/// insertion order; all lookups by id go through the index maps.
class TransitNetwork {
 public:
  std::size_t add_station(Station s);
  /// Adds a connection; a second connection between the same station pair is
  /// merged into the existing one (line sets are united). Returns its index.
  std::size_t add_connection(Connection c);
  void add_line(Line l);

  const std::vector<Station>& stations() const { return stations_; }
  const std::vector<Connection>& connections() const { return connections_; }
  const std::vector<Line>& lines() const { return lines_; }
  std::vector<Line>& mutable_lines() { return lines_; }

  std::optional<std::size_t> station_index(const std::string& id) const;
  std::optional<std::size_t> connection_index(const std::string& id) const;
  std::optional<std::size_t> connection_between(std::size_t a,
                                                std::size_t b) const;
  std::size_t station_at(const std::string& id) const;  // throws if unknown

  // Endpoint indices of connection `c`. Only valid for connections whose
  // endpoints exist.
  std::size_t from_index(std::size_t c) const { return ends_[c].first; }
  std::size_t to_index(std::size_t c) const { return ends_[c].second; }
  std::size_t other_end(std::size_t c, std::size_t s) const;

  const std::vector<std::size_t>& incident(std::size_t s) const {
    return incident_[s];
  }
  std::size_t degree(std::size_t s) const { return incident_[s].size(); }
  std::size_t max_degree() const;

  Segment segment(std::size_t c) const;
  double average_connection_length() const;
  std::vector<Point> positions() const;

  bool operator==(const TransitNetwork& o) const;

 private:
  static constexpr std::size_t kMissing = static_cast<std::size_t>(-1);

  std::vector<Station> stations_;
  std::vector<Connection> connections_;
  std::vector<Line> lines_;
  std::map<std::string, std::size_t> station_ids_;
  std::map<std::string, std::size_t> connection_ids_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> pair_index_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
  std::vector<std::vector<std::size_t>> incident_;
};

struct Violation {
  std::string subject;  // offending id
  std::string message;
};

/// Referential integrity report; empty iff the network is well formed.
std::vector<Violation> validate(const TransitNetwork& net);

/// Inserts a planarization dummy station at every crossing and splits the
/// crossing connections. Throws std::runtime_error when two connections
/// overlap along a segment.
TransitNetwork planarize(const TransitNetwork& net);

inline constexpr std::size_t kMaxStationDegree = 8;

/// Splits every station of degree > 8 into a chain of fragments, each holding
/// a contiguous fan of the incident connections in angular order, joined by
/// auxiliary connections.
TransitNetwork split_high_degree(const TransitNetwork& net);

/// Adds a dummy shortcut for every unconnected station pair closer than
/// `threshold`.
TransitNetwork insert_dummy_edges(const TransitNetwork& net, double threshold);

inline constexpr double kDummyThresholdFactor = 1.2;

/// planarize followed by split_high_degree.
TransitNetwork normalize(const TransitNetwork& net);

/// Number of crossing connection pairs for the given station positions.
/// Connections sharing a station only count when they overlap.
std::size_t count_crossings(const TransitNetwork& net,
                            const std::vector<Point>& positions);
std::vector<std::pair<std::size_t, std::size_t>> crossing_pairs(
    const TransitNetwork& net, const std::vector<Point>& positions);

}  // namespace shapemap
