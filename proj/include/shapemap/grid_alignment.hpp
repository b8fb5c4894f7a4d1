// Grid alignment: routes every connection of the mixed layout through an
// octolinear grid graph with the guide shape spliced in.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shapemap/deformation.hpp"
#include "shapemap/network.hpp"
#include "shapemap/route_matching.hpp"

namespace shapemap {

struct GridConfig {
  // Cell size factor; zero picks 0.2 above 150 stations and 0.3 otherwise.
  double f_d = 0.0;
  // Cell size d. Zero derives it as f_d times the average connection length
  // of the layout being aligned.
  double cell = 0.0;
  double c_hop = 20.0;
  // Port-to-sink cost; zero selects 10 * c_hop.
  double c_sink = 0.0;
  // Shape splice distances as multiples of d.
  double d_min = 0.2;
  double d_low = 0.5;
  double d_up = 1.5;
  // Spacing of the shape sinks along the guide shape, as a multiple of d.
  double shape_spacing = 0.5;
  // Candidate radius for octolinear stations, as a multiple of d.
  double radius = 2.0;
  // Candidate count for shape stations, taken from the free shape sinks.
  std::size_t shape_candidates = 2;
  // Empty cells added around the covered area on every side.
  int padding = 2;
};

/// f_d default for a network of the given size.
double default_grid_factor(std::size_t stations);

/// Cell size d for `positions` of `net` under `cfg`.
double grid_cell_size(const TransitNetwork& net,
                      const std::vector<Point>& positions,
                      const GridConfig& cfg);

enum class HopKind : std::uint8_t {
  Grid,       // between neighbouring grid sinks
  Connector,  // between a shape sink and a grid sink
  Shape,      // between consecutive shape sinks
};

/// Port-augmented grid. A port is identified with its hop and one of the
/// hop's end sinks; the complete graph on a sink's ports is implicit and
/// priced by within_sink_cost.
class GridGraph {
 public:
  struct Sink {
    Point pos;
    bool shape = false;
    bool removed = false;
    int col = -1;
    int row = -1;
    std::vector<std::size_t> hops;
  };
  struct Hop {
    std::size_t a = 0;
    std::size_t b = 0;
    double cost = 0.0;
    HopKind kind = HopKind::Grid;
    bool removed = false;
    // Hops whose segment meets this one away from a shared sink.
    std::vector<std::size_t> crossing;
  };

  GridGraph() = default;
  GridGraph(double cell, double c_hop, double c_sink);

  double cell() const { return cell_; }
  double c_hop() const { return c_hop_; }
  double c_sink() const { return c_sink_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  const std::vector<Sink>& sinks() const { return sinks_; }
  const std::vector<Hop>& hops() const { return hops_; }

  std::size_t add_sink(Sink s);
  std::size_t add_hop(std::size_t a, std::size_t b, double cost, HopKind kind);
  void remove_hop(std::size_t h);
  void remove_sink(std::size_t s);  // also removes its hops
  std::optional<std::size_t> grid_sink(int col, int row) const;
  std::size_t other_end(std::size_t h, std::size_t s) const;

  /// Live ports of a sink (hops not removed).
  std::size_t port_count(std::size_t s) const;

  /// Cost of the within-sink edge joining the ports of hops h1 and h2 at
  /// sink s: k * (2 pi - theta) with theta the angle between the two hop
  /// directions; k = 1 at shape sinks and 2 c_hop / (3 pi) elsewhere.
  double within_sink_cost(std::size_t s, std::size_t h1, std::size_t h2) const;

  /// Recomputes the crossing lists of all live hops.
  void index_crossings();

  // -- Occupancy ------------------------------------------------------------
  bool sink_free(std::size_t s) const;
  bool hop_free(std::size_t h) const;
  // Sink fixed as the position of a station; kNone when not a station sink.
  std::size_t station_at(std::size_t s) const { return station_[s]; }
  void occupy_path(const std::vector<std::size_t>& sinks,
                   const std::vector<std::size_t>& hops, std::size_t from_station,
                   std::size_t to_station);

  /// Lattice dimensions in cells; the first (cols + 1) * (rows + 1) sinks
  /// must be the lattice sinks in row-major order.
  void set_lattice(int cols, int rows);

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  double cell_ = 1.0;
  double c_hop_ = 20.0;
  double c_sink_ = 200.0;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<Sink> sinks_;
  std::vector<Hop> hops_;
  std::vector<char> sink_used_;
  std::vector<std::size_t> station_;
  std::vector<char> hop_used_;
  std::vector<int> hop_blocked_;
};

/// Octolinear grid whose sink lattice covers `area` with ceil(w / d) columns
/// and ceil(h / d) rows of cells, plus cfg.padding cells on every side.
/// cfg.cell must be positive.
GridGraph build_grid(const BBox& area, const GridConfig& cfg);

/// Splices the shape into the grid. Shape vertices become sinks joined along
/// the shape; grid hops meeting the shape and grid sinks within d_min of a
/// shape vertex are removed; each shape vertex is joined to the grid sinks at
/// distance [d_low, d_up]. The shape should already be resampled to a vertex
/// spacing of about d. Throws std::runtime_error when a shape polyline ends up
/// with no connection to the grid.
GridGraph overlay_shape(GridGraph grid, const GuideShape& shape,
                        const GridConfig& cfg);

/// Connection chain after removing degree-2 stations that keep their
/// direction.
struct ReducedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<std::size_t> interior;     // removed stations, from -> to
  std::vector<std::size_t> connections;  // original connections, from -> to
  bool shape = false;
};

struct ReducedNetwork {
  std::vector<char> kept;  // per station
  std::vector<ReducedEdge> edges;
  std::size_t removed() const;
};

/// Removes octolinear degree-2 stations whose two edges have equal or
/// opposite sectors. Shape stations and stations of degree other than two are
/// kept. Every cycle keeps at least two stations.
ReducedNetwork collapse_network(const LayoutState& mixed,
                                const TransitNetwork& net);

/// Routing order: shape edges by position along the shape, then octolinear
/// edges breadth first from stations that already have a routed edge, ties by
/// decreasing length then connection id.
std::vector<std::size_t> route_order(const ReducedNetwork& reduced,
                                     const LayoutState& mixed,
                                     const TransitNetwork& net,
                                     const GuideShape& shape);

struct RoutedEdge {
  std::size_t edge = 0;  // index into ReducedNetwork::edges
  std::vector<std::size_t> sinks;
  std::vector<std::size_t> hops;
  std::vector<Point> polyline;
  std::vector<char> on_shape;  // per polyline vertex: lies on a shape sink
  bool routed = false;
  double cost = 0.0;
};

/// Shortest path for one reduced edge. Endpoints fixed in `fixed_sink` are
/// used as is; free endpoints start from virtual vertices joined to their
/// candidate sinks. On success the endpoints are fixed and the path is marked
/// occupied.
RoutedEdge route_edge(GridGraph& grid, const ReducedNetwork& reduced,
                      std::size_t edge, const LayoutState& mixed,
                      std::vector<std::size_t>& fixed_sink,
                      const GridConfig& cfg);

struct GridLayout {
  std::vector<Point> positions;  // per station
  std::vector<RoutedEdge> routed;
  // Drawn geometry of every original connection.
  std::vector<std::vector<Point>> paths;
  std::vector<char> connection_routed;
  // Segments of routed polylines, with a flag for touching a shape sink.
  struct DrawnSegment {
    Segment seg;
    bool shape_edge = false;
    bool at_shape_sink = false;
  };
  std::vector<DrawnSegment> segments;
  std::size_t failed = 0;
  double cell = 0.0;
  std::size_t sink_count = 0;
};

/// Places removed stations at equal arc-length spacing along their merged
/// edge's polyline and splits it into per-connection paths. Failed edges are
/// drawn straight between their endpoints.
GridLayout reinsert_stations(const TransitNetwork& net, const ReducedNetwork& reduced,
                             const std::vector<RoutedEdge>& routed,
                             const std::vector<Point>& station_positions);

/// Full grid stage: collapse, build, overlay, route in order, reinsert.
GridLayout align_to_grid(const TransitNetwork& net, const LayoutState& mixed,
                         const GuideShape& shape, const GridConfig& cfg = {});

/// Crossings among the routed polylines of a grid layout, failed edges
/// excluded.
std::size_t routed_crossings(const GridLayout& layout);

}  // namespace shapemap
