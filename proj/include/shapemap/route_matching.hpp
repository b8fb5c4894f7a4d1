// Route matching: find the network path that best resembles the guide shape
// and place the shape on it.

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "shapemap/geometry.hpp"
#include "shapemap/network.hpp"

namespace shapemap {

/// One or more polylines. The anchor is the polyline holding the vertex
/// closest to the top-left corner of the whole shape's bounding box (y up).
class GuideShape {
 public:
  GuideShape() = default;
  /// Throws std::invalid_argument when `polylines` is empty.
  explicit GuideShape(std::vector<Polyline> polylines);

  const std::vector<Polyline>& polylines() const { return polylines_; }
  std::size_t anchor() const { return anchor_; }
  const Polyline& anchor_polyline() const { return polylines_[anchor_]; }
  BBox bbox() const;
  GuideShape transformed(const Similarity& t) const;
  /// Every polyline subdivided so no segment exceeds `max_seg`.
  GuideShape resampled(double max_seg) const;
  /// Every polyline replaced by resample_uniform(polyline, spacing).
  GuideShape spaced(double spacing) const;

  bool operator==(const GuideShape&) const = default;

 private:
  std::vector<Polyline> polylines_;
  std::size_t anchor_ = 0;
};

struct MatchedRoute {
  std::vector<std::string> stations;  // first == last for a closed route
  std::vector<std::string> edges;     // connection ids, one per step
  double score = std::numeric_limits<double>::infinity();
  Similarity placement;
  std::size_t dummy_count = 0;
  // Score after every accepted extension, in growth order.
  std::vector<double> history;

  bool closed() const {
    return stations.size() > 2 && stations.front() == stations.back();
  }
};

struct RouteMatchConfig {
  int samples = kDefaultSamples;
  // Dummy edges add dummy_penalty * (pi / 8) * (share of dummy edges in W)
  // to the ranking cost.
  double dummy_penalty = 5.0;
  // When set, only stations inside the window are tried as start stations.
  std::optional<BBox> window;
};

/// Polyline through the route's stations (closed when the route is).
Polyline route_polyline(const TransitNetwork& net, const MatchedRoute& route);

/// Greedy growth from `start`. A neighbour of the tail is a candidate only if
/// appending it strictly lowers the distance to the anchor polyline; the
/// candidate with the lowest partial distance (plus dummy penalty) is
/// appended. Returns a single-station route with infinite score when no
/// neighbour improves. Throws std::out_of_range for an unknown start.
MatchedRoute grow_path(const TransitNetwork& net, const GuideShape& shape,
                       const std::string& start,
                       const RouteMatchConfig& cfg = {});

/// Best grown route over all start stations, ranked by (score + dummy
/// penalty, dummy count, station id sequence). Routes whose bounding box has
/// zero area rank after all others. Throws std::runtime_error when nothing
/// matches.
MatchedRoute match_route(const TransitNetwork& net, const GuideShape& shape,
                         const RouteMatchConfig& cfg = {});

/// Route through the given stations. Throws std::invalid_argument naming
/// the first pair of consecutive stations that are not adjacent.
MatchedRoute manual_route(const TransitNetwork& net, const GuideShape& shape,
                          const std::vector<std::string>& station_ids);

/// Aligns the anchor polyline's bounding box with the route's and applies the
/// same similarity to every polyline. Stores the transform in `route`.
/// Throws std::invalid_argument when either bounding box has zero area.
GuideShape place_shape(const GuideShape& shape, const TransitNetwork& net,
                       MatchedRoute& route);

}  // namespace shapemap
