// Least-squares deformation of a transit network towards a placed guide
// shape: a smooth stage followed by a mixed shape/octolinear stage.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "shapemap/network.hpp"
#include "shapemap/route_matching.hpp"

namespace shapemap {

struct SmoothWeights {
  double w_c = 4.0;
  double w_l = 1.0;
  double w_a = 2.0;
  double w_p = 0.16;
};

struct MixedWeights {
  double w_o = 2.0;
  double w_p = 0.1;
  double w_c = 10.0;
};

struct DeformWeights {
  SmoothWeights smooth;
  MixedWeights mixed;
  // Target edge length. Zero selects the average connection length of the
  // input layout.
  double L = 0.0;
};

struct LayoutState;

struct DeformOptions {
  int max_iter_smooth = 100;
  int max_iter_mixed = 50;
  // Relative energy change below which iteration stops.
  double tol = 1e-4;
  // Called with every accepted iterate.
  std::function<void(const LayoutState&)> on_accept;
};

inline constexpr int kNoSector = -1;

/// Station coordinates of one stage plus the shape/octolinear partition.
/// All per-station and per-connection vectors are indexed like the network.
struct LayoutState {
  std::vector<Point> positions;
  std::vector<char> shape_stations;
  std::vector<char> shape_edges;
  // Sector k in 0..7 (direction k * pi / 4, measured from `from` to `to`) for
  // octolinear connections; kNoSector for shape connections and before the
  // mixed stage.
  std::vector<int> sectors;
  int iteration = 0;
  double energy = 0.0;
  // Energy of the initial state followed by every accepted iterate.
  std::vector<double> energy_history;
  // Crossing count after every accepted iterate.
  std::vector<std::size_t> crossing_history;
  // Stations moved back by the last planarity_guard call.
  std::vector<std::size_t> reverted;
};

/// Geographic layout of `net` with empty shape assignment.
LayoutState initial_state(const TransitNetwork& net);

/// Resolved target edge length L.
double target_length(const TransitNetwork& net, const DeformWeights& weights);

/// Target length of one connection: L, or L / 2 when an endpoint is a
/// planarization dummy or the connection joins split-station fragments.
double connection_target(const TransitNetwork& net, std::size_t c, double L);

/// Reflection test: a station is a shape station iff the segment from it to
/// its mirror image across the closest shape point meets no connection.
/// Shape edges are the connections with both endpoints assigned.
LayoutState assign_shape_stations(LayoutState state, const TransitNetwork& net,
                                  const GuideShape& shape);

/// Smooth objective at the state's positions. Edge rotations, closest shape
/// points and the shape assignment are all taken at those positions.
double smooth_energy(const LayoutState& state, const TransitNetwork& net,
                     const GuideShape& shape, const DeformWeights& weights);

/// One full linearized step: freezes rotations, closest points and the
/// assignment at the current positions, solves the least-squares system and
/// refreshes the assignment and energy at the new positions.
LayoutState smooth_step(const LayoutState& state, const TransitNetwork& net,
                        const GuideShape& shape, const DeformWeights& weights);

/// Iterates smooth steps from the geographic layout. A step is accepted only
/// if it does not raise the energy; otherwise it is shortened by halving.
/// Every candidate passes through planarity_guard.
LayoutState run_smooth(const TransitNetwork& net, const GuideShape& shape,
                       const DeformWeights& weights,
                       const DeformOptions& options = {});

// -- Octolinear sectors ------------------------------------------------------

/// Absolute rotation from direction `angle` to sector `k`, in [0, pi].
double sector_rotation(double angle, int k);

/// Sector nearest to `angle`.
int nearest_sector(double angle);

/// Minimum-cost assignment of rows to distinct columns (rows <= columns).
/// Returns the column of every row.
std::vector<int> min_cost_assignment(
    const std::vector<std::vector<double>>& cost);

/// Distinct sectors for the edge directions leaving one station, minimizing
/// the total rotation. Edges with a value in `fixed` keep that sector.
/// Throws std::invalid_argument for more than 8 directions or conflicting
/// fixed sectors.
std::vector<int> assign_station_sectors(
    const std::vector<double>& directions,
    const std::vector<std::optional<int>>& fixed = {});

/// Gives every non-shape connection a sector so that the octolinear edges at
/// each station use distinct sectors.
LayoutState assign_octolinear_sectors(LayoutState state,
                                      const TransitNetwork& net);

/// Number of stations with two octolinear edges in the same sector.
std::size_t sector_conflicts(const LayoutState& state, const TransitNetwork& net);

double mixed_energy(const LayoutState& state, const TransitNetwork& net,
                    const GuideShape& shape, const DeformWeights& weights,
                    const std::vector<Point>& anchor);

/// Mixed stage starting from a smooth layout. Shape stations and edges stay
/// as assigned by the smooth stage; sectors are assigned once before the loop.
LayoutState run_mixed(const LayoutState& smooth, const TransitNetwork& net,
                      const GuideShape& shape, const DeformWeights& weights,
                      const DeformOptions& options = {});

// -- Guards ------------------------------------------------------------------

/// Moves back to `prev` every station of a connection pair that crosses in
/// `next` but not in `prev`, until no new crossing remains.
LayoutState planarity_guard(const LayoutState& prev, LayoutState next,
                            const TransitNetwork& net);

struct ProximityViolation {
  std::size_t station;
  std::size_t connection;
  Point target;  // position at the threshold distance from the connection
};

/// Stations closer than `threshold` to a connection they are not part of.
/// Fragments of one split station are not checked against each other.
std::vector<ProximityViolation> proximity_violations(
    const TransitNetwork& net, const std::vector<Point>& positions,
    double threshold);

}  // namespace shapemap
