// End-to-end layout pipeline, quality metrics and the run report.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapemap/deformation.hpp"
#include "shapemap/grid_alignment.hpp"
#include "shapemap/network.hpp"
#include "shapemap/route_matching.hpp"

namespace shapemap {

enum class Stage { Normalize, Route, Smooth, Mixed, Grid };

const char* stage_name(Stage s);
/// Throws std::invalid_argument for an unknown name.
Stage parse_stage(const std::string& name);

struct PipelineConfig {
  Stage stage = Stage::Grid;
  DeformWeights weights;
  DeformOptions options;
  GridConfig grid;
  RouteMatchConfig route;
  // Dummy shortcut threshold as a multiple of the average connection length.
  double dummy_factor = kDummyThresholdFactor;
  // Station ids of a manual route; empty selects automatic matching.
  std::vector<std::string> manual_route;
};

/// Error raised inside one pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& what);
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

struct StageTimes {
  double normalize = 0.0;
  double route = 0.0;
  double smooth = 0.0;
  double mixed = 0.0;
  double grid = 0.0;
  double total = 0.0;
};

struct RunReport {
  std::size_t stations = 0;     // after normalization
  std::size_t connections = 0;  // after normalization
  std::size_t route_stations = 0;
  double route_score = 0.0;
  StageTimes seconds;
  std::optional<int> smooth_iterations;
  std::optional<int> mixed_iterations;
  std::optional<double> smooth_energy;
  std::optional<double> mixed_energy;
  std::size_t shape_stations = 0;
  // Integral Frechet distance of the shape-station chain to the placed
  // anchor polyline, on the geographic and on the final layout.
  std::optional<double> fidelity_input;
  std::optional<double> fidelity_output;
  std::optional<double> octolinearity;
  // Octolinear-edge segments touching a spliced shape sink, as a share of
  // all routed segments.
  std::optional<double> shape_interface_share;
  std::optional<std::size_t> failed_edges;
  std::size_t crossings = 0;
};

/// Structured "key value" text, one entry per line. Stages that did not run
/// are omitted.
std::string format_report(const RunReport& report, const std::string& stage);

/// Stations of the chain, ordered by the position of their closest point on
/// the anchor polyline. Stations whose closest shape polyline is not the
/// anchor are left out.
std::vector<std::size_t> shape_chain(const std::vector<char>& shape_stations,
                                     const std::vector<Point>& order_positions,
                                     const GuideShape& shape);

/// Integral Frechet distance between the chain through `positions` and the
/// anchor polyline. Closed when the anchor is closed and the chain has at
/// least three stations. Infinity for chains of fewer than two stations.
double chain_fidelity(const std::vector<std::size_t>& chain,
                      const std::vector<Point>& positions, const GuideShape& shape);

struct OctolinearityStats {
  std::size_t octo_segments = 0;
  std::size_t aligned = 0;
  std::size_t interface_segments = 0;
  std::size_t total_segments = 0;
  double fraction() const;
  double interface_share() const;
};

/// Counts routed segments of octolinear edges whose direction is a multiple
/// of 45 degrees within `tolerance` radians. Octolinear-edge segments
/// touching a shape sink are interface segments and not counted as
/// octolinear; segments of shape edges are in neither group.
OctolinearityStats octolinearity(const GridLayout& layout, double tolerance = 1e-9);

struct PipelineResult {
  TransitNetwork input;
  TransitNetwork normalized;
  TransitNetwork matching;  // normalized plus dummy shortcuts
  MatchedRoute route;
  GuideShape placed;
  std::optional<LayoutState> smooth;
  std::optional<LayoutState> mixed;
  std::optional<GridLayout> grid;
  RunReport report;
};

/// normalize, route (matched or manual), place the shape, then the smooth,
/// mixed and grid stages up to cfg.stage. Stage failures raise StageError;
/// `out` keeps everything finished before the failure.
void run_pipeline(const TransitNetwork& net, const GuideShape& shape,
                  const PipelineConfig& cfg, PipelineResult& out);
PipelineResult run_pipeline(const TransitNetwork& net, const GuideShape& shape,
                            const PipelineConfig& cfg = {});

/// Final station positions and connection geometry of the last stage run.
std::vector<Point> final_positions(const PipelineResult& r);
std::vector<std::vector<Point>> final_paths(const PipelineResult& r);

}  // namespace shapemap
