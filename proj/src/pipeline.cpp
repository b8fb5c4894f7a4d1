#include "shapemap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace shapemap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs `fn`, adds its wall time to `slot` and tags any exception with the
// stage.
template <typename Fn>
void timed(Stage stage, double& slot, Fn fn) {
  auto t0 = Clock::now();
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    slot += seconds_since(t0);
    throw StageError(stage, e.what());
  }
  slot += seconds_since(t0);
}

std::string fixed(double v, int digits = 6) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Normalize: return "normalize";
    case Stage::Route: return "route";
    case Stage::Smooth: return "smooth";
    case Stage::Mixed: return "mixed";
    case Stage::Grid: return "grid";
  }
  return "?";
}

Stage parse_stage(const std::string& name) {
  for (Stage s : {Stage::Route, Stage::Smooth, Stage::Mixed, Stage::Grid}) {
    if (name == stage_name(s)) return s;
  }
  throw std::invalid_argument("unknown stage '" + name + "'");
}

StageError::StageError(Stage stage, const std::string& what)
    : std::runtime_error(std::string(stage_name(stage)) + " stage: " + what),
      stage_(stage) {}

// _____________________________________________________________________________
std::string format_report(const RunReport& r, const std::string& stage) {
  std::string out;
  auto put = [&](const std::string& key, const std::string& value) {
    out += key + ' ' + value + '\n';
  };
  put("stage", stage);
  put("stations", std::to_string(r.stations));
  put("connections", std::to_string(r.connections));
  put("route_stations", std::to_string(r.route_stations));
  put("route_score", fixed(r.route_score));
  put("time_normalize", fixed(r.seconds.normalize));
  put("time_route", fixed(r.seconds.route));
  if (r.smooth_iterations) put("time_smooth", fixed(r.seconds.smooth));
  if (r.mixed_iterations) put("time_mixed", fixed(r.seconds.mixed));
  if (r.failed_edges) put("time_grid", fixed(r.seconds.grid));
  put("time_total", fixed(r.seconds.total));
  if (r.smooth_iterations) {
    put("smooth_iterations", std::to_string(*r.smooth_iterations));
    put("smooth_energy", fixed(*r.smooth_energy));
  }
  if (r.mixed_iterations) {
    put("mixed_iterations", std::to_string(*r.mixed_iterations));
    put("mixed_energy", fixed(*r.mixed_energy));
  }
  if (r.fidelity_output) {
    put("shape_stations", std::to_string(r.shape_stations));
    put("fidelity_input", fixed(*r.fidelity_input));
    put("fidelity_output", fixed(*r.fidelity_output));
  }
  if (r.octolinearity) {
    put("octolinearity", fixed(*r.octolinearity));
    put("shape_interface_share", fixed(*r.shape_interface_share));
  }
  if (r.failed_edges) put("failed_edges", std::to_string(*r.failed_edges));
  put("crossings", std::to_string(r.crossings));
  return out;
}

// _____________________________________________________________________________
std::vector<std::size_t> shape_chain(const std::vector<char>& shape_stations,
                                     const std::vector<Point>& order_positions,
                                     const GuideShape& shape) {
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t s = 0; s < shape_stations.size(); ++s) {
    if (!shape_stations[s]) continue;
    std::size_t best_line = 0;
    double best = std::numeric_limits<double>::infinity();
    double fraction = 0.0;
    for (std::size_t k = 0; k < shape.polylines().size(); ++k) {
      ClosestPoint cp = closest_point(shape.polylines()[k], order_positions[s]);
      if (cp.distance < best) {
        best = cp.distance;
        best_line = k;
        fraction = cp.arc_fraction;
      }
    }
    if (best_line == shape.anchor()) keyed.emplace_back(fraction, s);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> out;
  for (auto [f, s] : keyed) out.push_back(s);
  return out;
}

double chain_fidelity(const std::vector<std::size_t>& chain,
                      const std::vector<Point>& positions, const GuideShape& shape) {
  std::vector<Point> pts;
  for (std::size_t s : chain) {
    if (pts.empty() || !(pts.back() == positions[s])) pts.push_back(positions[s]);
  }
  const Polyline& anchor = shape.anchor_polyline();
  bool closed = anchor.closed() && pts.size() >= 3;
  if (closed && pts.front() == pts.back()) pts.pop_back();
  if (pts.size() < 2) return std::numeric_limits<double>::infinity();
  return integral_frechet(Polyline(pts, closed), anchor).distance;
}

double OctolinearityStats::fraction() const {
  return octo_segments == 0 ? 1.0
                            : static_cast<double>(aligned) / static_cast<double>(octo_segments);
}

double OctolinearityStats::interface_share() const {
  return total_segments == 0 ? 0.0
                             : static_cast<double>(interface_segments) /
                                   static_cast<double>(total_segments);
}

OctolinearityStats octolinearity(const GridLayout& layout, double tolerance) {
  OctolinearityStats st;
  for (const auto& s : layout.segments) {
    ++st.total_segments;
    if (s.shape_edge) continue;
    if (s.at_shape_sink) {
      ++st.interface_segments;
      continue;
    }
    ++st.octo_segments;
    double a = angle_of(s.seg.b - s.seg.a);
    double q = a / (kPi / 4);
    if (std::fabs(q - std::round(q)) * (kPi / 4) <= tolerance) ++st.aligned;
  }
  return st;
}

// _____________________________________________________________________________
void run_pipeline(const TransitNetwork& net, const GuideShape& shape,
                  const PipelineConfig& cfg, PipelineResult& out) {
  auto start = Clock::now();
  RunReport& rep = out.report;
  rep = RunReport{};
  out.input = net;
  out.smooth.reset();
  out.mixed.reset();
  out.grid.reset();

  timed(Stage::Normalize, rep.seconds.normalize, [&] {
    out.normalized = normalize(net);
    rep.stations = out.normalized.stations().size();
    rep.connections = out.normalized.connections().size();
  });

  timed(Stage::Route, rep.seconds.route, [&] {
    double threshold = cfg.dummy_factor * out.normalized.average_connection_length();
    out.matching = threshold > 0.0 ? insert_dummy_edges(out.normalized, threshold)
                                   : out.normalized;
    out.route = cfg.manual_route.empty()
                    ? match_route(out.matching, shape, cfg.route)
                    : manual_route(out.matching, shape, cfg.manual_route);
    out.placed = place_shape(shape, out.matching, out.route);
    rep.route_stations = out.route.stations.size();
    rep.route_score = out.route.score;
  });

  if (cfg.stage >= Stage::Smooth) {
    timed(Stage::Smooth, rep.seconds.smooth, [&] {
      out.smooth = run_smooth(out.normalized, out.placed, cfg.weights, cfg.options);
    });
    rep.smooth_iterations = out.smooth->iteration;
    rep.smooth_energy = out.smooth->energy;
  }
  if (cfg.stage >= Stage::Mixed) {
    timed(Stage::Mixed, rep.seconds.mixed, [&] {
      out.mixed = run_mixed(*out.smooth, out.normalized, out.placed, cfg.weights,
                            cfg.options);
    });
    rep.mixed_iterations = out.mixed->iteration;
    rep.mixed_energy = out.mixed->energy;
  }
  if (cfg.stage >= Stage::Grid) {
    timed(Stage::Grid, rep.seconds.grid, [&] {
      out.grid = align_to_grid(out.normalized, *out.mixed, out.placed, cfg.grid);
    });
  }
  rep.seconds.total = seconds_since(start);

  const LayoutState* last = out.mixed ? &*out.mixed : out.smooth ? &*out.smooth : nullptr;
  std::vector<Point> final = final_positions(out);
  if (last) {
    auto chain = shape_chain(last->shape_stations, final, out.placed);
    rep.shape_stations = chain.size();
    rep.fidelity_input = chain_fidelity(chain, out.normalized.positions(), out.placed);
    rep.fidelity_output = chain_fidelity(chain, final, out.placed);
  }
  if (out.grid) {
    auto st = octolinearity(*out.grid);
    rep.octolinearity = st.fraction();
    rep.shape_interface_share = st.interface_share();
    rep.failed_edges = out.grid->failed;
    rep.crossings = routed_crossings(*out.grid);
  } else {
    rep.crossings = count_crossings(out.normalized, final);
  }
}

PipelineResult run_pipeline(const TransitNetwork& net, const GuideShape& shape,
                            const PipelineConfig& cfg) {
  PipelineResult out;
  run_pipeline(net, shape, cfg, out);
  return out;
}

std::vector<Point> final_positions(const PipelineResult& r) {
  if (r.grid) return r.grid->positions;
  if (r.mixed) return r.mixed->positions;
  if (r.smooth) return r.smooth->positions;
  return r.normalized.positions();
}

std::vector<std::vector<Point>> final_paths(const PipelineResult& r) {
  if (r.grid) return r.grid->paths;
  std::vector<Point> pos = final_positions(r);
  std::vector<std::vector<Point>> out;
  for (std::size_t c = 0; c < r.normalized.connections().size(); ++c) {
    out.push_back({pos[r.normalized.from_index(c)], pos[r.normalized.to_index(c)]});
  }
  return out;
}

}  // namespace shapemap
