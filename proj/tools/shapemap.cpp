// Command line driver: run the layout pipeline, generate synthetic inputs.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "shapemap/io.hpp"
#include "shapemap/pipeline.hpp"
#include "shapemap/svg.hpp"
#include "shapemap/synthetic.hpp"

using namespace shapemap;

namespace {

constexpr int kOk = 0;
constexpr int kStageError = 1;
constexpr int kInputError = 2;

struct RunArgs {
  std::string network;
  std::string shape;
  std::string route;
  std::string stage = "grid";
  std::string svg;
  std::string layout;
  std::string report;
  std::string emit_stages;
  std::vector<double> window;
  bool no_shape = false;
};

void write_artifacts(const PipelineResult& r, const RunArgs& a, Stage reached) {
  if (!a.emit_stages.empty()) {
    std::filesystem::create_directories(a.emit_stages);
    auto path = [&](const std::string& name) {
      return (std::filesystem::path(a.emit_stages) / name).string();
    };
    if (reached > Stage::Normalize) {
      write_file(path("normalized.network"), emit_network(r.normalized));
      write_file(path("geographic.layout"),
                 emit_layout(make_layout("geographic", r.normalized,
                                         r.normalized.positions())));
    }
    if (reached > Stage::Route) {
      write_file(path("route.route"), emit_route(r.route.stations));
      write_file(path("placed.shape"), emit_shape(r.placed));
    }
    if (r.smooth) {
      write_file(path("smooth.layout"),
                 emit_layout(make_layout("smooth", r.normalized, r.smooth->positions)));
    }
    if (r.mixed) {
      write_file(path("mixed.layout"),
                 emit_layout(make_layout("mixed", r.normalized, r.mixed->positions)));
    }
    if (r.grid) {
      write_file(path("grid.layout"), emit_layout(make_layout(
                                          "grid", r.normalized, r.grid->positions,
                                          r.grid->paths)));
    }
  }
}

int run(const RunArgs& a, PipelineConfig cfg) {
  TransitNetwork net;
  GuideShape shape;
  try {
    net = parse_network(read_file(a.network));
    shape = parse_shape(read_file(a.shape));
    if (!a.route.empty()) cfg.manual_route = parse_route(read_file(a.route));
    cfg.stage = parse_stage(a.stage);
    if (!a.window.empty()) {
      BBox w = BBox::of({{a.window[0], a.window[1]}, {a.window[2], a.window[3]}});
      cfg.route.window = w;
    }
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  }

  PipelineResult result;
  try {
    run_pipeline(net, shape, cfg, result);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    try {
      write_artifacts(result, a, e.stage());
    } catch (const std::exception& w) {
      std::cerr << "error: " << w.what() << '\n';
    }
    return kStageError;
  }

  try {
    write_artifacts(result, a, Stage::Grid);
    std::string stage = stage_name(cfg.stage);
    if (!a.layout.empty()) {
      write_file(a.layout, emit_layout(make_layout(stage, result.normalized,
                                                   final_positions(result),
                                                   final_paths(result))));
    }
    if (!a.svg.empty()) {
      std::vector<char> routed;
      if (result.grid) routed = result.grid->connection_routed;
      SvgOptions opt;
      opt.draw_shape = !a.no_shape;
      write_file(a.svg, emit_svg(result.normalized, final_positions(result),
                                 final_paths(result), routed, &result.placed, opt));
    }
    std::string report = format_report(result.report, stage);
    if (a.report.empty()) {
      std::cout << report;
    } else {
      write_file(a.report, report);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lays out a transit network around a guide shape."};
  app.require_subcommand(1);

  RunArgs args;
  PipelineConfig cfg;
  auto* run_cmd = app.add_subcommand("run", "run the layout pipeline");
  run_cmd->add_option("--network", args.network, "network file")->required();
  run_cmd->add_option("--shape", args.shape, "guide shape file")->required();
  run_cmd->add_option("--route", args.route, "manual route file");
  run_cmd->add_option("--stage", args.stage, "last stage: route, smooth, mixed, grid")
      ->capture_default_str();
  run_cmd->add_option("--w-c", cfg.weights.smooth.w_c, "smooth shape closeness weight")
      ->capture_default_str();
  run_cmd->add_option("--w-l", cfg.weights.smooth.w_l, "smooth edge length weight")
      ->capture_default_str();
  run_cmd->add_option("--w-a", cfg.weights.smooth.w_a, "smooth angle weight")
      ->capture_default_str();
  run_cmd->add_option("--w-p", cfg.weights.smooth.w_p, "smooth position weight")
      ->capture_default_str();
  run_cmd->add_option("--w-o", cfg.weights.mixed.w_o, "mixed octolinearity weight")
      ->capture_default_str();
  run_cmd->add_option("--w-p-mixed", cfg.weights.mixed.w_p, "mixed position weight")
      ->capture_default_str();
  run_cmd->add_option("--w-c-mixed", cfg.weights.mixed.w_c, "mixed shape closeness weight")
      ->capture_default_str();
  run_cmd->add_option("--length", cfg.weights.L, "target edge length (0: average)")
      ->capture_default_str();
  run_cmd->add_option("--max-iter-smooth", cfg.options.max_iter_smooth)->capture_default_str();
  run_cmd->add_option("--max-iter-mixed", cfg.options.max_iter_mixed)->capture_default_str();
  run_cmd->add_option("--tol", cfg.options.tol, "relative energy change to stop")
      ->capture_default_str();
  run_cmd->add_option("--grid-factor", cfg.grid.f_d, "cell size factor (0: by size)")
      ->capture_default_str();
  run_cmd->add_option("--cell", cfg.grid.cell, "absolute cell size (0: derived)")
      ->capture_default_str();
  run_cmd->add_option("--c-hop", cfg.grid.c_hop, "grid hop cost")->capture_default_str();
  run_cmd->add_option("--dummy-factor", cfg.dummy_factor,
                      "dummy edge threshold / average connection length")
      ->capture_default_str();
  run_cmd->add_option("--samples", cfg.route.samples, "Frechet samples per curve")
      ->capture_default_str();
  run_cmd->add_option("--window", args.window, "start stations window: x0 y0 x1 y1")
      ->expected(4);
  run_cmd->add_option("--svg", args.svg, "write the final drawing");
  run_cmd->add_option("--layout", args.layout, "write the final layout");
  run_cmd->add_option("--report", args.report, "write the report (default stdout)");
  run_cmd->add_option("--emit-stages", args.emit_stages, "directory for stage outputs");
  run_cmd->add_flag("--no-shape", args.no_shape, "omit the guide shape from the SVG");

  std::string kind = "metro", name = "heart", out;
  int stations = 100;
  std::uint64_t seed = 1;
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic network");
  gen_cmd->add_option("--kind", kind, "grid, ring, tree or metro")->capture_default_str();
  gen_cmd->add_option("--stations", stations)->capture_default_str();
  gen_cmd->add_option("--seed", seed)->capture_default_str();
  gen_cmd->add_option("-o,--output", out, "output file (default stdout)");

  auto* shape_cmd = app.add_subcommand("shape", "write a built-in guide shape");
  shape_cmd->add_option("--name", name, "heart, flower, eye, circle, square, stadium")
      ->capture_default_str();
  shape_cmd->add_option("-o,--output", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  if (*run_cmd) return run(args, cfg);

  try {
    std::string text = *gen_cmd
                           ? emit_network(synthetic::network_by_kind(kind, stations, seed))
                           : emit_shape(synthetic::shape_by_name(name));
    if (out.empty()) {
      std::cout << text;
    } else {
      write_file(out, text);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
