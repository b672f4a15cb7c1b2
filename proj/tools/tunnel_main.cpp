// Command-line front end: `tunnel catalog`, `tunnel run`, `tunnel sweep`.
//
// Exit codes: 0 on success (a tunnel that ends in a degeneracy is a valid
// finding, not a failure), 2 on invalid configuration, 3 on I/O failure.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "tunnel/tunnel.hpp"

using namespace tunnel;

namespace {

int cmd_catalog() {
  for (const TransformInfo& info : kCatalog) {
    std::string params;
    if (info.needs_ratio) params += "ratio";
    if (info.needs_angle) params += (params.empty() ? "" : ",") + std::string("angle");
    if (info.needs_point) params += (params.empty() ? "" : ",") + std::string("point[,point-mode]");
    if (info.accepts_skip) params += (params.empty() ? "" : ",") + std::string("[skip]");
    if (params.empty()) params = "-";
    std::printf("%-24s params: %-22s center: %s\n", info.name, params.c_str(), info.center);
  }
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  const CompiledRun compiled = compile(cfg);
  const TunnelTrace trace = run(compiled.figure, compiled.spec, compiled.stop,
                                compiled.allow_outside);

  std::vector<Point> centers;
  centers.reserve(trace.steps.size());
  for (const TunnelStep& s : trace.steps) centers.push_back(s.center);
  LocusReport locus;
  if (!centers.empty())
    locus = classify_locus(centers, figure_diameter(trace.initial));

  if (cfg.out) write_file(*cfg.out, emit_trace(trace, locus, cfg));
  if (cfg.csv) write_file(*cfg.csv, emit_csv(trace));
  if (cfg.svg) write_file(*cfg.svg, render_svg(trace));

  std::string line = std::string("termination: ") + termination_name(trace.termination.kind);
  if (trace.termination.error)
    line += std::string(" (") + errc_name(*trace.termination.error) + " at step " +
            std::to_string(trace.termination.at_step) + ")";
  line += std::string("; steps: ") + std::to_string(trace.steps.size());
  line += std::string("; classification: ") +
          classification_name(trace.classification.kind);
  if (trace.classification.kind == Classification::Kind::converges_to_point &&
      trace.classification.limit)
    line += " at (" + fmt17(trace.classification.limit->x) + ", " +
            fmt17(trace.classification.limit->y) + ") rate " +
            fmt17(trace.classification.rate);
  if (trace.classification.kind == Classification::Kind::diverges)
    line += " rate " + fmt17(trace.classification.rate);
  line += std::string("; center locus: ") + locus_name(locus.kind);
  std::puts(line.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iterated triangle/polygon transform laboratory"};
  app.require_subcommand(1);

  app.add_subcommand("catalog", "list transforms, their parameters and centers");

  auto* run_cmd = app.add_subcommand("run", "iterate one transform and write reports");
  std::string transform, point, point_mode, figure, config_path, ratio_schedule;
  std::string out_path, csv_path, svg_path;
  double ratio = 0, angle_deg = 0, collapse_tol = 0, blowup = 0;
  int skip = 0, steps = 0;
  bool allow_outside = false;
  auto* t_opt = run_cmd->add_option("--transform", transform, "transform name (see `catalog`)");
  auto* r_opt = run_cmd->add_option("--ratio", ratio, "nedian ratio r > 0");
  auto* rs_opt = run_cmd->add_option("--ratio-schedule", ratio_schedule,
                                     "comma-separated per-level ratios");
  auto* a_opt = run_cmd->add_option("--angle", angle_deg, "nedian angle in degrees");
  auto* p_opt = run_cmd->add_option(
      "--point", point, "centroid|incenter|circumcenter|orthocenter|symmedian|gergonne|x,y");
  auto* pm_opt = run_cmd->add_option("--point-mode", point_mode, "fixed|recomputed");
  auto* k_opt = run_cmd->add_option("--skip", skip, "polygon side offset k >= 1");
  auto* f_opt = run_cmd->add_option("--figure", figure, "vertices as \"x1,y1 x2,y2 ...\"");
  auto* c_opt = run_cmd->add_option("--config", config_path,
                                    "JSON run configuration (exclusive with inline flags)");
  auto* n_opt = run_cmd->add_option("--steps", steps, "step budget");
  auto* ct_opt = run_cmd->add_option("--collapse-tol", collapse_tol,
                                     "relative diameter considered collapsed");
  auto* b_opt = run_cmd->add_option("--blowup", blowup, "relative diameter considered divergent");
  auto* ao_flag = run_cmd->add_flag("--allow-outside", allow_outside,
                                    "permit feet outside their side segments");
  auto* o_opt = run_cmd->add_option("--out", out_path, "trace JSON output path");
  auto* csv_opt = run_cmd->add_option("--csv", csv_path, "per-step CSV output path");
  auto* svg_opt = run_cmd->add_option("--svg", svg_path, "SVG rendering output path");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a grid of tunnels and write a CSV");
  std::string sw_transform, sw_point, sw_point_mode, sw_figure, sw_out, sw_param, sw_region = "all";
  double sw_ratio = 0, sw_angle = 0, sw_grid_step = 1.0, sw_from = 0, sw_to = 0;
  int sw_count = 0, sw_steps = 0, sw_jobs = 1, sw_skip = 0;
  bool sw_allow_outside = false;
  sweep_cmd->add_option("--transform", sw_transform, "transform name")->required();
  auto* swr_opt = sweep_cmd->add_option("--ratio", sw_ratio, "nedian ratio r > 0");
  auto* swa_opt = sweep_cmd->add_option("--angle", sw_angle, "nedian angle in degrees");
  auto* swp_opt = sweep_cmd->add_option("--point", sw_point, "point for point transforms");
  auto* swpm_opt = sweep_cmd->add_option("--point-mode", sw_point_mode, "fixed|recomputed");
  auto* swk_opt = sweep_cmd->add_option("--skip", sw_skip, "polygon side offset");
  sweep_cmd->add_option("--grid-step", sw_grid_step, "shape grid step, degrees");
  sweep_cmd->add_option("--region", sw_region, "acute|all (shape grid region)");
  auto* swf_opt = sweep_cmd->add_option("--figure", sw_figure,
                                        "fixed initial figure (instead of a shape grid)");
  auto* swpar_opt = sweep_cmd->add_option("--param", sw_param, "swept parameter: ratio|angle");
  auto* swfrom_opt = sweep_cmd->add_option("--from", sw_from, "parameter range start");
  auto* swto_opt = sweep_cmd->add_option("--to", sw_to, "parameter range end");
  auto* swcount_opt = sweep_cmd->add_option("--count", sw_count, "parameter sample count");
  auto* swn_opt = sweep_cmd->add_option("--steps", sw_steps, "step budget per cell");
  sweep_cmd->add_flag("--allow-outside", sw_allow_outside,
                      "permit feet outside their side segments");
  sweep_cmd->add_option("--jobs", sw_jobs, "worker threads (result is identical for any value)");
  sweep_cmd->add_option("--out", sw_out, "sweep CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("catalog")) return cmd_catalog();

    if (app.got_subcommand("run")) {
      RunConfig cfg;
      const bool inline_flags = *t_opt || *r_opt || *rs_opt || *a_opt || *p_opt || *pm_opt ||
                                *k_opt || *f_opt || *n_opt || *ct_opt || *b_opt || *ao_flag;
      if (*c_opt) {
        if (inline_flags)
          fail(Errc::invalid_spec, "--config is mutually exclusive with inline run flags");
        cfg = parse_run_config(Json::parse(read_file(config_path)));
      } else {
        if (!*t_opt) fail(Errc::invalid_spec, "--transform is required (or use --config)");
        cfg.transform = transform;
        if (*r_opt) cfg.ratio = ratio;
        if (*rs_opt) {
          for (const std::string& part : CLI::detail::split(ratio_schedule, ','))
            cfg.ratio_schedule.push_back(detail::parse_double(part, "ratio schedule entry"));
        }
        if (*a_opt) cfg.angle_deg = angle_deg;
        if (*p_opt) cfg.point = point;
        if (*pm_opt) cfg.point_mode = point_mode;
        if (*k_opt) cfg.skip = skip;
        if (!*f_opt) fail(Errc::invalid_spec, "--figure is required (or use --config)");
        cfg.figure = parse_figure_string(figure);
        if (*n_opt) cfg.steps = steps;
        if (*ct_opt) cfg.collapse_tol = collapse_tol;
        if (*b_opt) cfg.blowup = blowup;
        if (*ao_flag) cfg.allow_outside = allow_outside;
      }
      // output paths are run outputs, not run identity; flags may add them
      // even to a --config run
      if (*o_opt) cfg.out = out_path;
      if (*csv_opt) cfg.csv = csv_path;
      if (*svg_opt) cfg.svg = svg_path;
      return cmd_run(cfg);
    }

    if (app.got_subcommand("sweep")) {
      SweepRequest req;
      const TransformInfo* info = find_transform(sw_transform);
      if (!info) fail(Errc::invalid_spec, "unknown transform '" + sw_transform + "'");
      req.transform.kind = info->kind;
      if (*swr_opt) req.transform.ratio = sw_ratio;
      if (*swa_opt) req.transform.angle = sw_angle * kPi / 180.0;
      if (*swp_opt)
        req.transform.point = detail::parse_point_spec(
            sw_point, *swpm_opt ? std::optional<std::string>(sw_point_mode) : std::nullopt);
      if (*swk_opt) req.transform.skip = sw_skip;
      if (*swf_opt) {
        const auto pts = parse_figure_string(sw_figure);
        if (pts.size() < 3) fail(Errc::invalid_spec, "figure needs at least 3 vertices");
        Figure fig{Polygon(pts)};
        if (!info->polygon_kind) fig = to_triangle(fig);
        req.figure = fig;
      } else {
        if (info->polygon_kind)
          fail(Errc::invalid_spec, "polygon transforms need --figure, not a shape grid");
        ShapeGrid grid;
        grid.step_deg = sw_grid_step;
        if (sw_region == "acute") grid.acute_only = true;
        else if (sw_region == "all") grid.acute_only = false;
        else fail(Errc::invalid_spec, "--region must be acute or all");
        req.grid = grid;
      }
      if (*swpar_opt) {
        ParamRange range;
        if (sw_param == "ratio") range.which = ParamRange::Which::ratio;
        else if (sw_param == "angle") range.which = ParamRange::Which::angle;
        else fail(Errc::invalid_spec, "--param must be ratio or angle");
        if (!*swfrom_opt || !*swto_opt || !*swcount_opt)
          fail(Errc::invalid_spec, "--param needs --from, --to and --count");
        range.from = range.which == ParamRange::Which::angle ? sw_from * kPi / 180.0 : sw_from;
        range.to = range.which == ParamRange::Which::angle ? sw_to * kPi / 180.0 : sw_to;
        range.count = sw_count;
        req.range = range;
        // a swept parameter needs no inline value; give validate_spec one
        if (range.which == ParamRange::Which::ratio && !req.transform.ratio)
          req.transform.ratio = range.from;
        if (range.which == ParamRange::Which::angle && !req.transform.angle)
          req.transform.angle = range.from;
      }
      if (*swn_opt) req.stop.max_steps = sw_steps;
      if (sw_allow_outside) req.allow_outside = true;

      const SweepReport report = sweep(req, sw_jobs);
      write_file(sw_out, emit_sweep_csv(report));
      std::printf("sweep: %zu cells (%s)\n", report.cells.size(), report.grid_desc.c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::io_failure ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
