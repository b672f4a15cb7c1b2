#pragma once

// Run configuration, the versioned JSON trace document, and the CSV
// emitters. Emission is deterministic: identical inputs produce identical
// bytes. JSON numbers use the shortest representation that parses back to
// the same double; CSV numbers are printed with 17 significant digits.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "tunnel/analysis.hpp"

namespace tunnel {

using Json = nlohmann::ordered_json;

inline constexpr int kTraceSchemaVersion = 1;

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Run configuration (mirrors the CLI flags one to one)

struct RunConfig {
  std::string transform;
  std::optional<double> ratio;
  std::vector<double> ratio_schedule;
  std::optional<double> angle_deg;        // "angle" in config files, degrees
  std::optional<std::string> point;       // named center or "x,y"
  std::optional<std::string> point_mode;  // "fixed" | "recomputed"
  std::optional<int> skip;
  std::vector<Point> figure;
  std::optional<int> steps;
  std::optional<double> collapse_tol;
  std::optional<double> blowup;
  std::optional<int> cycle_window;
  std::optional<double> cycle_tol;
  std::optional<double> angle_tol;
  std::optional<double> degeneracy_tol;
  std::optional<bool> allow_outside;
  std::optional<std::string> out, csv, svg;
};

struct CompiledRun {
  Figure figure;
  TransformSpec spec;
  StopCriteria stop;
  std::optional<bool> allow_outside;
};

namespace detail {

inline double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty() || !std::isfinite(v))
    fail(Errc::invalid_spec, std::string("cannot parse ") + what + " from '" + s + "'");
  return v;
}

inline PointSpec parse_point_spec(const std::string& text,
                                  const std::optional<std::string>& mode) {
  PointSpec ps;
  if (text == "centroid") ps.kind = PointSpec::Kind::centroid;
  else if (text == "incenter") ps.kind = PointSpec::Kind::incenter;
  else if (text == "circumcenter") ps.kind = PointSpec::Kind::circumcenter;
  else if (text == "orthocenter") ps.kind = PointSpec::Kind::orthocenter;
  else if (text == "symmedian") ps.kind = PointSpec::Kind::symmedian_point;
  else if (text == "gergonne") ps.kind = PointSpec::Kind::gergonne_point;
  else {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
      fail(Errc::invalid_spec, "point must be a named center or 'x,y', got '" + text + "'");
    ps.kind = PointSpec::Kind::custom;
    ps.at = {parse_double(text.substr(0, comma), "point x"),
             parse_double(text.substr(comma + 1), "point y")};
  }
  if (mode) {
    if (*mode == "fixed") ps.mode = PointSpec::Mode::fixed_in_plane;
    else if (*mode == "recomputed") ps.mode = PointSpec::Mode::recomputed_each_step;
    else fail(Errc::invalid_spec, "point mode must be 'fixed' or 'recomputed'");
  }
  return ps;
}

}  // namespace detail

// Parses "x1,y1 x2,y2 ..." as used by the --figure flag.
inline std::vector<Point> parse_figure_string(const std::string& text) {
  std::vector<Point> pts;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string::npos) end = text.size();
    const std::string pair = text.substr(pos, end - pos);
    const auto comma = pair.find(',');
    if (comma == std::string::npos)
      fail(Errc::invalid_spec, "figure vertices must be 'x,y' pairs, got '" + pair + "'");
    pts.push_back({detail::parse_double(pair.substr(0, comma), "vertex x"),
                   detail::parse_double(pair.substr(comma + 1), "vertex y")});
    pos = end;
  }
  return pts;
}

inline CompiledRun compile(const RunConfig& cfg) {
  const TransformInfo* info = find_transform(cfg.transform);
  if (!info) fail(Errc::invalid_spec, "unknown transform '" + cfg.transform + "'");

  TransformSpec spec;
  spec.kind = info->kind;
  spec.ratio = cfg.ratio;
  spec.ratio_schedule = cfg.ratio_schedule;
  if (cfg.angle_deg) spec.angle = *cfg.angle_deg * kPi / 180.0;
  if (cfg.point) spec.point = detail::parse_point_spec(*cfg.point, cfg.point_mode);
  else if (cfg.point_mode) fail(Errc::invalid_spec, "point mode given without a point");
  spec.skip = cfg.skip;

  StopCriteria stop;
  if (cfg.steps) stop.max_steps = *cfg.steps;
  if (cfg.collapse_tol) stop.collapse_tol = *cfg.collapse_tol;
  if (cfg.blowup) stop.blowup_factor = *cfg.blowup;
  if (cfg.cycle_window) stop.cycle_window = *cfg.cycle_window;
  if (cfg.cycle_tol) stop.cycle_tol = *cfg.cycle_tol;
  if (cfg.angle_tol) stop.angle_tol = *cfg.angle_tol;
  if (cfg.degeneracy_tol) stop.degeneracy_tol = *cfg.degeneracy_tol;

  if (cfg.figure.size() < 3) fail(Errc::invalid_spec, "figure needs at least 3 vertices");
  validate_spec(spec);
  CompiledRun out{Figure{Polygon(cfg.figure, stop.degeneracy_tol)}, spec, stop,
                  cfg.allow_outside};
  if (!info->polygon_kind) out.figure = to_triangle(out.figure, stop.degeneracy_tol);
  return out;
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace detail {

inline Json point_json(Point p) { return Json::array({p.x, p.y}); }

inline Point point_from_json(const Json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline Json vertices_json(const Figure& f) {
  Json arr = Json::array();
  for (const Point& p : figure_vertices(f)) arr.push_back(point_json(p));
  return arr;
}

inline Figure figure_from_json(const Json& j, bool triangle, double degeneracy_tol) {
  std::vector<Point> pts;
  for (const Json& v : j) pts.push_back(point_from_json(v));
  if (triangle && pts.size() == 3)
    return Triangle(pts[0], pts[1], pts[2], degeneracy_tol);
  return Polygon(std::move(pts), degeneracy_tol);
}

inline Errc errc_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Errc::io_failure); ++i)
    if (name == errc_name(static_cast<Errc>(i))) return static_cast<Errc>(i);
  fail(Errc::invalid_spec, "unknown error name '" + name + "'");
}

}  // namespace detail

inline Json run_config_to_json(const RunConfig& cfg) {
  Json j = Json::object();
  j["transform"] = cfg.transform;
  if (cfg.ratio) j["ratio"] = *cfg.ratio;
  if (!cfg.ratio_schedule.empty()) j["ratio_schedule"] = cfg.ratio_schedule;
  if (cfg.angle_deg) j["angle"] = *cfg.angle_deg;
  if (cfg.point) j["point"] = *cfg.point;
  if (cfg.point_mode) j["point_mode"] = *cfg.point_mode;
  if (cfg.skip) j["skip"] = *cfg.skip;
  Json fig = Json::array();
  for (const Point& p : cfg.figure) fig.push_back(detail::point_json(p));
  j["figure"] = fig;
  if (cfg.steps) j["steps"] = *cfg.steps;
  if (cfg.collapse_tol) j["collapse_tol"] = *cfg.collapse_tol;
  if (cfg.blowup) j["blowup"] = *cfg.blowup;
  if (cfg.cycle_window) j["cycle_window"] = *cfg.cycle_window;
  if (cfg.cycle_tol) j["cycle_tol"] = *cfg.cycle_tol;
  if (cfg.angle_tol) j["angle_tol"] = *cfg.angle_tol;
  if (cfg.degeneracy_tol) j["degeneracy_tol"] = *cfg.degeneracy_tol;
  if (cfg.allow_outside) j["allow_outside"] = *cfg.allow_outside;
  if (cfg.out) j["out"] = *cfg.out;
  if (cfg.csv) j["csv"] = *cfg.csv;
  if (cfg.svg) j["svg"] = *cfg.svg;
  return j;
}

inline RunConfig parse_run_config(const Json& j) {
  RunConfig cfg;
  if (!j.is_object()) fail(Errc::invalid_spec, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "transform") cfg.transform = value.get<std::string>();
    else if (key == "ratio") cfg.ratio = value.get<double>();
    else if (key == "ratio_schedule") cfg.ratio_schedule = value.get<std::vector<double>>();
    else if (key == "angle") cfg.angle_deg = value.get<double>();
    else if (key == "point") cfg.point = value.get<std::string>();
    else if (key == "point_mode") cfg.point_mode = value.get<std::string>();
    else if (key == "skip") cfg.skip = value.get<int>();
    else if (key == "figure") {
      for (const Json& v : value) cfg.figure.push_back(detail::point_from_json(v));
    } else if (key == "steps") cfg.steps = value.get<int>();
    else if (key == "collapse_tol") cfg.collapse_tol = value.get<double>();
    else if (key == "blowup") cfg.blowup = value.get<double>();
    else if (key == "cycle_window") cfg.cycle_window = value.get<int>();
    else if (key == "cycle_tol") cfg.cycle_tol = value.get<double>();
    else if (key == "angle_tol") cfg.angle_tol = value.get<double>();
    else if (key == "degeneracy_tol") cfg.degeneracy_tol = value.get<double>();
    else if (key == "allow_outside") cfg.allow_outside = value.get<bool>();
    else if (key == "out") cfg.out = value.get<std::string>();
    else if (key == "csv") cfg.csv = value.get<std::string>();
    else if (key == "svg") cfg.svg = value.get<std::string>();
    else fail(Errc::invalid_spec, "unknown config key '" + key + "'");
  }
  if (cfg.transform.empty()) fail(Errc::invalid_spec, "config is missing 'transform'");
  return cfg;
}

// ---------------------------------------------------------------------------
// Trace document

inline Json termination_json(const Termination& t) {
  Json j = Json::object();
  j["kind"] = termination_name(t.kind);
  if (t.limit_point) j["limit_point"] = detail::point_json(*t.limit_point);
  if (t.error) j["error"] = errc_name(*t.error);
  j["at_step"] = t.at_step;
  return j;
}

inline Json classification_json(const Classification& c) {
  Json j = Json::object();
  j["kind"] = classification_name(c.kind);
  if (c.limit) j["limit"] = detail::point_json(*c.limit);
  if (c.kind == Classification::Kind::converges_to_point ||
      c.kind == Classification::Kind::diverges)
    j["rate"] = c.rate;
  if (!c.shape.empty()) j["shape"] = c.shape;
  if (c.period > 0) j["period"] = c.period;
  j["residual"] = c.residual;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline Json locus_json(const LocusReport& l) {
  Json j = Json::object();
  j["kind"] = locus_name(l.kind);
  switch (l.kind) {
    case LocusReport::Kind::single_point: j["point"] = detail::point_json(l.point); break;
    case LocusReport::Kind::line: j["line"] = Json::array({l.line.a, l.line.b, l.line.c}); break;
    case LocusReport::Kind::circle:
      j["circle"] = Json{{"center", detail::point_json(l.circle.center)},
                         {"radius", l.circle.radius}};
      break;
    case LocusReport::Kind::irregular: break;
  }
  j["residual"] = l.residual;
  j["point_count"] = l.point_count;
  return j;
}

inline Json trace_document(const TunnelTrace& trace, const LocusReport& locus,
                           const RunConfig& config) {
  Json doc = Json::object();
  doc["schema_version"] = kTraceSchemaVersion;
  doc["config"] = run_config_to_json(config);
  doc["initial"] = Json{{"kind", std::holds_alternative<Triangle>(trace.initial)
                                     ? "triangle"
                                     : "polygon"},
                        {"vertices", detail::vertices_json(trace.initial)}};
  Json steps = Json::array();
  for (const TunnelStep& s : trace.steps) {
    Json js = Json::object();
    js["n"] = s.n;
    js["vertices"] = detail::vertices_json(s.figure);
    js["area"] = s.area;
    js["perimeter"] = s.perimeter;
    js["alpha"] = s.area_ratio;
    js["beta"] = s.perimeter_ratio;
    js["center"] = detail::point_json(s.center);
    js["shape"] = s.shape;
    js["min_angle"] = s.min_angle;
    js["outside"] = s.outside_flags;
    steps.push_back(std::move(js));
  }
  doc["steps"] = std::move(steps);
  doc["termination"] = termination_json(trace.termination);
  doc["classification"] = classification_json(trace.classification);
  doc["center_locus"] = locus_json(locus);
  return doc;
}

inline std::string emit_trace(const TunnelTrace& trace, const LocusReport& locus,
                              const RunConfig& config) {
  return trace_document(trace, locus, config).dump(2) + "\n";
}

struct ParsedTrace {
  int schema_version = 0;
  RunConfig config;
  TunnelTrace trace;
  LocusReport locus;
};

inline ParsedTrace parse_trace(const std::string& bytes) {
  const Json doc = Json::parse(bytes);
  ParsedTrace out;
  out.schema_version = doc.at("schema_version").get<int>();
  if (out.schema_version != kTraceSchemaVersion)
    fail(Errc::invalid_spec, "unsupported trace schema version");
  out.config = parse_run_config(doc.at("config"));
  const double tol = out.config.degeneracy_tol.value_or(kDegeneracyTol);

  const Json& init = doc.at("initial");
  const bool triangle = init.at("kind").get<std::string>() == "triangle";
  out.trace.initial = detail::figure_from_json(init.at("vertices"), triangle, tol);
  out.trace.allow_outside = out.config.allow_outside;

  const TransformInfo* info = find_transform(out.config.transform);
  if (!info) fail(Errc::invalid_spec, "unknown transform in trace config");
  for (const Json& js : doc.at("steps")) {
    TunnelStep s;
    s.n = js.at("n").get<int>();
    s.figure = detail::figure_from_json(js.at("vertices"), !info->polygon_kind, tol);
    s.area = js.at("area").get<double>();
    s.perimeter = js.at("perimeter").get<double>();
    s.area_ratio = js.at("alpha").get<double>();
    s.perimeter_ratio = js.at("beta").get<double>();
    s.center = detail::point_from_json(js.at("center"));
    s.shape = js.at("shape").get<std::vector<double>>();
    s.min_angle = js.at("min_angle").get<double>();
    s.outside_flags = js.at("outside").get<std::vector<int>>();
    out.trace.steps.push_back(std::move(s));
  }

  const Json& jt = doc.at("termination");
  const std::string tkind = jt.at("kind").get<std::string>();
  if (tkind == "collapsed") out.trace.termination.kind = Termination::Kind::collapsed;
  else if (tkind == "blew_up") out.trace.termination.kind = Termination::Kind::blew_up;
  else if (tkind == "degenerate") out.trace.termination.kind = Termination::Kind::degenerate;
  else if (tkind == "budget_exhausted")
    out.trace.termination.kind = Termination::Kind::budget_exhausted;
  else fail(Errc::invalid_spec, "unknown termination kind '" + tkind + "'");
  if (jt.contains("limit_point"))
    out.trace.termination.limit_point = detail::point_from_json(jt.at("limit_point"));
  if (jt.contains("error"))
    out.trace.termination.error = detail::errc_from_name(jt.at("error").get<std::string>());
  out.trace.termination.at_step = jt.at("at_step").get<int>();

  const Json& jc = doc.at("classification");
  const std::string ckind = jc.at("kind").get<std::string>();
  Classification& c = out.trace.classification;
  if (ckind == "converges_to_point") c.kind = Classification::Kind::converges_to_point;
  else if (ckind == "diverges") c.kind = Classification::Kind::diverges;
  else if (ckind == "fixed_shape") c.kind = Classification::Kind::fixed_shape;
  else if (ckind == "periodic_shape") c.kind = Classification::Kind::periodic_shape;
  else if (ckind == "irregular") c.kind = Classification::Kind::irregular;
  else fail(Errc::invalid_spec, "unknown classification kind '" + ckind + "'");
  if (jc.contains("limit")) c.limit = detail::point_from_json(jc.at("limit"));
  if (jc.contains("rate")) c.rate = jc.at("rate").get<double>();
  if (jc.contains("shape")) c.shape = jc.at("shape").get<std::vector<double>>();
  if (jc.contains("period")) c.period = jc.at("period").get<int>();
  c.residual = jc.at("residual").get<double>();
  if (jc.contains("note")) c.note = jc.at("note").get<std::string>();

  const Json& jl = doc.at("center_locus");
  const std::string lkind = jl.at("kind").get<std::string>();
  if (lkind == "single_point") {
    out.locus.kind = LocusReport::Kind::single_point;
    out.locus.point = detail::point_from_json(jl.at("point"));
  } else if (lkind == "line") {
    out.locus.kind = LocusReport::Kind::line;
    const Json& la = jl.at("line");
    out.locus.line = {la.at(0).get<double>(), la.at(1).get<double>(), la.at(2).get<double>()};
  } else if (lkind == "circle") {
    out.locus.kind = LocusReport::Kind::circle;
    out.locus.circle = {detail::point_from_json(jl.at("circle").at("center")),
                        jl.at("circle").at("radius").get<double>()};
  } else if (lkind == "irregular") {
    out.locus.kind = LocusReport::Kind::irregular;
  } else {
    fail(Errc::invalid_spec, "unknown locus kind '" + lkind + "'");
  }
  out.locus.residual = jl.at("residual").get<double>();
  out.locus.point_count = jl.at("point_count").get<int>();

  // The spec echoed in the document is what the engine resolved; rebuild it
  // so parsed traces can be re-run or re-classified.
  RunConfig spec_cfg = out.config;
  spec_cfg.figure = figure_vertices(out.trace.initial);
  out.trace.spec = compile(spec_cfg).spec;
  return out;
}

// ---------------------------------------------------------------------------
// CSV emitters

inline std::string emit_csv(const TunnelTrace& trace) {
  std::string out =
      "n,area,perimeter,alpha_n,beta_n,center_x,center_y,angle1,angle2,angle3,min_angle,"
      "outside_flags\n";
  for (const TunnelStep& s : trace.steps) {
    out += std::to_string(s.n);
    out += ',' + fmt17(s.area) + ',' + fmt17(s.perimeter);
    out += ',' + fmt17(s.area_ratio) + ',' + fmt17(s.perimeter_ratio);
    out += ',' + fmt17(s.center.x) + ',' + fmt17(s.center.y);
    if (s.shape.size() == 3 && std::holds_alternative<Triangle>(s.figure)) {
      out += ',' + fmt17(s.shape[0]) + ',' + fmt17(s.shape[1]) + ',' + fmt17(s.shape[2]);
    } else {
      out += ",,,";  // angle columns apply to triangles only
    }
    out += ',' + fmt17(s.min_angle);
    out += ',';
    for (std::size_t i = 0; i < s.outside_flags.size(); ++i) {
      if (i) out += ';';
      out += std::to_string(s.outside_flags[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string emit_sweep_csv(const SweepReport& report) {
  std::string out =
      "angle_a_deg,angle_b_deg,angle_c_deg,param,classification,rate,period,steps,termination,"
      "error,final_alpha,final_beta\n";
  auto opt17 = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
  for (const SweepCell& c : report.cells) {
    out += opt17(c.angle_a_deg) + ',' + opt17(c.angle_b_deg) + ',' + opt17(c.angle_c_deg);
    out += ',' + opt17(c.param);
    out += ',' + std::string(classification_name(c.classification));
    out += ',' + fmt17(c.rate);
    out += ',' + std::to_string(c.period);
    out += ',' + std::to_string(c.steps);
    out += ',' + std::string(termination_name(c.termination));
    out += ',' + std::string(c.error ? errc_name(*c.error) : "");
    out += ',' + opt17(c.final_alpha) + ',' + opt17(c.final_beta);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// File output
//
// Relative output paths may be redirected with the TUNNEL_OUT_DIR
// environment variable; when unset, they resolve against the current
// directory.

inline std::filesystem::path resolve_output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("TUNNEL_OUT_DIR")) p = std::filesystem::path(dir) / p;
  }
  return p;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  const std::filesystem::path p = resolve_output_path(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(Errc::io_failure, "cannot open '" + p.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  f.flush();
  if (!f) fail(Errc::io_failure, "failed writing '" + p.string() + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::io_failure, "cannot open '" + path + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace tunnel
