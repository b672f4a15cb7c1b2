#pragma once

// Iterates one transform from an initial figure, recording per-level
// measurements, and halts on collapse, blow-up, degeneracy or step budget.
// A run is a pure function of (initial, spec, stop): two runs with the same
// inputs produce bit-identical traces.

#include <limits>
#include <string>

#include "tunnel/transforms.hpp"

namespace tunnel {

struct StopCriteria {
  int max_steps = 100;
  double collapse_tol = 1e-9;    // relative diameter below which the tunnel collapsed
  double blowup_factor = 1e9;    // relative diameter above which it diverged
  double angle_tol = kAngleTol;
  double degeneracy_tol = kDegeneracyTol;
  int cycle_window = 24;         // steps examined for shape periodicity
  double cycle_tol = 1e-7;       // shape distance for cycle matching
};

struct TunnelStep {
  int n = 0;                 // level index, 1-based
  Figure figure;
  double area = 0.0;         // absolute area
  double perimeter = 0.0;
  double area_ratio = 0.0;       // area(n) / area(n-1)
  double perimeter_ratio = 0.0;  // perimeter(n) / perimeter(n-1)
  Point center;              // the transform's distinguished center at this level
  std::vector<double> shape;     // sorted angles (triangles) or sorted normalized sides
  double min_angle = 0.0;
  std::vector<int> outside_flags;
};

struct Termination {
  enum class Kind { collapsed, blew_up, degenerate, budget_exhausted };
  Kind kind = Kind::budget_exhausted;
  std::optional<Point> limit_point;  // collapsed
  std::optional<Errc> error;         // degenerate
  int at_step = 0;                   // degenerate
};

inline const char* termination_name(Termination::Kind k) {
  switch (k) {
    case Termination::Kind::collapsed: return "collapsed";
    case Termination::Kind::blew_up: return "blew_up";
    case Termination::Kind::degenerate: return "degenerate";
    case Termination::Kind::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

struct Classification {
  enum class Kind { converges_to_point, diverges, fixed_shape, periodic_shape, irregular };
  Kind kind = Kind::irregular;
  std::optional<Point> limit;     // converges_to_point
  double rate = 0.0;              // geometric rate; in (0,1) converging, > 1 diverging
  std::vector<double> shape;      // fixed_shape
  int period = 0;                 // periodic_shape
  double residual = 0.0;          // fit or match residual backing the verdict
  std::string note;
};

inline const char* classification_name(Classification::Kind k) {
  switch (k) {
    case Classification::Kind::converges_to_point: return "converges_to_point";
    case Classification::Kind::diverges: return "diverges";
    case Classification::Kind::fixed_shape: return "fixed_shape";
    case Classification::Kind::periodic_shape: return "periodic_shape";
    case Classification::Kind::irregular: return "irregular";
  }
  return "?";
}

struct TunnelTrace {
  Figure initial;
  TransformSpec spec;              // with fixed-in-plane points resolved
  std::optional<bool> allow_outside;
  std::vector<TunnelStep> steps;
  Termination termination;
  Classification classification;
};

// ---------------------------------------------------------------------------
// Shape coordinates: similarity- and relabeling-invariant figure signature.

inline std::vector<double> figure_shape(const Figure& f) {
  if (const auto* t = std::get_if<Triangle>(&f)) {
    const auto a = angle_triple(*t);
    return {a[0], a[1], a[2]};
  }
  const Polygon& p = std::get<Polygon>(f);
  const double total = p.perimeter();
  std::vector<double> sides(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    sides[i] = dist(p.v[i], p.v[(i + 1) % p.size()]) / total;
  std::sort(sides.begin(), sides.end());
  return sides;
}

inline double figure_min_angle(const Figure& f) {
  if (const auto* t = std::get_if<Triangle>(&f)) return angle_triple(*t)[0];
  const Polygon& p = std::get<Polygon>(f);
  double best = kPi;
  const std::size_t m = p.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point u = p.v[(i + m - 1) % m] - p.v[i];
    const Point w = p.v[(i + 1) % m] - p.v[i];
    best = std::min(best, std::atan2(std::abs(cross(u, w)), dot(u, w)));
  }
  return best;
}

inline double shape_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
  return best;
}

// Minimal p >= 1 such that the tail of `shapes` repeats with period p within
// tol (at least two comparisons required); 0 when no period is found.
inline int detect_shape_period(const std::vector<std::vector<double>>& shapes, int window,
                               double tol) {
  const int n = static_cast<int>(shapes.size());
  const int w = std::min(window, n);
  if (w < 3) return 0;
  const int start = n - w;
  for (int p = 1; p <= w - 2; ++p) {
    bool ok = true;
    for (int i = start; i + p < n; ++i)
      if (shape_distance(shapes[i], shapes[i + p]) >= tol) {
        ok = false;
        break;
      }
    if (ok) return p;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Geometric-rate fitting: ordinary least squares on log(values).

struct RateFit {
  double rate = 0.0;      // exp(slope)
  double residual = 0.0;  // rms residual in log space
  bool ok = false;
};

inline RateFit fit_geometric_rate(std::span<const double> values, int max_points = 20) {
  std::vector<double> logs;
  const std::size_t take = std::min<std::size_t>(values.size(), static_cast<std::size_t>(max_points));
  for (std::size_t i = values.size() - take; i < values.size(); ++i) {
    if (!(values[i] > 0) || !std::isfinite(values[i])) return {};
    logs.push_back(std::log(values[i]));
  }
  const std::size_t n = logs.size();
  if (n < 2) return {};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += i;
    sy += logs[i];
    sxx += static_cast<double>(i) * i;
    sxy += i * logs[i];
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0)) return {};
  const double slope = (n * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = logs[i] - (icept + slope * i);
    ss += r * r;
  }
  return {std::exp(slope), std::sqrt(ss / n), true};
}

// ---------------------------------------------------------------------------
// Classification

inline Classification classify(const TunnelTrace& trace, const StopCriteria& stop = {}) {
  Classification out;
  if (trace.steps.size() < 3) {
    out.kind = Classification::Kind::irregular;
    out.note = "fewer than 3 steps recorded";
    return out;
  }

  std::vector<double> diameters;
  diameters.push_back(figure_diameter(trace.initial));
  for (const TunnelStep& s : trace.steps) diameters.push_back(figure_diameter(s.figure));

  const RateFit fit = fit_geometric_rate(diameters);
  if (trace.termination.kind == Termination::Kind::collapsed) {
    out.kind = Classification::Kind::converges_to_point;
    out.limit = vertex_centroid(trace.steps.back().figure);
    out.rate = fit.rate;
    out.residual = fit.residual;
    return out;
  }
  if (trace.termination.kind == Termination::Kind::blew_up) {
    out.kind = Classification::Kind::diverges;
    out.rate = fit.rate;
    out.residual = fit.residual;
    return out;
  }
  // A budget-limited or degenerating tunnel may still show a clean geometric
  // diameter trend; classify on the trend before looking at shapes, so a
  // short medial run reports convergence rather than its (also true) fixed
  // shape. A noisy fit falls through.
  if (fit.ok && fit.residual < 1e-2) {
    if (fit.rate < 1.0 - 1e-6) {
      out.kind = Classification::Kind::converges_to_point;
      out.limit = vertex_centroid(trace.steps.back().figure);
      out.rate = fit.rate;
      out.residual = fit.residual;
      return out;
    }
    if (fit.rate > 1.0 + 1e-6) {
      out.kind = Classification::Kind::diverges;
      out.rate = fit.rate;
      out.residual = fit.residual;
      return out;
    }
  }

  std::vector<std::vector<double>> shapes;
  shapes.reserve(trace.steps.size());
  for (const TunnelStep& s : trace.steps) shapes.push_back(s.shape);
  const int period = detect_shape_period(shapes, stop.cycle_window, stop.cycle_tol);
  const int w = std::min<int>(stop.cycle_window, static_cast<int>(shapes.size()));
  double worst = 0.0;
  for (std::size_t i = shapes.size() - w; i + 1 < shapes.size(); ++i)
    worst = std::max(worst, shape_distance(shapes[i], shapes[i + 1]));
  if (period == 1) {
    out.kind = Classification::Kind::fixed_shape;
    out.shape = shapes.back();
    out.residual = worst;
    return out;
  }
  if (period >= 2) {
    out.kind = Classification::Kind::periodic_shape;
    out.period = period;
    out.residual = worst;
    return out;
  }
  out.kind = Classification::Kind::irregular;
  out.residual = worst;
  out.note = "no point limit, fixed shape or short cycle detected";
  return out;
}

// ---------------------------------------------------------------------------
// The engine

namespace detail {

inline void validate_stop(const StopCriteria& s) {
  if (s.max_steps < 1) fail(Errc::invalid_spec, "max_steps must be >= 1");
  if (!(s.collapse_tol > 0) || !(s.blowup_factor > 0) || !(s.angle_tol > 0) ||
      !(s.degeneracy_tol > 0) || !(s.cycle_tol > 0) || s.cycle_window < 1)
    fail(Errc::invalid_spec, "stop criteria must all be positive");
}

inline TransformSpec spec_for_step(const TransformSpec& spec, int n) {
  if (spec.ratio_schedule.empty()) return spec;
  TransformSpec out = spec;
  const std::size_t i = std::min<std::size_t>(n - 1, spec.ratio_schedule.size() - 1);
  out.ratio = spec.ratio_schedule[i];
  return out;
}

}  // namespace detail

inline TunnelTrace run(const Figure& initial, const TransformSpec& spec,
                       const StopCriteria& stop = {}, std::optional<bool> allow_outside = {}) {
  detail::validate_stop(stop);
  validate_spec(spec);
  const TransformInfo& info = transform_info(spec.kind);

  const ApplyOptions opts{stop.degeneracy_tol, stop.angle_tol, allow_outside};

  // Arity is checked up front so a mismatch is a configuration error, not a
  // step-1 finding.
  if (!info.polygon_kind) (void)to_triangle(initial, stop.degeneracy_tol);

  TunnelTrace trace;
  trace.initial = initial;
  trace.spec = resolve_spec(spec, initial);
  trace.allow_outside = allow_outside;

  const double initial_diameter = figure_diameter(initial);
  double prev_area = std::abs(signed_area(initial));
  double prev_perimeter = perimeter(initial);
  Figure parent = initial;
  bool terminated = false;

  for (int n = 1; n <= stop.max_steps; ++n) {
    Applied applied;
    try {
      applied = apply_transform(detail::spec_for_step(trace.spec, n), parent, opts);
    } catch (const Error& e) {
      trace.termination =
          Termination{Termination::Kind::degenerate, std::nullopt, e.code(), n};
      terminated = true;
      break;
    }

    TunnelStep step;
    step.n = n;
    step.figure = applied.figure;
    step.area = std::abs(signed_area(applied.figure));
    step.perimeter = perimeter(applied.figure);
    step.area_ratio = step.area / prev_area;
    step.perimeter_ratio = step.perimeter / prev_perimeter;
    step.center = distinguished_center(trace.spec, parent, applied.figure, applied,
                                       stop.degeneracy_tol);
    step.shape = figure_shape(applied.figure);
    step.min_angle = figure_min_angle(applied.figure);
    step.outside_flags = applied.outside;
    trace.steps.push_back(std::move(step));

    const double d = figure_diameter(applied.figure);
    if (d > stop.blowup_factor * initial_diameter) {
      trace.termination = Termination{Termination::Kind::blew_up, std::nullopt, std::nullopt, n};
      terminated = true;
      break;
    }
    if (d < stop.collapse_tol * initial_diameter) {
      trace.termination = Termination{Termination::Kind::collapsed,
                                      vertex_centroid(applied.figure), std::nullopt, n};
      terminated = true;
      break;
    }

    prev_area = trace.steps.back().area;
    prev_perimeter = trace.steps.back().perimeter;
    parent = trace.steps.back().figure;
  }

  if (!terminated)
    trace.termination = Termination{Termination::Kind::budget_exhausted, std::nullopt,
                                    std::nullopt, stop.max_steps};
  trace.classification = classify(trace, stop);
  return trace;
}

}  // namespace tunnel
