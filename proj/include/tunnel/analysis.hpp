#pragma once

// Turns recorded traces into empirical answers: locus classification for
// center sequences, ratio-sequence summaries, shape-space trajectories, and
// deterministic parameter sweeps over initial shapes.

#include <thread>

#include "tunnel/engine.hpp"

namespace tunnel {

// ---------------------------------------------------------------------------
// Locus classification
//
// Fits are tried in a fixed order, point -> line -> circle, with one shared
// relative-residual threshold. Precedence (not best-fit) keeps the verdict
// deterministic: a coincident cloud is also a perfect line and circle.

struct LocusReport {
  enum class Kind { single_point, line, circle, irregular };
  Kind kind = Kind::irregular;
  Point point{};
  Line line{};
  Circle circle{};
  double residual = 0.0;  // rms distance to the fitted object / cloud diameter
  int point_count = 0;
};

inline const char* locus_name(LocusReport::Kind k) {
  switch (k) {
    case LocusReport::Kind::single_point: return "single_point";
    case LocusReport::Kind::line: return "line";
    case LocusReport::Kind::circle: return "circle";
    case LocusReport::Kind::irregular: return "irregular";
  }
  return "?";
}

namespace detail {

inline double cloud_diameter(std::span<const Point> pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, dist(pts[i], pts[j]));
  return best;
}

struct LineFit {
  Line line{};
  double rms = 0.0;
  bool ok = false;
};

// Total least squares: the line through the centroid whose normal is the
// minor eigenvector of the scatter matrix.
inline LineFit fit_line_tls(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  if (n < 2) return {};
  Point mu{0, 0};
  for (const Point& p : pts) mu = mu + p;
  mu = mu / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (const Point& p : pts) {
    const Point d = p - mu;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  const double tr = sxx + syy;
  const double disc = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) / 4 + sxy * sxy));
  const double lmin = tr / 2 - disc;
  Point normal{sxy, lmin - sxx};
  Point alt{lmin - syy, sxy};
  if (norm2(alt) > norm2(normal)) normal = alt;
  if (!(norm(normal) > 0)) normal = {1, 0};  // isotropic cloud; direction is arbitrary
  normal = normal / norm(normal);
  LineFit fit;
  fit.line = {normal.x, normal.y, -dot(normal, mu)};
  // evaluate the residual geometrically; the eigenvalue loses its low bits
  // to cancellation when the cloud is almost exactly collinear
  double ss = 0;
  for (const Point& p : pts) {
    const double d = line_eval(fit.line, p);
    ss += d * d;
  }
  fit.rms = std::sqrt(ss / n);
  fit.ok = true;
  return fit;
}

struct CircleFit {
  Circle circle{};
  double rms = 0.0;
  bool ok = false;
};

// Kasa algebraic fit on centered/scaled coordinates, then the residual is
// evaluated geometrically. No iterative refinement.
inline CircleFit fit_circle_kasa(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return {};
  Point mu{0, 0};
  for (const Point& p : pts) mu = mu + p;
  mu = mu / static_cast<double>(n);
  double scale = 0.0;
  for (const Point& p : pts) scale = std::max(scale, dist(p, mu));
  if (!(scale > 0)) return {};

  // Normal equations for x^2 + y^2 + D x + E y + F = 0.
  double m[3][4] = {};
  for (const Point& p : pts) {
    const double x = (p.x - mu.x) / scale, y = (p.y - mu.y) / scale;
    const double z = x * x + y * y;
    const double row[3] = {x, y, 1.0};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
      m[i][3] += row[i] * -z;
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-12) return {};  // collinear or repeated points
    if (piv != col)
      for (int j = 0; j < 4; ++j) std::swap(m[piv][j], m[col][j]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
    }
  }
  const double d = m[0][3] / m[0][0], e = m[1][3] / m[1][1], f = m[2][3] / m[2][2];
  const double r2 = d * d / 4 + e * e / 4 - f;
  if (!(r2 > 0)) return {};
  CircleFit fit;
  fit.circle.center = mu + Point{-d / 2, -e / 2} * scale;
  fit.circle.radius = std::sqrt(r2) * scale;
  double ss = 0;
  for (const Point& p : pts) {
    const double dr = dist(p, fit.circle.center) - fit.circle.radius;
    ss += dr * dr;
  }
  fit.rms = std::sqrt(ss / n);
  fit.ok = true;
  return fit;
}

}  // namespace detail

inline LocusReport classify_locus(std::span<const Point> pts, double reference_diameter) {
  if (pts.empty()) fail(Errc::invalid_spec, "locus classification needs at least one point");
  constexpr double kResidualThreshold = 1e-7;
  LocusReport out;
  out.point_count = static_cast<int>(pts.size());

  const double diam = detail::cloud_diameter(pts);
  const Point mean = vertex_centroid(pts);
  if (diam < 1e-9 * reference_diameter) {
    out.kind = LocusReport::Kind::single_point;
    out.point = mean;
    if (diam > 0) {
      double ss = 0;
      for (const Point& p : pts) ss += norm2(p - mean);
      out.residual = std::sqrt(ss / pts.size()) / diam;
    }
    return out;
  }

  double best = std::numeric_limits<double>::infinity();
  const detail::LineFit lf = detail::fit_line_tls(pts);
  if (lf.ok) {
    const double rel = lf.rms / diam;
    if (rel < kResidualThreshold) {
      out.kind = LocusReport::Kind::line;
      out.line = lf.line;
      out.residual = rel;
      return out;
    }
    best = std::min(best, rel);
  }
  const detail::CircleFit cf = detail::fit_circle_kasa(pts);
  if (cf.ok) {
    const double rel = cf.rms / diam;
    if (rel < kResidualThreshold) {
      out.kind = LocusReport::Kind::circle;
      out.circle = cf.circle;
      out.residual = rel;
      return out;
    }
    best = std::min(best, rel);
  }
  out.kind = LocusReport::Kind::irregular;
  out.residual = std::isfinite(best) ? best : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Ratio-sequence summaries

struct RatioSummary {
  enum class Verdict { constant, convergent, oscillating, irregular };
  Verdict verdict = Verdict::irregular;
  double value = 0.0;        // constant
  double limit = 0.0;        // convergent
  double fitted_rate = 0.0;  // convergent
  double residual = 0.0;
  std::vector<double> values;
};

inline const char* verdict_name(RatioSummary::Verdict v) {
  switch (v) {
    case RatioSummary::Verdict::constant: return "constant";
    case RatioSummary::Verdict::convergent: return "convergent";
    case RatioSummary::Verdict::oscillating: return "oscillating";
    case RatioSummary::Verdict::irregular: return "irregular";
  }
  return "?";
}

inline RatioSummary summarize_ratios(std::span<const double> values) {
  if (values.size() < 2) fail(Errc::invalid_spec, "ratio summary needs at least 2 values");
  RatioSummary out;
  out.values.assign(values.begin(), values.end());
  const std::size_t n = values.size();

  double mean = 0, amax = 0;
  for (double v : values) {
    mean += v;
    amax = std::max(amax, std::abs(v));
  }
  mean /= static_cast<double>(n);
  const double scale = std::max(std::abs(mean), amax);

  double dev_from_mean = 0;
  for (double v : values) dev_from_mean = std::max(dev_from_mean, std::abs(v - mean));
  if (dev_from_mean <= 1e-10 * scale) {
    out.verdict = RatioSummary::Verdict::constant;
    out.value = mean;
    out.residual = scale > 0 ? dev_from_mean / scale : 0.0;
    return out;
  }

  // Convergent: deviations from the limiting value decay geometrically.
  // The limit is sharpened by one Aitken step (exact for a geometric
  // approach; the raw final value would bend the tail of the deviation
  // sequence). Entries at the rounding floor are excluded so a clean decay
  // is not judged by its noise tail.
  double limit = values.back();
  if (n >= 3) {
    // difference form: the product form cancels catastrophically once the
    // sequence has nearly settled
    const double v0 = values[n - 3], v1 = values[n - 2], v2 = values[n - 1];
    const double d2 = v2 - v1, d1 = v1 - v0;
    const double dd = d2 - d1;
    if (std::abs(dd) > 1e-14 * scale) {
      const double aitken = v2 - d2 * d2 / dd;
      if (std::isfinite(aitken)) limit = aitken;
    }
  }
  std::vector<double> devs;
  double dev_max = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    devs.push_back(std::abs(values[i] - limit));
    dev_max = std::max(dev_max, devs.back());
  }
  const double floor = std::max(1e-13 * std::max(scale, dev_max), 1e-300);
  std::vector<double> usable;
  for (double d : devs)
    if (d > floor) usable.push_back(d);
  if (usable.size() >= 4) {
    // slide a fixed-length window and keep the cleanest fit: the head of an
    // asymptotically geometric approach and the rounding-noise tail both
    // wobble, but a genuine decay has a clean stretch in between
    const std::size_t window = std::min<std::size_t>(8, usable.size());
    RateFit best{};
    bool have_best = false;
    for (std::size_t lo = 0; lo + window <= usable.size(); ++lo) {
      const RateFit fit = fit_geometric_rate(
          std::span<const double>(usable).subspan(lo, window), static_cast<int>(window));
      if (!fit.ok || !(fit.rate < 1.0 - 1e-6)) continue;
      if (!have_best || fit.residual < best.residual) {
        best = fit;
        have_best = true;
      }
    }
    if (have_best && best.residual < 1e-3) {
      out.verdict = RatioSummary::Verdict::convergent;
      out.limit = limit;
      out.fitted_rate = best.rate;
      out.residual = best.residual;
      return out;
    }
    out.residual = have_best ? best.residual : 0.0;
  }

  // Oscillating: signs about the mean alternate and the amplitude holds up.
  int alternations = 0, comparisons = 0;
  int prev_sign = 0;
  for (double v : values) {
    const double d = v - mean;
    const int sign = (std::abs(d) <= 1e-14 * scale) ? 0 : (d > 0 ? 1 : -1);
    if (sign == 0) continue;
    if (prev_sign != 0) {
      ++comparisons;
      if (sign == -prev_sign) ++alternations;
    }
    prev_sign = sign;
  }
  if (comparisons >= 3 && alternations >= 0.9 * comparisons) {
    const std::size_t third = std::max<std::size_t>(1, n / 3);
    double head = 0, tail = 0;
    for (std::size_t i = 0; i < third; ++i) head = std::max(head, std::abs(values[i] - mean));
    for (std::size_t i = n - third; i < n; ++i) tail = std::max(tail, std::abs(values[i] - mean));
    if (tail >= 0.5 * head) {
      out.verdict = RatioSummary::Verdict::oscillating;
      out.value = mean;
      out.residual = scale > 0 ? tail / scale : 0.0;
      return out;
    }
  }

  out.verdict = RatioSummary::Verdict::irregular;
  return out;
}

// ---------------------------------------------------------------------------
// Shape trajectories

struct ShapeTrajectory {
  std::vector<std::vector<double>> shapes;
  std::vector<double> successive_distance;
  int period = 0;  // minimal detected period, 0 if none
};

inline ShapeTrajectory shape_trajectory(const TunnelTrace& trace, const StopCriteria& stop = {}) {
  if (trace.steps.size() < 2)
    fail(Errc::invalid_spec, "shape trajectory needs at least 2 steps");
  ShapeTrajectory out;
  for (const TunnelStep& s : trace.steps) out.shapes.push_back(s.shape);
  for (std::size_t i = 0; i + 1 < out.shapes.size(); ++i)
    out.successive_distance.push_back(shape_distance(out.shapes[i], out.shapes[i + 1]));
  out.period = detect_shape_period(out.shapes, stop.cycle_window, stop.cycle_tol);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps
//
// Triangle shape cells are parameterized by the two smallest angles (A, B)
// with A <= B <= C, sampled on a regular grid strictly inside the angle
// simplex with a margin of one grid step. Cells are evaluated independently
// and merged in index order, so the report does not depend on `jobs`.

struct ShapeGrid {
  double step_deg = 1.0;
  bool acute_only = false;
};

struct ParamRange {
  enum class Which { ratio, angle };
  Which which = Which::ratio;
  double from = 0.0;
  double to = 0.0;
  int count = 1;
};

struct SweepRequest {
  TransformSpec transform;
  std::optional<ShapeGrid> grid;
  std::optional<ParamRange> range;
  std::optional<Figure> figure;  // required when no shape grid is given
  StopCriteria stop;
  std::optional<bool> allow_outside;
};

struct SweepCell {
  std::optional<double> angle_a_deg, angle_b_deg, angle_c_deg;
  std::optional<double> param;
  Termination::Kind termination = Termination::Kind::budget_exhausted;
  std::optional<Errc> error;
  Classification::Kind classification = Classification::Kind::irregular;
  double rate = 0.0;
  int period = 0;
  int steps = 0;
  std::optional<double> final_alpha, final_beta;
};

struct SweepReport {
  std::string grid_desc;
  std::vector<SweepCell> cells;
};

// Canonical triangle with angles (A, B), unit base BC, centroid at the
// origin. Centering keeps collapsing tunnels resolvable: stored coordinates
// quantize at the collapse point's magnitude.
inline Triangle triangle_from_angles(double a_rad, double b_rad) {
  const double c_rad = kPi - a_rad - b_rad;
  if (!(a_rad > 0 && b_rad > 0 && c_rad > 0))
    fail(Errc::invalid_grid, "angles must be positive and sum below pi");
  const double side_ab = std::sin(c_rad) / std::sin(a_rad);
  const Point apex{side_ab * std::cos(b_rad), side_ab * std::sin(b_rad)};
  const Point g = (apex + Point{0, 0} + Point{1, 0}) / 3.0;
  return Triangle(apex - g, Point{0, 0} - g, Point{1, 0} - g);
}

namespace detail {

struct SweepJob {
  std::optional<std::array<double, 3>> angles_deg;
  std::optional<double> param;
};

inline std::vector<SweepJob> enumerate_cells(const SweepRequest& req) {
  std::vector<SweepJob> jobs;
  std::vector<std::optional<std::array<double, 3>>> shapes;
  if (req.grid) {
    const double step = req.grid->step_deg;
    if (!(step > 0)) fail(Errc::invalid_grid, "grid step must be positive");
    for (int i = 1; i * step < 180.0; ++i) {
      const double a = i * step;
      for (int j = i; ; ++j) {
        const double b = j * step;
        const double c = 180.0 - a - b;
        if (c < b - 1e-9) break;          // keep A <= B <= C
        if (c < step - 1e-9) break;       // margin of one grid step to degeneracy
        if (req.grid->acute_only && !(c < 90.0 - 1e-9)) continue;
        shapes.push_back(std::array<double, 3>{a, b, c});
      }
    }
    if (shapes.empty()) fail(Errc::invalid_grid, "shape grid contains no cells");
  } else {
    if (!req.figure) fail(Errc::invalid_grid, "sweep needs a shape grid or a figure");
    shapes.push_back(std::nullopt);
  }

  std::vector<std::optional<double>> params;
  if (req.range) {
    if (req.range->count < 1) fail(Errc::invalid_grid, "parameter range count must be >= 1");
    for (int k = 0; k < req.range->count; ++k) {
      const double t = req.range->count == 1
                           ? 0.0
                           : static_cast<double>(k) / (req.range->count - 1);
      params.push_back(req.range->from + t * (req.range->to - req.range->from));
    }
  } else {
    params.push_back(std::nullopt);
  }

  for (const auto& s : shapes)
    for (const auto& p : params) jobs.push_back({s, p});
  return jobs;
}

inline SweepCell evaluate_cell(const SweepRequest& req, const SweepJob& job) {
  SweepCell cell;
  TransformSpec spec = req.transform;
  if (job.param) {
    cell.param = job.param;
    if (req.range->which == ParamRange::Which::ratio)
      spec.ratio = *job.param;
    else
      spec.angle = *job.param;
  }
  Figure figure = req.figure ? *req.figure : Figure{Triangle({0, 0}, {1, 0}, {0, 1})};
  if (job.angles_deg) {
    cell.angle_a_deg = (*job.angles_deg)[0];
    cell.angle_b_deg = (*job.angles_deg)[1];
    cell.angle_c_deg = (*job.angles_deg)[2];
    figure = triangle_from_angles((*job.angles_deg)[0] * kPi / 180.0,
                                  (*job.angles_deg)[1] * kPi / 180.0);
  }
  const TunnelTrace trace = run(figure, spec, req.stop, req.allow_outside);
  cell.termination = trace.termination.kind;
  cell.error = trace.termination.error;
  cell.classification = trace.classification.kind;
  cell.rate = trace.classification.rate;
  cell.period = trace.classification.period;
  cell.steps = static_cast<int>(trace.steps.size());
  if (!trace.steps.empty()) {
    cell.final_alpha = trace.steps.back().area_ratio;
    cell.final_beta = trace.steps.back().perimeter_ratio;
  }
  return cell;
}

}  // namespace detail

inline SweepReport sweep(const SweepRequest& req, int jobs = 1) {
  validate_spec(req.transform);
  const std::vector<detail::SweepJob> cells = detail::enumerate_cells(req);

  SweepReport report;
  {
    std::string desc;
    if (req.grid)
      desc += std::string(req.grid->acute_only ? "acute" : "full") + " angle simplex, step " +
              std::to_string(req.grid->step_deg) + " deg";
    if (req.range) {
      if (!desc.empty()) desc += "; ";
      desc += std::string(req.range->which == ParamRange::Which::ratio ? "ratio" : "angle") +
              " from " + std::to_string(req.range->from) + " to " + std::to_string(req.range->to) +
              " in " + std::to_string(req.range->count) + " values";
    }
    if (!req.grid && req.figure) {
      if (!desc.empty()) desc += "; ";
      desc += "fixed initial figure";
    }
    report.grid_desc = desc;
  }

  report.cells.resize(cells.size());
  const int workers = std::max(1, jobs);
  if (workers == 1 || cells.size() < 2) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      report.cells[i] = detail::evaluate_cell(req, cells[i]);
    return report;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (cells.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(cells.size(), lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i)
        report.cells[i] = detail::evaluate_cell(req, cells[i]);
    });
  }
  for (std::thread& t : pool) t.join();
  return report;
}

}  // namespace tunnel
