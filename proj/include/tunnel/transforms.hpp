#pragma once

// The catalog of figure-to-figure transforms and the uniform dispatcher the
// iteration engine consumes.
//
// Every triangle transform maps vertex slot i of the input to vertex slot i
// of the output (the vertex "derived from A" comes first), so inverse-pair
// and coincidence identities hold label-wise, not merely as vertex sets.
//
// Feet-producing transforms report which feet landed outside their segment
// through an optional out-parameter; whether that aborts the construction is
// controlled by ApplyOptions::allow_outside (per-transform default when
// unset: permitted for orthic/pedal, rejected for the nedian-beta and
// polygon-foot constructions).

#include <optional>
#include <string_view>

#include "tunnel/geometry.hpp"

namespace tunnel {

// ---------------------------------------------------------------------------
// Specs

enum class TransformKind {
  orthic,
  medial,
  anticomplementary,
  incentral,
  contact,
  excentral,
  tangential,
  cevian,
  anticevian,
  pedal,
  antipedal,
  cyclocevian,
  symmedial,
  nedian_interior,
  nedian_exterior,
  alpha_nedian_interior,
  alpha_nedian_exterior,
  beta_nedian_interior,
  beta_nedian_exterior,
  polygon_perp_foot,
  polygon_midpoint_cevian,
};

struct PointSpec {
  enum class Kind {
    centroid,
    incenter,
    circumcenter,
    orthocenter,
    symmedian_point,
    gergonne_point,
    custom,
  };
  enum class Mode { fixed_in_plane, recomputed_each_step };

  Kind kind = Kind::centroid;
  Mode mode = Mode::fixed_in_plane;
  Point at{};  // meaningful only for Kind::custom
};

struct TransformSpec {
  TransformSpec() = default;
  TransformSpec(TransformKind k) : kind(k) {}

  TransformKind kind = TransformKind::medial;
  std::optional<double> ratio;   // nedian kinds
  std::optional<double> angle;   // alpha/beta nedian kinds, radians
  std::optional<PointSpec> point;  // cevian/anticevian/pedal/antipedal/cyclocevian
  std::optional<int> skip;       // polygon kinds, default 1
  std::vector<double> ratio_schedule;  // optional per-level ratio override
};

struct ApplyOptions {
  double degeneracy_tol = kDegeneracyTol;
  double angle_tol = kAngleTol;
  std::optional<bool> allow_outside;  // unset = per-transform default
};

struct Applied {
  Figure figure;
  std::vector<int> outside;  // vertex indices whose foot left its segment
  std::optional<Point> used_point;  // concrete P a point-parameterized transform used
};

// ---------------------------------------------------------------------------
// Catalog table

struct TransformInfo {
  TransformKind kind;
  const char* name;
  bool needs_ratio;
  bool needs_angle;
  bool needs_point;
  bool accepts_skip;   // polygon kinds only
  bool polygon_kind;   // accepts any arity; others require m == 3
  bool outside_default;  // allow_outside when the caller does not say
  const char* center;    // distinguished center recorded per tunnel level
};

inline constexpr TransformInfo kCatalog[] = {
    {TransformKind::orthic, "orthic", false, false, false, false, false, true, "orthocenter"},
    {TransformKind::medial, "medial", false, false, false, false, false, true, "centroid"},
    {TransformKind::anticomplementary, "anticomplementary", false, false, false, false, false, true, "centroid"},
    {TransformKind::incentral, "incentral", false, false, false, false, false, true, "incenter"},
    {TransformKind::contact, "contact", false, false, false, false, false, true, "incenter"},
    {TransformKind::excentral, "excentral", false, false, false, false, false, true, "incenter of parent"},
    {TransformKind::tangential, "tangential", false, false, false, false, false, true, "circumcenter"},
    {TransformKind::cevian, "cevian", false, false, true, false, false, true, "resolved P"},
    {TransformKind::anticevian, "anticevian", false, false, true, false, false, true, "resolved P"},
    {TransformKind::pedal, "pedal", false, false, true, false, false, true, "resolved P"},
    {TransformKind::antipedal, "antipedal", false, false, true, false, false, true, "resolved P"},
    {TransformKind::cyclocevian, "cyclocevian", false, false, true, false, false, true, "resolved P"},
    {TransformKind::symmedial, "symmedial", false, false, false, false, false, true, "symmedian point"},
    {TransformKind::nedian_interior, "nedian_interior", true, false, false, false, false, true, "vertex centroid"},
    {TransformKind::nedian_exterior, "nedian_exterior", true, false, false, false, false, true, "vertex centroid"},
    {TransformKind::alpha_nedian_interior, "alpha_nedian_interior", false, true, false, false, false, true, "vertex centroid"},
    {TransformKind::alpha_nedian_exterior, "alpha_nedian_exterior", false, true, false, false, false, true, "vertex centroid"},
    {TransformKind::beta_nedian_interior, "beta_nedian_interior", false, true, false, false, false, false, "vertex centroid"},
    {TransformKind::beta_nedian_exterior, "beta_nedian_exterior", false, true, false, false, false, false, "vertex centroid"},
    {TransformKind::polygon_perp_foot, "polygon_perp_foot", false, false, false, true, true, false, "vertex centroid"},
    {TransformKind::polygon_midpoint_cevian, "polygon_midpoint_cevian", false, false, false, true, true, true, "vertex centroid"},
};

inline const TransformInfo& transform_info(TransformKind kind) {
  for (const TransformInfo& info : kCatalog)
    if (info.kind == kind) return info;
  fail(Errc::invalid_spec, "unknown transform kind");
}

inline const TransformInfo* find_transform(std::string_view name) {
  for (const TransformInfo& info : kCatalog)
    if (name == info.name) return &info;
  return nullptr;
}

inline void validate_spec(const TransformSpec& spec) {
  const TransformInfo& info = transform_info(spec.kind);
  const std::string name = info.name;
  if (info.needs_ratio) {
    if (!spec.ratio && spec.ratio_schedule.empty())
      fail(Errc::invalid_spec, name + " requires a ratio");
    if (spec.ratio && !(*spec.ratio > 0 && std::isfinite(*spec.ratio)))
      fail(Errc::invalid_spec, name + " ratio must be positive and finite");
    for (double r : spec.ratio_schedule)
      if (!(r > 0 && std::isfinite(r)))
        fail(Errc::invalid_spec, name + " ratio schedule entries must be positive");
  } else {
    if (spec.ratio || !spec.ratio_schedule.empty())
      fail(Errc::invalid_spec, name + " does not take a ratio");
  }
  if (info.needs_angle) {
    if (!spec.angle) fail(Errc::invalid_spec, name + " requires an angle");
    if (!(*spec.angle > 0 && *spec.angle < kPi))
      fail(Errc::invalid_spec, name + " angle must lie in (0, pi)");
  } else if (spec.angle) {
    fail(Errc::invalid_spec, name + " does not take an angle");
  }
  if (info.needs_point) {
    if (!spec.point) fail(Errc::invalid_spec, name + " requires a point");
    if (spec.point->kind == PointSpec::Kind::custom && !finite(spec.point->at))
      fail(Errc::invalid_spec, "custom point must be finite");
  } else if (spec.point) {
    fail(Errc::invalid_spec, name + " does not take a point");
  }
  if (info.accepts_skip) {
    if (spec.skip && *spec.skip < 1) fail(Errc::invalid_spec, name + " skip must be >= 1");
  } else if (spec.skip) {
    fail(Errc::invalid_spec, name + " does not take a skip");
  }
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

struct Foot {
  Point p;
  double t;  // position along the segment; [0, 1] means inside
};

inline Foot foot_on_segment(Point p, Point s, Point e) {
  const Line l = line_through(s, e);
  const Point f = perpendicular_foot(p, l);
  return {f, dot(f - s, e - s) / norm2(e - s)};
}

inline bool outside_segment(double t) { return t < -1e-9 || t > 1.0 + 1e-9; }

inline void check_no_right_angle(const Triangle& t, double angle_tol, const char* what) {
  const auto ang = vertex_angles(t);
  constexpr const char* names[3] = {"A", "B", "C"};
  for (int i = 0; i < 3; ++i)
    if (std::abs(ang[i] - kPi / 2) < angle_tol)
      fail(Errc::right_angle_degenerate,
           std::string(what) + " is undefined near a right angle (vertex " + names[i] + ")");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Triangle transforms

inline Point orthocenter(const Triangle& t) {
  const Line alt_a = line_with_normal(t.c - t.b, t.a);
  const Line alt_b = line_with_normal(t.a - t.c, t.b);
  return line_intersection(alt_a, alt_b);
}

// Feet of the altitudes. Feet may leave their segments for obtuse input;
// that is reported, not rejected, unless allow_outside is explicitly false.
inline Triangle orthic(const Triangle& t, const ApplyOptions& opts = {},
                       std::vector<int>* outside = nullptr) {
  detail::check_no_right_angle(t, opts.angle_tol, "the orthic triangle");
  const detail::Foot fa = detail::foot_on_segment(t.a, t.b, t.c);
  const detail::Foot fb = detail::foot_on_segment(t.b, t.c, t.a);
  const detail::Foot fc = detail::foot_on_segment(t.c, t.a, t.b);
  std::vector<int> flags;
  const double params[3] = {fa.t, fb.t, fc.t};
  for (int i = 0; i < 3; ++i)
    if (detail::outside_segment(params[i])) flags.push_back(i);
  if (!opts.allow_outside.value_or(true) && !flags.empty())
    fail(Errc::foot_outside_side, "altitude foot left its side segment");
  if (outside) *outside = std::move(flags);
  return Triangle(fa.p, fb.p, fc.p, opts.degeneracy_tol);
}

inline Point centroid(const Triangle& t) { return (t.a + t.b + t.c) / 3.0; }

inline Triangle medial(const Triangle& t, double degeneracy_tol = kDegeneracyTol) {
  return Triangle(midpoint(t.b, t.c), midpoint(t.c, t.a), midpoint(t.a, t.b), degeneracy_tol);
}

// Exact inverse of the medial construction: medial(anticomplementary(t)) == t.
inline Triangle anticomplementary(const Triangle& t, double degeneracy_tol = kDegeneracyTol) {
  return Triangle(t.b + t.c - t.a, t.c + t.a - t.b, t.a + t.b - t.c, degeneracy_tol);
}

inline Triangle cevian_triangle(const Triangle& t, const BaryCoords& p,
                                double degeneracy_tol = kDegeneracyTol) {
  const double m = std::abs(p.u) + std::abs(p.v) + std::abs(p.w);
  if (!(m > 0)) fail(Errc::invalid_spec, "zero barycentric coordinates");
  if (std::abs(p.v + p.w) <= 1e-12 * m || std::abs(p.w + p.u) <= 1e-12 * m ||
      std::abs(p.u + p.v) <= 1e-12 * m)
    fail(Errc::foot_at_infinity, "a cevian foot escapes to infinity");
  return Triangle(from_barycentric(t, {0, p.v, p.w}),
                  from_barycentric(t, {p.u, 0, p.w}),
                  from_barycentric(t, {p.u, p.v, 0}), degeneracy_tol);
}

inline Triangle anticevian_triangle(const Triangle& t, const BaryCoords& p,
                                    double degeneracy_tol = kDegeneracyTol) {
  const double m = std::abs(p.u) + std::abs(p.v) + std::abs(p.w);
  if (!(m > 0)) fail(Errc::invalid_spec, "zero barycentric coordinates");
  if (std::abs(p.u) <= 1e-12 * m || std::abs(p.v) <= 1e-12 * m || std::abs(p.w) <= 1e-12 * m)
    fail(Errc::vertex_at_infinity, "a zero coordinate degenerates the anticevian triangle");
  if (std::abs(-p.u + p.v + p.w) <= 1e-12 * m || std::abs(p.u - p.v + p.w) <= 1e-12 * m ||
      std::abs(p.u + p.v - p.w) <= 1e-12 * m)
    fail(Errc::vertex_at_infinity, "an anticevian vertex escapes to infinity");
  return Triangle(from_barycentric(t, {-p.u, p.v, p.w}),
                  from_barycentric(t, {p.u, -p.v, p.w}),
                  from_barycentric(t, {p.u, p.v, -p.w}), degeneracy_tol);
}

// Tangency points of the incircle, as perpendicular feet of the incenter.
inline Triangle contact(const Triangle& t, double degeneracy_tol = kDegeneracyTol) {
  const Point i = incircle(t).center;
  return Triangle(perpendicular_foot(i, line_through(t.b, t.c)),
                  perpendicular_foot(i, line_through(t.c, t.a)),
                  perpendicular_foot(i, line_through(t.a, t.b)), degeneracy_tol);
}

inline Triangle excentral(const Triangle& t, double degeneracy_tol = kDegeneracyTol) {
  const auto e = excenters(t);
  return Triangle(e[0], e[1], e[2], degeneracy_tol);
}

inline Triangle pedal(const Triangle& t, Point p, const ApplyOptions& opts = {},
                      std::vector<int>* outside = nullptr) {
  const detail::Foot fa = detail::foot_on_segment(p, t.b, t.c);
  const detail::Foot fb = detail::foot_on_segment(p, t.c, t.a);
  const detail::Foot fc = detail::foot_on_segment(p, t.a, t.b);
  std::vector<int> flags;
  const double params[3] = {fa.t, fb.t, fc.t};
  for (int i = 0; i < 3; ++i)
    if (detail::outside_segment(params[i])) flags.push_back(i);
  if (!opts.allow_outside.value_or(true) && !flags.empty())
    fail(Errc::foot_outside_side, "pedal foot left its side segment");
  if (outside) *outside = std::move(flags);
  try {
    return Triangle(fa.p, fb.p, fc.p, opts.degeneracy_tol);
  } catch (const Error& e) {
    if (e.code() == Errc::degenerate_triangle)
      fail(Errc::simson_degenerate, "pedal feet are collinear (P lies on the circumcircle)");
    throw;
  }
}

// Triangle whose pedal triangle w.r.t. p is t. Vertex slot i is the
// intersection of the perpendiculars erected at the other two vertices.
inline Triangle antipedal(const Triangle& t, Point p, const ApplyOptions& opts = {}) {
  const double d = t.diameter();
  for (const Point& v : t.verts())
    if (dist(p, v) <= kDegeneracyTol * d)
      fail(Errc::coincident_points, "antipedal point coincides with a vertex");
  const Line la = line_with_normal(t.a - p, t.a);
  const Line lb = line_with_normal(t.b - p, t.b);
  const Line lc = line_with_normal(t.c - p, t.c);
  return Triangle(line_intersection(lb, lc), line_intersection(lc, la),
                  line_intersection(la, lb), opts.degeneracy_tol);
}

inline Triangle tangential(const Triangle& t, const ApplyOptions& opts = {}) {
  detail::check_no_right_angle(t, opts.angle_tol, "the tangential triangle");
  const Circle cc = circumcircle(t);
  const Line ta = line_with_normal(t.a - cc.center, t.a);
  const Line tb = line_with_normal(t.b - cc.center, t.b);
  const Line tc = line_with_normal(t.c - cc.center, t.c);
  return Triangle(line_intersection(tb, tc), line_intersection(tc, ta),
                  line_intersection(ta, tb), opts.degeneracy_tol);
}

inline BaryCoords symmedian_coords(const Triangle& t) {
  const auto s = side_lengths(t);
  return {s[0] * s[0], s[1] * s[1], s[2] * s[2]};
}

inline BaryCoords gergonne_coords(const Triangle& t) {
  const auto sl = side_lengths(t);
  const double s = (sl[0] + sl[1] + sl[2]) / 2;
  return {(s - sl[1]) * (s - sl[2]), (s - sl[2]) * (s - sl[0]), (s - sl[0]) * (s - sl[1])};
}

inline Triangle incentral(const Triangle& t, double degeneracy_tol = kDegeneracyTol) {
  return cevian_triangle(t, incenter_coords(t), degeneracy_tol);
}

inline Triangle symmedial(const Triangle& t, double degeneracy_tol = kDegeneracyTol) {
  return cevian_triangle(t, symmedian_coords(t), degeneracy_tol);
}

// ---------------------------------------------------------------------------
// Cyclocevian conjugation
//
// Circumscribe a circle through the cevian feet of p; its second meeting
// points with the sides are the cevian feet of a common point (the
// conjugate). A tangency counts as a double intersection, which makes the
// Gergonne point a genuine fixed point instead of an error.

struct CyclocevianResult {
  Triangle triangle;
  BaryCoords conjugate;
};

namespace detail {

inline Point second_circle_intersection(const Circle& k, Point s, Point e, Point known) {
  const Point d = unit(e - s);
  const double m = dot(k.center - s, d);
  const Point chord_mid = s + d * m;
  const double h2 = k.radius * k.radius - norm2(k.center - chord_mid);
  const double rel = h2 / (k.radius * k.radius);
  if (rel < -1e-8) fail(Errc::cevian_circle_miss, "feet circle misses a side line");
  if (rel <= 1e-8) return chord_mid;  // double root
  const double h = std::sqrt(std::max(h2, 0.0));
  const double tk = dot(known - s, d);
  const double t1 = m - h, t2 = m + h;
  return std::abs(t1 - tk) > std::abs(t2 - tk) ? s + d * t1 : s + d * t2;
}

}  // namespace detail

inline CyclocevianResult cyclocevian_pair(const Triangle& t, const BaryCoords& p,
                                          const ApplyOptions& opts = {}) {
  const double s = p.u + p.v + p.w;
  if (!(s != 0) || !(p.u / s > 0 && p.v / s > 0 && p.w / s > 0))
    fail(Errc::not_interior, "cyclocevian conjugation needs an interior point");
  const Triangle feet = cevian_triangle(t, p, opts.degeneracy_tol);
  const Circle k = circumcircle(feet);
  const Point a2 = detail::second_circle_intersection(k, t.b, t.c, feet.a);
  const Point b2 = detail::second_circle_intersection(k, t.c, t.a, feet.b);
  const Point c2 = detail::second_circle_intersection(k, t.a, t.b, feet.c);
  const Line la = line_through(t.a, a2);
  const Line lb = line_through(t.b, b2);
  const Line lc = line_through(t.c, c2);
  const Point q = line_intersection(la, lb);
  if (std::abs(line_eval(lc, q)) > 1e-8 * t.diameter())
    fail(Errc::cevian_circle_miss, "second intersections are not concurrent cevian feet");
  return {Triangle(a2, b2, c2, opts.degeneracy_tol), to_barycentric(t, q)};
}

inline Triangle cyclocevian(const Triangle& t, const BaryCoords& p,
                            const ApplyOptions& opts = {}) {
  return cyclocevian_pair(t, p, opts).triangle;
}

inline BaryCoords cyclocevian_conjugate(const Triangle& t, const BaryCoords& p,
                                        const ApplyOptions& opts = {}) {
  return cyclocevian_pair(t, p, opts).conjugate;
}

// ---------------------------------------------------------------------------
// Nedians
//
// Ratio convention: the foot from A divides B -> C with BA'/A'C = r, and
// cyclically (from B toward C->A, from C toward A->B).

enum class NedianVariant { interior, exterior };

inline std::array<Point, 3> nedian_feet(const Triangle& t, double r) {
  if (!(r > 0) || !std::isfinite(r))
    fail(Errc::invalid_spec, "nedian ratio must be positive and finite");
  const double f = r / (1.0 + r);
  return {t.b + (t.c - t.b) * f, t.c + (t.a - t.c) * f, t.a + (t.b - t.a) * f};
}

inline Triangle nedian_exterior(const Triangle& t, double r,
                                double degeneracy_tol = kDegeneracyTol) {
  const auto f = nedian_feet(t, r);
  return Triangle(f[0], f[1], f[2], degeneracy_tol);
}

inline Triangle nedian_interior(const Triangle& t, double r,
                                double degeneracy_tol = kDegeneracyTol) {
  if (std::abs(r - 1.0) <= 1e-9)
    fail(Errc::concurrent_nedians, "ratio 1 gives the medians, which concur");
  const auto f = nedian_feet(t, r);
  const Line la = line_through(t.a, f[0]);
  const Line lb = line_through(t.b, f[1]);
  const Line lc = line_through(t.c, f[2]);
  return Triangle(line_intersection(la, lb), line_intersection(lb, lc),
                  line_intersection(lc, la), degeneracy_tol);
}

namespace detail {

inline Triangle intersection_triangle(const Line& la, const Line& lb, const Line& lc,
                                      double reference_diameter, double degeneracy_tol,
                                      const char* what) {
  const Point pab = line_intersection(la, lb);
  const Point pbc = line_intersection(lb, lc);
  const Point pca = line_intersection(lc, la);
  const double spread = std::max({dist(pab, pbc), dist(pbc, pca), dist(pca, pab)});
  if (spread < 1e-9 * reference_diameter)
    fail(Errc::concurrent_nedians, std::string(what) + " concur within tolerance");
  return Triangle(pab, pbc, pca, degeneracy_tol);
}

}  // namespace detail

// Nedians fixed by the angle alpha they make with the side at their vertex:
// the ray A->B rotated counterclockwise (toward the interior of a CCW
// triangle) by alpha, and cyclically.
inline Triangle alpha_nedian(const Triangle& t, double alpha, NedianVariant variant,
                             const ApplyOptions& opts = {}) {
  if (!(alpha > 0 && alpha < kPi)) fail(Errc::invalid_spec, "alpha must lie in (0, pi)");
  const auto ang = vertex_angles(t);
  constexpr const char* names[3] = {"A", "B", "C"};
  const std::array<Point, 3> v = t.verts();
  std::array<Line, 3> nedian;
  std::array<Point, 3> feet;
  for (int i = 0; i < 3; ++i) {
    if (alpha >= ang[i])
      fail(Errc::ray_misses_side,
           std::string("alpha is at least the vertex angle at ") + names[i]);
    const Point dir = rotated(unit(v[(i + 1) % 3] - v[i]), alpha);
    nedian[i] = line_with_normal(perp(dir), v[i]);
    feet[i] = line_intersection(nedian[i], line_through(v[(i + 1) % 3], v[(i + 2) % 3]));
  }
  if (variant == NedianVariant::exterior)
    return Triangle(feet[0], feet[1], feet[2], opts.degeneracy_tol);
  return detail::intersection_triangle(nedian[0], nedian[1], nedian[2], t.diameter(),
                                       opts.degeneracy_tol, "the three alpha-nedians");
}

// Nedians fixed by the angle beta they make with the opposite side: the line
// through A with direction unit(C - B) rotated counterclockwise by beta, and
// cyclically. beta = pi/2 reproduces the altitudes.
inline Triangle beta_nedian(const Triangle& t, double beta, NedianVariant variant,
                            const ApplyOptions& opts = {}, std::vector<int>* outside = nullptr) {
  if (!(beta > 0 && beta < kPi)) fail(Errc::invalid_spec, "beta must lie in (0, pi)");
  const std::array<Point, 3> v = t.verts();
  std::array<Line, 3> nedian;
  std::array<Point, 3> feet;
  std::vector<int> flags;
  for (int i = 0; i < 3; ++i) {
    const Point s = v[(i + 1) % 3], e = v[(i + 2) % 3];
    const Point dir = rotated(unit(e - s), beta);
    nedian[i] = line_with_normal(perp(dir), v[i]);
    feet[i] = line_intersection(nedian[i], line_through(s, e));
    const double param = dot(feet[i] - s, e - s) / norm2(e - s);
    if (detail::outside_segment(param)) flags.push_back(i);
  }
  if (!opts.allow_outside.value_or(false) && !flags.empty())
    fail(Errc::foot_outside_side, "beta-nedian foot fell outside its side segment");
  if (outside) *outside = std::move(flags);
  if (variant == NedianVariant::exterior)
    return Triangle(feet[0], feet[1], feet[2], opts.degeneracy_tol);
  return detail::intersection_triangle(nedian[0], nedian[1], nedian[2], t.diameter(),
                                       opts.degeneracy_tol, "the three beta-nedians");
}

// ---------------------------------------------------------------------------
// Polygon transforms

// New vertex j = perpendicular foot of V_j on the side k steps ahead,
// i.e. the side (V_{j+k}, V_{j+k+1}), indices mod m.
inline Polygon polygon_perp_foot(const Polygon& p, int skip = 1, const ApplyOptions& opts = {},
                                 std::vector<int>* outside = nullptr) {
  if (skip < 1) fail(Errc::invalid_spec, "skip must be >= 1");
  const std::size_t m = p.size();
  std::vector<Point> feet(m);
  std::vector<int> flags;
  for (std::size_t j = 0; j < m; ++j) {
    const Point s = p.v[(j + skip) % m];
    const Point e = p.v[(j + skip + 1) % m];
    const detail::Foot f = detail::foot_on_segment(p.v[j], s, e);
    feet[j] = f.p;
    if (detail::outside_segment(f.t)) flags.push_back(static_cast<int>(j));
  }
  if (!opts.allow_outside.value_or(false) && !flags.empty())
    fail(Errc::foot_outside_side, "perpendicular foot fell outside its side segment");
  if (outside) *outside = std::move(flags);
  return Polygon(std::move(feet), opts.degeneracy_tol);
}

// New vertex j = midpoint of the side k steps ahead. The cevian from V_j to
// that midpoint meets the side exactly there, so only the midpoint survives.
// The vertex centroid is preserved exactly.
inline Polygon polygon_midpoint_cevian(const Polygon& p, int skip = 1,
                                       double degeneracy_tol = kDegeneracyTol) {
  if (skip < 1) fail(Errc::invalid_spec, "skip must be >= 1");
  const std::size_t m = p.size();
  std::vector<Point> mids(m);
  for (std::size_t j = 0; j < m; ++j)
    mids[j] = midpoint(p.v[(j + skip) % m], p.v[(j + skip + 1) % m]);
  return Polygon(std::move(mids), degeneracy_tol);
}

// ---------------------------------------------------------------------------
// Point resolution and dispatch

inline Point resolve_point(const PointSpec& ps, const Triangle& t) {
  switch (ps.kind) {
    case PointSpec::Kind::centroid: return centroid(t);
    case PointSpec::Kind::incenter: return from_barycentric(t, incenter_coords(t));
    case PointSpec::Kind::circumcenter: return circumcircle(t).center;
    case PointSpec::Kind::orthocenter: return orthocenter(t);
    case PointSpec::Kind::symmedian_point: return from_barycentric(t, symmedian_coords(t));
    case PointSpec::Kind::gergonne_point: return from_barycentric(t, gergonne_coords(t));
    case PointSpec::Kind::custom: return ps.at;
  }
  fail(Errc::invalid_spec, "unknown point kind");
}

inline Triangle to_triangle(const Figure& f, double degeneracy_tol = kDegeneracyTol) {
  if (const auto* t = std::get_if<Triangle>(&f)) return *t;
  const Polygon& p = std::get<Polygon>(f);
  if (p.size() != 3)
    fail(Errc::arity_mismatch, "a triangle transform needs a 3-vertex figure, got " +
                                   std::to_string(p.size()));
  return Triangle(p.v[0], p.v[1], p.v[2], degeneracy_tol);
}

inline Polygon to_polygon(const Figure& f, double degeneracy_tol = kDegeneracyTol) {
  if (const auto* p = std::get_if<Polygon>(&f)) return *p;
  const Triangle& t = std::get<Triangle>(f);
  return Polygon({t.a, t.b, t.c}, degeneracy_tol);
}

// Replace a named fixed-in-plane point with its concrete location on the
// initial figure, so later applications keep using the original point.
inline TransformSpec resolve_spec(const TransformSpec& spec, const Figure& initial) {
  TransformSpec out = spec;
  if (out.point && out.point->kind != PointSpec::Kind::custom &&
      out.point->mode == PointSpec::Mode::fixed_in_plane) {
    const Point p = resolve_point(*out.point, to_triangle(initial));
    out.point->kind = PointSpec::Kind::custom;
    out.point->at = p;
  }
  return out;
}

// Uniform dispatcher. Named fixed-in-plane points are resolved against the
// figure passed here; the engine pre-resolves them against the initial
// figure via resolve_spec() so that iteration keeps the original point.
inline Applied apply_transform(const TransformSpec& spec, const Figure& fig, const ApplyOptions& opts = {}) {
  validate_spec(spec);
  const TransformInfo& info = transform_info(spec.kind);
  Applied out{fig, {}, {}};

  if (info.polygon_kind) {
    const Polygon p = to_polygon(fig, opts.degeneracy_tol);
    const int k = spec.skip.value_or(1);
    if (spec.kind == TransformKind::polygon_perp_foot)
      out.figure = polygon_perp_foot(p, k, opts, &out.outside);
    else
      out.figure = polygon_midpoint_cevian(p, k, opts.degeneracy_tol);
    return out;
  }

  const Triangle t = to_triangle(fig, opts.degeneracy_tol);
  std::optional<Point> pt;
  if (info.needs_point) {
    pt = resolve_point(*spec.point, t);
    out.used_point = pt;
  }
  switch (spec.kind) {
    case TransformKind::orthic: out.figure = orthic(t, opts, &out.outside); break;
    case TransformKind::medial: out.figure = medial(t, opts.degeneracy_tol); break;
    case TransformKind::anticomplementary:
      out.figure = anticomplementary(t, opts.degeneracy_tol);
      break;
    case TransformKind::incentral: out.figure = incentral(t, opts.degeneracy_tol); break;
    case TransformKind::contact: out.figure = contact(t, opts.degeneracy_tol); break;
    case TransformKind::excentral: out.figure = excentral(t, opts.degeneracy_tol); break;
    case TransformKind::tangential: out.figure = tangential(t, opts); break;
    case TransformKind::cevian:
      out.figure = cevian_triangle(t, to_barycentric(t, *pt), opts.degeneracy_tol);
      break;
    case TransformKind::anticevian:
      out.figure = anticevian_triangle(t, to_barycentric(t, *pt), opts.degeneracy_tol);
      break;
    case TransformKind::pedal: out.figure = pedal(t, *pt, opts, &out.outside); break;
    case TransformKind::antipedal: out.figure = antipedal(t, *pt, opts); break;
    case TransformKind::cyclocevian:
      out.figure = cyclocevian(t, to_barycentric(t, *pt), opts);
      break;
    case TransformKind::symmedial: out.figure = symmedial(t, opts.degeneracy_tol); break;
    case TransformKind::nedian_interior:
      out.figure = nedian_interior(t, *spec.ratio, opts.degeneracy_tol);
      break;
    case TransformKind::nedian_exterior:
      out.figure = nedian_exterior(t, *spec.ratio, opts.degeneracy_tol);
      break;
    case TransformKind::alpha_nedian_interior:
      out.figure = alpha_nedian(t, *spec.angle, NedianVariant::interior, opts);
      break;
    case TransformKind::alpha_nedian_exterior:
      out.figure = alpha_nedian(t, *spec.angle, NedianVariant::exterior, opts);
      break;
    case TransformKind::beta_nedian_interior:
      out.figure = beta_nedian(t, *spec.angle, NedianVariant::interior, opts, &out.outside);
      break;
    case TransformKind::beta_nedian_exterior:
      out.figure = beta_nedian(t, *spec.angle, NedianVariant::exterior, opts, &out.outside);
      break;
    default: fail(Errc::invalid_spec, "unhandled transform kind");
  }
  return out;
}

// The distinguished center recorded for each tunnel level (see kCatalog).
inline Point distinguished_center(const TransformSpec& spec, const Figure& parent,
                                  const Figure& child, const Applied& applied,
                                  double degeneracy_tol = kDegeneracyTol) {
  switch (spec.kind) {
    case TransformKind::orthic: return orthocenter(to_triangle(child, degeneracy_tol));
    case TransformKind::medial:
    case TransformKind::anticomplementary:
      return centroid(to_triangle(child, degeneracy_tol));
    case TransformKind::incentral:
    case TransformKind::contact: {
      const Triangle t = to_triangle(child, degeneracy_tol);
      return from_barycentric(t, incenter_coords(t));
    }
    case TransformKind::symmedial: {
      const Triangle t = to_triangle(child, degeneracy_tol);
      return from_barycentric(t, symmedian_coords(t));
    }
    case TransformKind::excentral: {
      const Triangle t = to_triangle(parent, degeneracy_tol);
      return from_barycentric(t, incenter_coords(t));
    }
    case TransformKind::tangential:
      return circumcircle(to_triangle(child, degeneracy_tol)).center;
    case TransformKind::cevian:
    case TransformKind::anticevian:
    case TransformKind::pedal:
    case TransformKind::antipedal:
    case TransformKind::cyclocevian:
      return applied.used_point.value_or(vertex_centroid(child));
    default: return vertex_centroid(child);
  }
}

}  // namespace tunnel
