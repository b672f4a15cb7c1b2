#pragma once

// 2-D floating-point geometry kernel: points, lines, circles, triangles,
// polygons and barycentric coordinates.
//
// Conventions used throughout the library:
//   - Lines are implicit a*x + b*y + c = 0 with (a, b) kept unit length,
//     so line_eval() is a signed distance.
//   - Triangles are normalized to counterclockwise vertex order at
//     construction; `flipped` records whether the input was clockwise.
//   - Degeneracy thresholds are relative to figure diameter, never
//     absolute, so every predicate is scale-free.
//   - Plain double arithmetic; near-degenerate input is rejected by
//     tolerance rather than resolved by exact predicates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tunnel {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegeneracyTol = 1e-12;
inline constexpr double kAngleTol = 1e-9;

// ---------------------------------------------------------------------------
// Errors

enum class Errc {
  coincident_points,
  parallel_lines,
  degenerate_triangle,
  degenerate_polygon,
  point_at_infinity,
  right_angle_degenerate,
  foot_at_infinity,
  vertex_at_infinity,
  simson_degenerate,
  cevian_circle_miss,
  not_interior,
  concurrent_nedians,
  ray_misses_side,
  foot_outside_side,
  arity_mismatch,
  invalid_spec,
  invalid_grid,
  io_failure,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::coincident_points: return "CoincidentPoints";
    case Errc::parallel_lines: return "ParallelLines";
    case Errc::degenerate_triangle: return "DegenerateTriangle";
    case Errc::degenerate_polygon: return "DegeneratePolygon";
    case Errc::point_at_infinity: return "PointAtInfinity";
    case Errc::right_angle_degenerate: return "RightAngleDegenerate";
    case Errc::foot_at_infinity: return "FootAtInfinity";
    case Errc::vertex_at_infinity: return "VertexAtInfinity";
    case Errc::simson_degenerate: return "SimsonDegenerate";
    case Errc::cevian_circle_miss: return "CevianCircleMiss";
    case Errc::not_interior: return "NotInterior";
    case Errc::concurrent_nedians: return "ConcurrentNedians";
    case Errc::ray_misses_side: return "RayMissesSide";
    case Errc::foot_outside_side: return "FootOutsideSide";
    case Errc::arity_mismatch: return "ArityMismatch";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::invalid_grid: return "InvalidGrid";
    case Errc::io_failure: return "IoFailure";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

// ---------------------------------------------------------------------------
// Points and vectors (one type serves as both)

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  Point operator-() const { return {-x, -y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
  Point operator/(double s) const { return {x / s, y / s}; }
};

inline Point operator*(double s, Point p) { return p * s; }

inline double dot(Point p, Point q) { return p.x * q.x + p.y * q.y; }
inline double cross(Point p, Point q) { return p.x * q.y - p.y * q.x; }
inline double norm2(Point p) { return dot(p, p); }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double dist(Point p, Point q) { return norm(q - p); }
inline Point perp(Point p) { return {-p.y, p.x}; }  // rotated +90 degrees
inline Point midpoint(Point p, Point q) { return {(p.x + q.x) / 2, (p.y + q.y) / 2}; }
inline bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline Point rotated(Point p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

inline Point unit(Point p) {
  const double n = norm(p);
  if (!(n > 0) || !std::isfinite(n)) fail(Errc::coincident_points, "zero-length direction");
  return p / n;
}

// ---------------------------------------------------------------------------
// Lines

struct Line {
  double a = 0.0, b = 0.0, c = 0.0;  // a*x + b*y + c = 0, a^2 + b^2 = 1
};

// Signed distance of p from the line.
inline double line_eval(const Line& l, Point p) { return l.a * p.x + l.b * p.y + l.c; }

inline Line line_through(Point p, Point q) {
  const double scale = std::max({1.0, norm(p), norm(q)});
  const double len = dist(p, q);
  if (!(len > kDegeneracyTol * scale))
    fail(Errc::coincident_points, "cannot span a line between coincident points");
  const Point d = (q - p) / len;
  Line l{-d.y, d.x, 0.0};
  l.c = -(l.a * p.x + l.b * p.y);
  return l;
}

// Line through `p` whose normal direction is `normal` (not necessarily unit).
inline Line line_with_normal(Point normal, Point p) {
  const Point n = unit(normal);
  return {n.x, n.y, -(n.x * p.x + n.y * p.y)};
}

inline Point line_intersection(const Line& l1, const Line& l2) {
  const double det = l1.a * l2.b - l2.a * l1.b;  // sine of the angle between them
  if (std::abs(det) <= 1e-12) fail(Errc::parallel_lines, "lines are parallel within tolerance");
  return {(l1.b * l2.c - l2.b * l1.c) / det, (l2.a * l1.c - l1.a * l2.c) / det};
}

inline Point perpendicular_foot(Point p, const Line& l) {
  const double d = line_eval(l, p);
  return {p.x - d * l.a, p.y - d * l.b};
}

// ---------------------------------------------------------------------------
// Circles

struct Circle {
  Point center;
  double radius = 0.0;
};

// ---------------------------------------------------------------------------
// Triangles

struct Triangle {
  Point a{0, 0}, b{1, 0}, c{0, 1};
  bool flipped = false;  // input was clockwise and got reordered

  Triangle() = default;

  Triangle(Point a_, Point b_, Point c_, double degeneracy_tol = kDegeneracyTol)
      : a(a_), b(b_), c(c_) {
    if (!finite(a) || !finite(b) || !finite(c))
      fail(Errc::degenerate_triangle, "non-finite vertex");
    const double d = diameter();
    const double twice_area = cross(b - a, c - a);
    if (!(std::abs(twice_area) > 2.0 * degeneracy_tol * d * d))
      fail(Errc::degenerate_triangle, "vertices are collinear within tolerance");
    if (twice_area < 0) {
      std::swap(b, c);
      flipped = true;
    }
  }

  std::array<Point, 3> verts() const { return {a, b, c}; }

  double diameter() const { return std::max({dist(a, b), dist(b, c), dist(c, a)}); }
  double signed_area() const { return 0.5 * cross(b - a, c - a); }
  double perimeter() const { return dist(a, b) + dist(b, c) + dist(c, a); }
};

// Side lengths opposite each vertex: {|BC|, |CA|, |AB|}.
inline std::array<double, 3> side_lengths(const Triangle& t) {
  return {dist(t.b, t.c), dist(t.c, t.a), dist(t.a, t.b)};
}

// Interior angle at each vertex, in input order (not sorted).
inline std::array<double, 3> vertex_angles(const Triangle& t) {
  auto at = [](Point v, Point p, Point q) {
    const Point u1 = p - v, u2 = q - v;
    return std::atan2(std::abs(cross(u1, u2)), dot(u1, u2));
  };
  return {at(t.a, t.b, t.c), at(t.b, t.c, t.a), at(t.c, t.a, t.b)};
}

// Sorted (ascending) interior angles; entries sum to pi.
inline std::array<double, 3> angle_triple(const Triangle& t) {
  auto ang = vertex_angles(t);
  std::sort(ang.begin(), ang.end());
  return ang;
}

// ---------------------------------------------------------------------------
// Polygons (m >= 3; a triangle is the m = 3 special case)

struct Polygon {
  std::vector<Point> v;

  explicit Polygon(std::vector<Point> verts, double degeneracy_tol = kDegeneracyTol)
      : v(std::move(verts)) {
    if (v.size() < 3) fail(Errc::degenerate_polygon, "needs at least 3 vertices");
    for (const Point& p : v)
      if (!finite(p)) fail(Errc::degenerate_polygon, "non-finite vertex");
    const double d = diameter();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point& p = v[i];
      const Point& q = v[(i + 1) % v.size()];
      if (!(dist(p, q) > degeneracy_tol * d))
        fail(Errc::degenerate_polygon, "consecutive vertices coincide within tolerance");
    }
  }

  std::size_t size() const { return v.size(); }

  double diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j)
        best = std::max(best, dist(v[i], v[j]));
    return best;
  }

  // Shoelace sum, evaluated relative to the first vertex so tiny figures
  // far from the origin do not lose their area to cancellation.
  double signed_area() const {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
      s += cross(v[i] - v[0], v[i + 1] - v[0]);
    return 0.5 * s;
  }

  double perimeter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += dist(v[i], v[(i + 1) % v.size()]);
    return s;
  }
};

using Figure = std::variant<Triangle, Polygon>;

inline std::vector<Point> figure_vertices(const Figure& f) {
  if (const auto* t = std::get_if<Triangle>(&f)) return {t->a, t->b, t->c};
  return std::get<Polygon>(f).v;
}

inline double signed_area(const Figure& f) {
  return std::visit([](const auto& g) { return g.signed_area(); }, f);
}

inline double perimeter(const Figure& f) {
  return std::visit([](const auto& g) { return g.perimeter(); }, f);
}

inline double figure_diameter(const Figure& f) {
  return std::visit([](const auto& g) { return g.diameter(); }, f);
}

inline Point vertex_centroid(std::span<const Point> pts) {
  Point s{0, 0};
  for (const Point& p : pts) s = s + p;
  return s / static_cast<double>(pts.size());
}

inline Point vertex_centroid(const Figure& f) {
  const auto pts = figure_vertices(f);
  return vertex_centroid(std::span<const Point>(pts));
}

// ---------------------------------------------------------------------------
// Barycentric coordinates (homogeneous weights w.r.t. a reference triangle)

struct BaryCoords {
  double u = 0.0, v = 0.0, w = 0.0;
};

inline BaryCoords to_barycentric(const Triangle& t, Point p) {
  const double s = cross(t.b - t.a, t.c - t.a);  // twice the area, > 0 after normalization
  return {cross(t.b - p, t.c - p) / s,
          cross(t.c - p, t.a - p) / s,
          cross(t.a - p, t.b - p) / s};
}

inline Point from_barycentric(const Triangle& t, const BaryCoords& b) {
  const double m = std::abs(b.u) + std::abs(b.v) + std::abs(b.w);
  const double s = b.u + b.v + b.w;
  if (!(m > 0) || std::abs(s) <= 1e-12 * m)
    fail(Errc::point_at_infinity, "barycentric weights sum to zero");
  return (t.a * b.u + t.b * b.v + t.c * b.w) / s;
}

// ---------------------------------------------------------------------------
// Classical circles and centers

inline Circle circumcircle(const Triangle& t) {
  const Point u = t.b - t.a, v = t.c - t.a;
  const double cr = cross(u, v);  // twice the area, nonzero by construction
  const double uu = norm2(u), vv = norm2(v);
  const Point rel{(uu * v.y - vv * u.y) / (2 * cr), (vv * u.x - uu * v.x) / (2 * cr)};
  return {t.a + rel, norm(rel)};
}

inline BaryCoords incenter_coords(const Triangle& t) {
  const auto s = side_lengths(t);
  return {s[0], s[1], s[2]};
}

inline Circle incircle(const Triangle& t) {
  const auto s = side_lengths(t);
  const Point center = from_barycentric(t, incenter_coords(t));
  const double r = 2.0 * std::abs(t.signed_area()) / (s[0] + s[1] + s[2]);
  return {center, r};
}

// Excenters opposite A, B, C: barycentrics (-a : b : c) and cyclic.
inline std::array<Point, 3> excenters(const Triangle& t) {
  const auto s = side_lengths(t);
  return {from_barycentric(t, {-s[0], s[1], s[2]}),
          from_barycentric(t, {s[0], -s[1], s[2]}),
          from_barycentric(t, {s[0], s[1], -s[2]})};
}

}  // namespace tunnel
