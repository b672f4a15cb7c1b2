// Acceptance suite: one pass/fail line per criterion. Criteria 9 and 10
// exercise the command-line binary, whose path is argv[1]; everything else
// runs in process. Exit code 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "support/figures.hpp"
#include "tunnel/tunnel.hpp"

using namespace tunnel;
using testsupport::centered;
using testsupport::label_mismatch;
using testsupport::random_acute_triangle;
using testsupport::random_interior_point;
using testsupport::random_polygon;
using testsupport::random_similarity;
using testsupport::random_triangle;
using testsupport::Rng;
using testsupport::Similarity;

namespace {

std::string g_cli;
std::filesystem::path g_tmp;

struct Check {
  int failures = 0;
  int total = 0;
  std::string first_failure;

  void expect(bool ok, const std::string& what) {
    ++total;
    if (!ok) {
      ++failures;
      if (first_failure.empty()) first_failure = what;
    }
  }
  bool ok() const { return failures == 0 && total > 0; }
  std::string detail() const {
    char buf[160];
    if (ok()) {
      std::snprintf(buf, sizeof buf, "%d checks", total);
      return buf;
    }
    std::snprintf(buf, sizeof buf, "%d/%d failed; first: %s", failures, total,
                  first_failure.c_str());
    return buf;
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string tmp_file(const std::string& name) { return (g_tmp / name).string(); }

// --------------------------------------------------------------------------

// Medial tunnel ground truth: constant ratios 1/4 and 1/2, centers pinned to
// the initial centroid, classification converges there. Random shape, scale
// and rotation; the centroid sits at the origin because stored coordinates
// quantize at the collapse point's magnitude and would hide the 1e-12
// identity for an off-origin limit.
Check criterion_1() {
  Check c;
  Rng rng(9001);
  for (int i = 0; i < 100; ++i) {
    const Triangle t = testsupport::random_centered_triangle(rng);
    const double d = t.diameter();
    const Point g = centroid(t);
    const TunnelTrace trace = run(Figure{t}, {TransformKind::medial});
    c.expect(trace.termination.kind == Termination::Kind::collapsed, "medial not collapsed");
    for (const TunnelStep& s : trace.steps) {
      c.expect(std::abs(s.area_ratio - 0.25) < 1e-12, "alpha != 1/4");
      c.expect(std::abs(s.perimeter_ratio - 0.5) < 1e-12, "beta != 1/2");
      c.expect(dist(s.center, g) < 1e-12 * d, "center left the centroid");
    }
    c.expect(trace.classification.kind == Classification::Kind::converges_to_point,
             "not classified as point convergence");
    c.expect(trace.classification.limit && dist(*trace.classification.limit, g) < 1e-9 * d,
             "limit point is not the centroid");
  }
  return c;
}

// Inverse pairs: medial after anticomplementary, pedal after antipedal,
// cevian feet inside the anticevian triangle.
Check criterion_2() {
  Check c;
  Rng rng(9002);
  for (int i = 0; i < 100; ++i) {
    const Triangle t = random_triangle(rng);
    const double d = t.diameter();
    c.expect(label_mismatch(medial(anticomplementary(t)), t) < 1e-9 * d,
             "medial(anticomplementary) != id");
    const Point p = random_interior_point(rng, t);
    c.expect(label_mismatch(pedal(antipedal(t, p), p), t) < 1e-9 * d,
             "pedal(antipedal) != id");
    const Triangle anti = anticevian_triangle(t, to_barycentric(t, p));
    c.expect(label_mismatch(cevian_triangle(anti, to_barycentric(anti, p)), t) < 1e-9 * d,
             "cevian feet in anticevian != id");
  }
  return c;
}

// Known coincidences on random acute triangles.
Check criterion_3() {
  Check c;
  Rng rng(9003);
  for (int i = 0; i < 1000; ++i) {
    const Triangle t = random_acute_triangle(rng);
    const double d = t.diameter();
    c.expect(label_mismatch(pedal(t, orthocenter(t)), orthic(t)) < 1e-9 * d,
             "pedal(H) != orthic");
    c.expect(label_mismatch(pedal(t, circumcircle(t).center), medial(t)) < 1e-9 * d,
             "pedal(O) != medial");
    const Triangle tang = tangential(t);
    c.expect(label_mismatch(antipedal(t, circumcircle(t).center), tang) <
                 1e-9 * tang.diameter(),
             "antipedal(O) != tangential");
    const Triangle anti = anticomplementary(t);
    c.expect(label_mismatch(anticevian_triangle(t, {1, 1, 1}), anti) < 1e-9 * anti.diameter(),
             "anticevian(G) != anticomplementary");
    const Triangle exc = excentral(t);
    c.expect(label_mismatch(anticevian_triangle(t, incenter_coords(t)), exc) <
                 1e-9 * exc.diameter(),
             "anticevian(I) != excentral");
    c.expect(label_mismatch(cevian_triangle(t, {1, 1, 1}), medial(t)) < 1e-9 * d,
             "cevian(G) != medial");
    c.expect(label_mismatch(nedian_exterior(t, 1.0), medial(t)) < 1e-9 * d,
             "nedian(r=1) != medial");
    c.expect(label_mismatch(beta_nedian(t, kPi / 2, NedianVariant::exterior), orthic(t)) <
                 1e-9 * d,
             "beta(pi/2) != orthic");
  }
  return c;
}

// Routh's area ratio for interior nedian triangles.
Check criterion_4() {
  Check c;
  Rng rng(9004);
  auto routh = [](double r) {
    const double num = r * r * r - 1, den = r * r + r + 1;
    return num * num / (den * den * den);
  };
  c.expect(std::abs(routh(0.5) - 1.0 / 7.0) < 1e-15, "routh(1/2) != 1/7");
  const double ratios[] = {1.0 / 3.0, 0.5, 2.0, 3.0, 5.0};
  for (int i = 0; i < 100; ++i) {
    const Triangle t = random_triangle(rng);
    for (double r : ratios) {
      const double got =
          std::abs(nedian_interior(t, r).signed_area()) / std::abs(t.signed_area());
      c.expect(std::abs(got - routh(r)) < 1e-10, "Routh ratio off at r=" + std::to_string(r));
    }
  }
  return c;
}

// Angle maps of the orthic, tangential, contact and excentral triangles.
Check criterion_5() {
  Check c;
  Rng rng(9005);
  for (int i = 0; i < 1000; ++i) {
    const Triangle t = random_acute_triangle(rng);
    const auto base = angle_triple(t);
    std::array<double, 3> doubled = {kPi - 2 * base[0], kPi - 2 * base[1], kPi - 2 * base[2]};
    std::array<double, 3> halved = {kPi / 2 - base[0] / 2, kPi / 2 - base[1] / 2,
                                    kPi / 2 - base[2] / 2};
    std::sort(doubled.begin(), doubled.end());
    std::sort(halved.begin(), halved.end());
    const auto ortho = angle_triple(orthic(t));
    const auto tangent = angle_triple(tangential(t));
    const auto touch = angle_triple(contact(t));
    const auto exc = angle_triple(excentral(t));
    for (int k = 0; k < 3; ++k) {
      c.expect(std::abs(ortho[k] - doubled[k]) < 1e-9, "orthic angle map");
      c.expect(std::abs(tangent[k] - doubled[k]) < 1e-9, "tangential angle map");
      c.expect(std::abs(touch[k] - halved[k]) < 1e-9, "contact angle map");
      c.expect(std::abs(exc[k] - halved[k]) < 1e-9, "excentral angle map");
    }
  }
  return c;
}

// Contact and excentral tunnels drive the shape to equilateral at rate 1/2.
Check criterion_6() {
  Check c;
  Rng rng(9006);
  for (TransformKind kind : {TransformKind::contact, TransformKind::excentral}) {
    for (int i = 0; i < 100; ++i) {
      const Triangle t = random_triangle(rng);
      StopCriteria stop;
      stop.max_steps = 60;
      stop.collapse_tol = 1e-30;
      stop.blowup_factor = 1e30;
      const TunnelTrace trace = run(Figure{t}, TransformSpec{kind}, stop);

      std::vector<double> devs;
      bool reached = false;
      for (const TunnelStep& s : trace.steps) {
        double dev = 0;
        for (double ang : s.shape) dev = std::max(dev, std::abs(ang - kPi / 3));
        if (dev < 1e-6) {
          reached = true;
          break;
        }
        devs.push_back(dev);
      }
      c.expect(reached, "angle deviation did not reach 1e-6 within 60 steps");
      if (devs.size() >= 5) {
        const RateFit fit = fit_geometric_rate(devs, static_cast<int>(devs.size()));
        c.expect(fit.ok && std::abs(fit.rate - 0.5) < 1e-3,
                 "shape decay rate not 0.5 +- 1e-3");
      }
    }
  }
  return c;
}

// Cyclocevian conjugation: the orthocenter maps to the centroid and the
// Gergonne point is fixed (treating tangency as a double intersection).
Check criterion_7() {
  Check c;
  Rng rng(9007);
  for (int i = 0; i < 100; ++i) {
    const Triangle t = random_acute_triangle(rng);
    const double d = t.diameter();
    const auto via_h = cyclocevian_pair(t, to_barycentric(t, orthocenter(t)));
    c.expect(dist(from_barycentric(t, via_h.conjugate), centroid(t)) < 1e-8 * d,
             "conjugate of H is not G");
    c.expect(label_mismatch(via_h.triangle, medial(t)) < 1e-8 * d,
             "cyclocevian(H) != medial");
    const auto via_ge = cyclocevian_pair(t, gergonne_coords(t));
    c.expect(label_mismatch(via_ge.triangle, contact(t)) < 1e-7 * d,
             "cyclocevian(Gergonne) != contact");
  }
  return c;
}

// Polygon constructions: Varignon behavior of midpoint polygons, the unit
// square's perpendicular feet, and midpoint tunnels converging to the
// vertex centroid.
Check criterion_8() {
  Check c;
  Rng rng(9008);
  for (int i = 0; i < 100; ++i) {
    const Polygon p = random_polygon(rng, rng.uniform_int(4, 9));
    const Polygon mid = polygon_midpoint_cevian(p, 1);
    c.expect(dist(vertex_centroid(Figure{p}), vertex_centroid(Figure{mid})) <
                 1e-12 * p.diameter(),
             "midpoint polygon moved the vertex centroid");
  }
  for (int i = 0; i < 100; ++i) {
    const Polygon q = random_polygon(rng, 4);
    const Polygon mid = polygon_midpoint_cevian(q, 1);
    c.expect(dist(mid.v[1] - mid.v[0], mid.v[2] - mid.v[3]) < 1e-12 * q.diameter() &&
                 dist(mid.v[2] - mid.v[1], mid.v[3] - mid.v[0]) < 1e-12 * q.diameter(),
             "midpoint quadrilateral is not a parallelogram");
  }
  {
    const Polygon square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const Polygon feet = polygon_perp_foot(square, 1);
    c.expect(testsupport::cyclic_mismatch(feet, square) < 1e-12,
             "perp feet of the unit square are not the square");
  }
  for (int m : {4, 5, 7}) {
    const Polygon p = random_polygon(rng, m);
    StopCriteria stop;
    stop.max_steps = 400;
    const TunnelTrace trace = run(Figure{p}, {TransformKind::polygon_midpoint_cevian}, stop);
    c.expect(trace.classification.kind == Classification::Kind::converges_to_point,
             "midpoint tunnel did not converge");
    c.expect(trace.classification.limit &&
                 dist(*trace.classification.limit, vertex_centroid(Figure{p})) <
                     1e-9 * p.diameter(),
             "midpoint tunnel limit is not the vertex centroid");
  }
  return c;
}

// Degeneracies are findings, not failures: exit code 0 and a recorded
// termination through the CLI.
Check criterion_9() {
  Check c;
  struct Case {
    const char* name;
    std::string args;
    Errc expected;
  };
  const std::string right = "0,0 1,0 0,1";
  char pedal_point[64];
  {
    // a point on the circumcircle of the right triangle above
    const double r = std::sqrt(0.5);
    std::snprintf(pedal_point, sizeof pedal_point, "%.17g,%.17g", 0.5 + r * std::cos(0.3),
                  0.5 + r * std::sin(0.3));
  }
  const Case cases[] = {
      {"orthic", "--transform orthic --figure \"" + right + "\"", Errc::right_angle_degenerate},
      {"tangential", "--transform tangential --figure \"" + right + "\"",
       Errc::right_angle_degenerate},
      {"pedal", "--transform pedal --point " + std::string(pedal_point) + " --figure \"" +
                    right + "\"",
       Errc::simson_degenerate},
      {"nedian", "--transform nedian_interior --ratio 1 --figure \"" + right + "\"",
       Errc::concurrent_nedians},
  };
  int idx = 0;
  for (const Case& k : cases) {
    const std::string out = tmp_file("degenerate_" + std::to_string(idx++) + ".json");
    const int rc = run_cli("run " + k.args + " --out " + out);
    c.expect(rc == 0, std::string(k.name) + ": exit code " + std::to_string(rc));
    if (rc != 0) continue;
    const ParsedTrace parsed = parse_trace(read_file(out));
    c.expect(parsed.trace.termination.kind == Termination::Kind::degenerate,
             std::string(k.name) + ": not degenerate");
    c.expect(parsed.trace.termination.error == k.expected,
             std::string(k.name) + ": wrong error");
    c.expect(parsed.trace.termination.at_step == 1, std::string(k.name) + ": wrong step");
  }
  return c;
}

// Byte determinism of run outputs, and a 1-degree medial sweep over the
// acute simplex that is identical across thread counts and fast.
Check criterion_10() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  // the same invocation, run twice, with the bytes captured in between
  const std::string j = tmp_file("det.json"), csv = tmp_file("det.csv"),
                    svg = tmp_file("det.svg");
  const std::string invocation = "run --transform medial --figure \"0.1,0.2 3.7,0.05 1.3,2.9\" "
                                 "--steps 25 --out " +
                                 j + " --csv " + csv + " --svg " + svg;
  c.expect(run_cli(invocation) == 0, "run 1 failed");
  const std::string json_a = read_file(j), csv_a = read_file(csv), svg_a = read_file(svg);
  c.expect(run_cli(invocation) == 0, "run 2 failed");
  c.expect(json_a == read_file(j), "JSON bytes differ between runs");
  c.expect(csv_a == read_file(csv), "CSV bytes differ between runs");
  c.expect(svg_a == read_file(svg), "SVG bytes differ between runs");

  const std::string sw1 = tmp_file("sweep_1.csv"), sw4 = tmp_file("sweep_4.csv");
  c.expect(run_cli("sweep --transform medial --grid-step 1 --region acute --steps 20 "
                   "--jobs 1 --out " +
                   sw1) == 0,
           "sweep jobs=1 failed");
  c.expect(run_cli("sweep --transform medial --grid-step 1 --region acute --steps 20 "
                   "--jobs 4 --out " +
                   sw4) == 0,
           "sweep jobs=4 failed");
  const std::string bytes1 = read_file(sw1);
  c.expect(bytes1 == read_file(sw4), "sweep bytes differ across parallelism");
  c.expect(bytes1.find("converges_to_point") != std::string::npos, "sweep found no convergence");

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(elapsed < 60.0, "determinism criterion exceeded 60 s");
  return c;
}

// Similarity equivariance for every transform; affine equivariance for the
// affine-natural subset.
Check criterion_11() {
  Check c;
  Rng rng(9011);
  const ApplyOptions lax{kDegeneracyTol, kAngleTol, true};

  for (int i = 0; i < 200; ++i) {
    const Triangle t = random_acute_triangle(rng);
    const Similarity s = random_similarity(rng);
    const Triangle ts = Triangle(s(t.a), s(t.b), s(t.c));
    const double sd = ts.diameter();
    const Point p = random_interior_point(rng, t);

    auto same = [&](const Triangle& base, const Triangle& mapped, const char* what) {
      const Triangle moved(s(base.a), s(base.b), s(base.c));
      const double scale = std::max(sd, mapped.diameter());
      c.expect(label_mismatch(moved, mapped) < 1e-9 * scale, std::string("similarity: ") + what);
    };
    same(orthic(t), orthic(ts), "orthic");
    same(medial(t), medial(ts), "medial");
    same(anticomplementary(t), anticomplementary(ts), "anticomplementary");
    same(incentral(t), incentral(ts), "incentral");
    same(contact(t), contact(ts), "contact");
    same(excentral(t), excentral(ts), "excentral");
    same(tangential(t), tangential(ts), "tangential");
    same(symmedial(t), symmedial(ts), "symmedial");
    same(cevian_triangle(t, to_barycentric(t, p)), cevian_triangle(ts, to_barycentric(ts, s(p))),
         "cevian");
    same(anticevian_triangle(t, to_barycentric(t, p)),
         anticevian_triangle(ts, to_barycentric(ts, s(p))), "anticevian");
    same(pedal(t, p), pedal(ts, s(p)), "pedal");
    same(antipedal(t, p), antipedal(ts, s(p)), "antipedal");
    same(cyclocevian(t, to_barycentric(t, p)), cyclocevian(ts, to_barycentric(ts, s(p))),
         "cyclocevian");
    same(nedian_interior(t, 2.0), nedian_interior(ts, 2.0), "nedian_interior");
    same(nedian_exterior(t, 0.7), nedian_exterior(ts, 0.7), "nedian_exterior");
    const double alpha = 0.5 * angle_triple(t)[0];
    same(alpha_nedian(t, alpha, NedianVariant::interior),
         alpha_nedian(ts, alpha, NedianVariant::interior), "alpha_interior");
    same(alpha_nedian(t, alpha, NedianVariant::exterior),
         alpha_nedian(ts, alpha, NedianVariant::exterior), "alpha_exterior");
    same(beta_nedian(t, 1.2, NedianVariant::interior, lax),
         beta_nedian(ts, 1.2, NedianVariant::interior, lax), "beta_interior");
    same(beta_nedian(t, 1.2, NedianVariant::exterior, lax),
         beta_nedian(ts, 1.2, NedianVariant::exterior, lax), "beta_exterior");

    const Polygon q = random_polygon(rng, 4 + (i % 5));
    std::vector<Point> moved;
    for (const Point& v : q.v) moved.push_back(s(v));
    const Polygon qs(moved);
    auto same_poly = [&](const Polygon& base, const Polygon& mapped, const char* what) {
      double worst = 0;
      for (std::size_t k = 0; k < base.size(); ++k)
        worst = std::max(worst, dist(s(base.v[k]), mapped.v[k]));
      c.expect(worst < 1e-9 * qs.diameter(), std::string("similarity: ") + what);
    };
    same_poly(polygon_perp_foot(q, 1, lax), polygon_perp_foot(qs, 1, lax), "perp_foot");
    same_poly(polygon_midpoint_cevian(q, 1), polygon_midpoint_cevian(qs, 1), "midpoint");
  }

  for (int i = 0; i < 200; ++i) {
    const Triangle t = random_triangle(rng);
    // orientation-preserving affine map
    double m00, m01, m10, m11;
    do {
      m00 = rng.uniform(-2, 2);
      m01 = rng.uniform(-2, 2);
      m10 = rng.uniform(-2, 2);
      m11 = rng.uniform(-2, 2);
    } while (m00 * m11 - m01 * m10 < 0.3 || m00 * m11 - m01 * m10 > 5.0);
    const Point shift{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    auto f = [&](Point v) {
      return Point{m00 * v.x + m01 * v.y + shift.x, m10 * v.x + m11 * v.y + shift.y};
    };
    const Triangle tf(f(t.a), f(t.b), f(t.c));
    const double fd = tf.diameter();
    const Point p = random_interior_point(rng, t);

    auto same = [&](const Triangle& base, const Triangle& mapped, const char* what) {
      const Triangle moved(f(base.a), f(base.b), f(base.c));
      const double scale = std::max(fd, mapped.diameter());
      c.expect(label_mismatch(moved, mapped) < 1e-9 * scale, std::string("affine: ") + what);
    };
    same(medial(t), medial(tf), "medial");
    same(anticomplementary(t), anticomplementary(tf), "anticomplementary");
    same(cevian_triangle(t, to_barycentric(t, p)), cevian_triangle(tf, to_barycentric(tf, f(p))),
         "cevian");
    same(anticevian_triangle(t, to_barycentric(t, p)),
         anticevian_triangle(tf, to_barycentric(tf, f(p))), "anticevian");
    same(nedian_interior(t, 0.4), nedian_interior(tf, 0.4), "nedian_interior");
    same(nedian_exterior(t, 2.5), nedian_exterior(tf, 2.5), "nedian_exterior");

    const Polygon q = random_polygon(rng, 4 + (i % 4));
    std::vector<Point> mv;
    for (const Point& v : q.v) mv.push_back(f(v));
    const Polygon qf(mv);
    const Polygon base = polygon_midpoint_cevian(q, 1);
    const Polygon mapped = polygon_midpoint_cevian(qf, 1);
    double worst = 0;
    for (std::size_t k = 0; k < base.size(); ++k)
      worst = std::max(worst, dist(f(base.v[k]), mapped.v[k]));
    c.expect(worst < 1e-9 * qf.diameter(), "affine: midpoint polygon");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
    return 2;
  }
  g_cli = argv[1];
  g_tmp = std::filesystem::current_path() / "acceptance_tmp";
  std::error_code ec;
  std::filesystem::remove_all(g_tmp, ec);
  std::filesystem::create_directories(g_tmp);

  struct Criterion {
    int index;
    const char* title;
    Check (*fn)();
  };
  const Criterion criteria[] = {
      {1, "medial tunnel ground truth (ratios 1/4 and 1/2, centroid fixed)", criterion_1},
      {2, "inverse-pair identities", criterion_2},
      {3, "coincidence suite on 1000 random acute triangles", criterion_3},
      {4, "Routh area ratio for interior nedian triangles", criterion_4},
      {5, "angle-map oracles on 1000 random acute triangles", criterion_5},
      {6, "contact/excentral shape convergence at rate 1/2", criterion_6},
      {7, "cyclocevian conjugation (orthocenter -> centroid, Gergonne fixed)", criterion_7},
      {8, "polygon constructions and midpoint tunnels", criterion_8},
      {9, "degeneracies are findings with exit code 0 (CLI)", criterion_9},
      {10, "byte determinism of run and sweep outputs (CLI)", criterion_10},
      {11, "similarity and affine equivariance suites", criterion_11},
  };

  int failed = 0;
  for (const Criterion& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const Check result = cr.fn();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d. %s (%s, %.2fs)\n", result.ok() ? "PASS" : "FAIL", cr.index, cr.title,
                result.detail().c_str(), secs);
    std::fflush(stdout);
    if (!result.ok()) ++failed;
  }
  if (failed) {
    std::printf("%d criterion(s) failed\n", failed);
    return 1;
  }
  std::printf("all %zu criteria passed\n", std::size(criteria));
  return 0;
}
