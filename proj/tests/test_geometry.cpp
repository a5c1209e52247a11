#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "torsion/geometry.hpp"

using namespace torsion;

namespace {

const std::vector<double> kFour{-2.0, -1.0, 1.0, 2.0};

RootConfig config(double eps, std::vector<double> roots = kFour) {
  RootConfig c;
  c.k = static_cast<int>(roots.size() / 2);
  c.roots = std::move(roots);
  c.epsilon = eps;
  return c;
}

// Number of times the ray from c at angle t crosses the closed polygon.
int ray_crossings(const Contour& contour, Vec2 c, double t) {
  const Vec2 d{std::cos(t), std::sin(t)};
  const auto& v = contour.vertices;
  int hits = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i] - c;
    const Vec2 b = v[(i + 1) % v.size()] - c;
    const double ca = cross(d, a);
    const double cb = cross(d, b);
    if ((ca < 0.0) == (cb < 0.0)) continue;
    // Intersection of the ray with segment [a, b].
    const double s = ca / (ca - cb);
    const Vec2 p = a + s * (b - a);
    if (dot(p, d) > 0.0) ++hits;
  }
  return hits;
}

}  // namespace

TEST_CASE("strip level set is two open lines") {
  const ImplicitField strip = ImplicitField::strip_limit(kFour);
  const GridWindow w{-2.0, 2.0, -2.0, 2.0, 101, 101};
  const auto contours = extract_level_set(strip, 0.0, w, 1e-12);
  REQUIRE(contours.size() == 2);
  for (const Contour& c : contours) {
    CHECK_FALSE(c.closed);
    const double y0 = c.vertices.front().y;
    for (const Vec2& p : c.vertices) {
      CHECK(std::abs(std::abs(p.y) - 1.0) <= 1e-11);
      CHECK(p.y == doctest::Approx(y0));
      // Radial derivative about (x_1, 0) equals -y^2 = -1 on the lines.
      CHECK(radial_derivative(strip, -2.0, p.x, p.y) == doctest::Approx(-1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("disk level set is the unit circle, counterclockwise") {
  const DiskTorsionField disk;
  const GridWindow w{-1.3, 1.3, -1.3, 1.3, 64, 64};
  const double tol = 1e-12;
  const auto contours = extract_level_set(disk, 0.0, w, tol);
  REQUIRE(contours.size() == 1);
  const Contour& c = contours.front();
  CHECK(c.closed);
  CHECK(c.ccw);
  CHECK(c.size() >= 8);
  for (const Vec2& p : c.vertices) CHECK(std::abs(norm(p) - 1.0) <= 4 * tol);
  CHECK(c.signed_area() == doctest::Approx(M_PI).epsilon(2e-3));
}

TEST_CASE("contour vertices satisfy the refine tolerance") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> eps_log(-4.0, -2.5);
  std::uniform_real_distribution<double> level(0.0, 0.45);
  for (int trial = 0; trial < 6; ++trial) {
    const RootConfig cfg = config(std::pow(10.0, eps_log(rng)));
    const ImplicitField field(cfg);
    const GridWindow w = default_window(cfg, 512, 128);
    const double tol = 1e-11;
    const double lv = level(rng);
    for (const Contour& c : extract_level_set(field, lv, w, tol)) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(std::abs(field.value(c.vertices[i]) - lv) <= tol);
        if (i + 1 < c.size()) CHECK(distance(c.vertices[i], c.vertices[i + 1]) <= 2 * w.diagonal());
      }
    }
  }
}

TEST_CASE("extract_domain for k = 2, eps = 1e-3") {
  const RootConfig cfg = config(1e-3);
  const ImplicitField field(cfg);
  const AsymptoticPrediction pred = predictions(cfg);
  const DomainExtract d = extract_domain(field, default_window(cfg));
  CHECK(field.value(d.anchor) == 0.5);
  CHECK(d.boundary.closed);
  CHECK(d.boundary.ccw);
  const Rect b = d.boundary.bounds();
  CHECK(b.xmin > pred.rect.xmin);
  CHECK(b.xmax < pred.rect.xmax);
  CHECK(b.ymin > pred.rect.ymin);
  CHECK(b.ymax < pred.rect.ymax);
  // Whole segment [x_1, x_2k] x {0} lies inside (eps < eps_bound = 0.25).
  for (int s = 0; s <= 400; ++s) CHECK(d.contains({-2.0 + 4.0 * s / 400.0, 0.0}));
  const GridWindow& w = d.inside.window;
  for (int i = 0; i < w.nx; ++i) {
    const Vec2 p = w.node(i, w.ny / 2);
    if (p.x >= -2.0 && p.x <= 2.0) CHECK(d.inside.at(i, w.ny / 2) == 1);
  }
  CHECK(d.boundary.signed_area() == doctest::Approx(d.mask_area()).epsilon(0.02));
}

TEST_CASE("extract_domain errors") {
  const DiskTorsionField disk;
  const GridWindow w{-2.0, 2.0, -2.0, 2.0, 64, 64};
  try {
    extract_domain(disk, {1.5, 0.0}, w);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConstructionFailed);
  }
  const GridWindow small{-0.5, 0.5, -0.5, 0.5, 32, 32};
  try {
    extract_domain(disk, {0.0, 0.0}, small);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EnclosureViolation);
  }
  // At eps = 1e-2 the component around (x_1, 0) is not enclosed.
  const RootConfig cfg = config(1e-2);
  try {
    extract_domain(ImplicitField(cfg), default_window(cfg));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EnclosureViolation);
  }
}

TEST_CASE("boundary converges to the strip on a compact window") {
  double previous = 1e9;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const StripDistance s = strip_hausdorff(ImplicitField(config(eps)));
    CHECK(s.hausdorff < previous);
    previous = s.hausdorff;
  }
  CHECK(previous <= 0.02);
  const StripDistance exact = strip_hausdorff(ImplicitField::strip_limit(kFour));
  CHECK(exact.hausdorff <= 1e-9);
}

TEST_CASE("rectangle negativity") {
  const RootConfig c3 = config(1e-3);
  const RectNegativity r3 = check_rect_negativity(ImplicitField(c3), predictions(c3));
  CHECK(r3.pass);
  CHECK(r3.max_u < 0.0);

  const RootConfig big = config(1.0);
  CHECK_FALSE(check_rect_negativity(ImplicitField(big), predictions(big)).pass);

  // Vertical sides: u(+-x_eps, y) -> -5/2 - y^2/2. The leading correction is
  // -3 eps x_eps^2 y, so near the axis the match is already within 0.3 at
  // eps = 1e-4 and the full-side deviation shrinks with eps.
  const RootConfig c4 = config(1e-4);
  const ImplicitField f4(c4);
  const AsymptoticPrediction p4 = predictions(c4);
  for (int s = 0; s <= 200; ++s) {
    const double y = -0.5 + s / 200.0;
    for (double x : {-p4.x_enclosure, p4.x_enclosure}) {
      CHECK(std::abs(f4.value(x, y) + 2.5 + 0.5 * y * y) <= 0.3);
    }
  }
  double previous = 1e9;
  for (double eps : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const RootConfig c = config(eps);
    const RectNegativity r = check_rect_negativity(ImplicitField(c), predictions(c));
    CHECK(r.vertical_pass);
    CHECK(r.vertical_deviation < previous);
    previous = r.vertical_deviation;
  }
}

TEST_CASE("superlevel components at level 1/2") {
  const RootConfig cfg = config(1e-3);
  const ImplicitField field(cfg);
  const DomainExtract d = extract_domain(field, default_window(cfg));
  const ComponentCount cc = superlevel_component_count(field, 0.5, counting_window(d), &d);
  CHECK(cc.count >= 2);
  CHECK(cc.seeds.size() == static_cast<std::size_t>(cc.count));
  const RestrictionExtrema ex = restriction_extrema(field);
  const int a = cc.label_near({ex.maxima[0], 0.0});
  const int b = cc.label_near({ex.maxima[1], 0.0});
  CHECK(a >= 0);
  CHECK(b >= 0);
  CHECK(a != b);
  // The separating abscissa s_1 = 0 keeps u below 1/2 across the strip.
  for (int s = 0; s <= 10000; ++s) {
    const double y = -1.5 + 3.0 * s / 10000.0;
    CHECK(field.value(ex.minima[0], y) < 0.5);
  }
  // Doubling the starting resolution leaves the count unchanged.
  const ComponentCount fine =
      superlevel_component_count(field, 0.5, counting_window(d).doubled(), &d);
  CHECK(fine.count == cc.count);

  const ComponentCount none = superlevel_component_count(field, 1.0, counting_window(d), &d);
  CHECK(none.count == 0);
}

TEST_CASE("starshape certificate") {
  const RootConfig cfg = config(1e-3);
  const ImplicitField field(cfg);
  const DomainExtract d = extract_domain(field, default_window(cfg));
  const StarshapeCertificate s = starshape_certificate(d, field, -2.0);
  CHECK(s.pass);
  CHECK(s.max_radial_derivative < -0.5);
  for (int i = 0; i < 720; ++i) {
    CHECK(ray_crossings(d.boundary, {-2.0, 0.0}, 2.0 * M_PI * i / 720.0) == 1);
  }
  // Seen from far outside, the near side of the boundary faces the centre.
  const StarshapeCertificate far = starshape_certificate(d, field, 40.0);
  CHECK_FALSE(far.pass);
  CHECK(far.max_radial_derivative > 0.0);
}

TEST_CASE("curvature certificate") {
  SUBCASE("k = 2, eps = 1e-4") {
    const RootConfig cfg = config(1e-4);
    const ImplicitField field(cfg);
    const AsymptoticPrediction pred = predictions(cfg);
    const DomainExtract d = extract_domain(field, default_window(cfg));
    const CurvatureCertificate c = curvature_certificate(d, field, &pred);
    CHECK(c.pass);
    CHECK(c.zero_count == 2);
    CHECK(c.zero_count_refined == 2);
    REQUIRE(c.zero_locations.size() == 2);
    for (const Vec2& z : c.zero_locations) {
      CHECK(z.y == doctest::Approx(-1.0).epsilon(0.05));
      CHECK(std::abs(curvature(field, z.x, z.y)) <= 1e-8 * std::abs(c.max_curvature) * 10);
    }
    REQUIRE(c.zero_relative_errors.size() == 2);
    for (double e : c.zero_relative_errors) CHECK(e < 0.2);
    REQUIRE(c.bottom_curvature.has_value());
    CHECK(*c.bottom_curvature < 0.0);
    CHECK(c.min_curvature <= *c.bottom_curvature * (1.0 - 1e-9));
    CHECK(c.min_curvature == doctest::Approx(*c.bottom_curvature).epsilon(1e-3));
  }
  SUBCASE("disk") {
    const DiskTorsionField disk;
    const DomainExtract d = extract_domain(disk, {0.0, 0.0}, {-1.5, 1.5, -1.5, 1.5, 128, 128});
    const CurvatureCertificate c = curvature_certificate(d, disk);
    CHECK(c.zero_count == 0);
    CHECK_FALSE(c.pass);
    CHECK(c.min_curvature == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("min curvature trend") {
  const CurvatureTrend t = min_curvature_trend({config(5e-3), config(1e-3), config(1e-4)});
  CHECK(t.decreasing);
  for (const auto& e : t.entries) CHECK(e.min_curvature.has_value());

  CHECK(min_curvature_trend({config(1e-3)}).decreasing);

  // Increasing epsilon is the caller's mistake; the flag reports it.
  CHECK_FALSE(min_curvature_trend({config(1e-4), config(1e-3)}).decreasing);

  const CurvatureTrend failing = min_curvature_trend({config(1e-2), config(1e-3)});
  CHECK_FALSE(failing.decreasing);
  CHECK_FALSE(failing.entries[0].error.empty());
}
