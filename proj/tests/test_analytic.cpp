#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "torsion/analytic.hpp"

using namespace torsion;

namespace {

RootConfig config(std::vector<double> roots, double eps) {
  RootConfig c;
  c.k = static_cast<int>(roots.size() / 2);
  c.roots = std::move(roots);
  c.epsilon = eps;
  return c;
}

const std::vector<double> kFour{-2.0, -1.0, 1.0, 2.0};

}  // namespace

TEST_CASE("poly_from_roots expands the monic product") {
  const std::vector<double> two{-1.0, 1.0};
  CHECK(poly_from_roots(two).a == std::vector<double>{-1.0, 0.0, 1.0});
  // (z^2 - 1)(z^2 - 4), expanded by hand.
  CHECK(poly_from_roots(kFour).a == std::vector<double>{4.0, 0.0, -5.0, 0.0, 1.0});

  const std::vector<double> odd{-3.7, -0.2, 0.9, 1.1, 4.0, 8.5};
  const PolyCoeffs p = poly_from_roots(odd);
  CHECK(p.degree() == 6);
  CHECK(p.a.back() == 1.0);
  for (double r : odd) CHECK(std::abs(p.evaluate(r)) < 1e-10);
}

TEST_CASE("poly_from_roots rejects unordered roots") {
  const std::vector<double> bad{1.0, -1.0};
  CHECK_THROWS_AS(poly_from_roots(bad), Error);
  const std::vector<double> dup{0.0, 0.0};
  CHECK_THROWS_AS(poly_from_roots(dup), Error);
}

TEST_CASE("RootConfig validation") {
  CHECK_NOTHROW(config(kFour, 1e-3).validate());
  CHECK_THROWS_AS(config({-1.0, 1.0}, 1e-3).validate(), Error);  // k < 2
  RootConfig c = config(kFour, 1e-3);
  c.epsilon = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = config(kFour, 1e-3);
  c.alpha = 2.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = config(kFour, 1e-3);
  c.h = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = config(kFour, 1e-3);
  c.k = 3;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(RootConfig::canonical_roots(3) == std::vector<double>{-5, -3, -1, 1, 3, 5});
}

TEST_CASE("eval_v") {
  const ImplicitField field(config(kFour, 0.01));
  for (double r : kFour) CHECK(eval_v(field, r, 0.0) == 0.0);
  CHECK(eval_v(field, 0.0, 0.0) == -4.0);

  // Degree two: F = 1 - z^2, so v = 1 - x^2 + y^2.
  const std::vector<double> two{-1.0, 1.0};
  CHECK(neg_poly_real_part(poly_from_roots(two), 2.0, 1.0) == -2.0);
}

TEST_CASE("eval_u") {
  const ImplicitField field(config(kFour, 0.01));
  CHECK(eval_u(field, 0.0, 0.0) == doctest::Approx(0.496).epsilon(1e-14));
  for (double r : kFour) CHECK(eval_u(field, r, 0.0) == 0.5);

  const ImplicitField strip = ImplicitField::strip_limit(kFour);
  for (double y : {-1.5, -1.0, 0.0, 0.3, 1.0}) {
    CHECK(eval_u(strip, 3.7, y) == doctest::Approx(0.5 - 0.5 * y * y).epsilon(1e-15));
  }
}

TEST_CASE("restriction identity u(x,0) = 1/2 + eps^alpha v(x,0)") {
  const ImplicitField field(config({-2.5, -0.7, 0.3, 1.9}, 3e-3));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xs(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = xs(rng);
    CHECK(eval_u(field, x, 0.0) == 0.5 + field.eps_alpha() * eval_v(field, x, 0.0));
    CHECK(field.restriction(x) == eval_v(field, x, 0.0));
  }
}

TEST_CASE("strip limit derivatives") {
  const ImplicitField strip = ImplicitField::strip_limit(kFour);
  const Vec2 g = grad_u(strip, 1.3, -0.4);
  CHECK(g.x == 0.0);
  CHECK(g.y == doctest::Approx(0.4));
  const Hessian h = hess_u(strip, 1.3, -0.4);
  CHECK(h.xx == 0.0);
  CHECK(h.xy == 0.0);
  CHECK(h.yy == -1.0);
}

TEST_CASE("harmonicity of v and -Laplacian(u) = 1") {
  const ImplicitField field(config({-2.0, -1.0, 0.5, 3.0, 4.0, 6.0}, 1e-3));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xs(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = xs(rng), y = xs(rng);
    const Jet vj = field.v_jet(x, y);
    const double vscale = std::abs(vj.hess.xx) + std::abs(vj.hess.xy) + std::abs(vj.hess.yy);
    CHECK(std::abs(vj.hess.trace()) <= 1e-9 * vscale);
    const Jet uj = field.jet(x, y);
    const double uscale =
        std::max(1.0, std::abs(uj.hess.xx) + std::abs(uj.hess.xy) + std::abs(uj.hess.yy));
    CHECK(std::abs(uj.hess.trace() + 1.0) <= 1e-9 * uscale);
  }
}

TEST_CASE("analytic derivatives agree with central differences") {
  const ImplicitField field(config(kFour, 0.01));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(-6.0, 6.0);
  const double h = 1e-5;
  auto u = [&](double x, double y) { return eval_u(field, x, y); };
  for (int i = 0; i < 100; ++i) {
    const double x = xs(rng), y = 0.4 * xs(rng);
    const Vec2 g = grad_u(field, x, y);
    const double fx = (u(x + h, y) - u(x - h, y)) / (2 * h);
    const double fy = (u(x, y + h) - u(x, y - h)) / (2 * h);
    const double gs = std::max(1.0, norm(g));
    CHECK(std::abs(fx - g.x) <= 1e-6 * gs);
    CHECK(std::abs(fy - g.y) <= 1e-6 * gs);

    const Hessian H = hess_u(field, x, y);
    auto gx = [&](double a, double b) { return grad_u(field, a, b).x; };
    auto gy = [&](double a, double b) { return grad_u(field, a, b).y; };
    const double hxx = (gx(x + h, y) - gx(x - h, y)) / (2 * h);
    const double hxy = (gx(x, y + h) - gx(x, y - h)) / (2 * h);
    const double hyx = (gy(x + h, y) - gy(x - h, y)) / (2 * h);
    const double hyy = (gy(x, y + h) - gy(x, y - h)) / (2 * h);
    const double hs = std::max(1.0, std::abs(H.xx) + std::abs(H.xy) + std::abs(H.yy));
    CHECK(std::abs(hxx - H.xx) <= 1e-6 * hs);
    CHECK(std::abs(hxy - H.xy) <= 1e-6 * hs);
    CHECK(std::abs(hyx - H.xy) <= 1e-6 * hs);
    CHECK(std::abs(hyy - H.yy) <= 1e-6 * hs);
  }
}

TEST_CASE("symmetric roots give an even field") {
  const ImplicitField field(config({-3.0, -1.5, 1.5, 3.0}, 2e-3));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(-8.0, 8.0);
  for (int i = 0; i < 200; ++i) {
    const double x = xs(rng), y = 0.3 * xs(rng);
    CHECK(std::abs(eval_v(field, x, y) - eval_v(field, -x, y)) <=
          1e-12 * std::max(1.0, std::abs(eval_v(field, x, y))));
    CHECK(std::abs(eval_u(field, x, y) - eval_u(field, -x, y)) <= 1e-12);
  }
}

TEST_CASE("curvature") {
  const DiskTorsionField disk;
  for (int i = 0; i < 64; ++i) {
    const double t = 2.0 * M_PI * i / 64.0;
    CHECK(std::abs(curvature(disk, std::cos(t), std::sin(t)) - 1.0) <= 1e-12);
  }
  const ImplicitField strip = ImplicitField::strip_limit(kFour);
  CHECK(curvature(strip, 0.7, 0.9) == 0.0);
  CHECK(curvature(strip, -4.0, -1.0) == 0.0);
  CHECK_THROWS_AS(curvature(strip, 0.7, 0.0), Error);
  CHECK_THROWS_AS(curvature(disk, 0.0, 0.0), Error);

  // Bottom boundary point (0, beta): negative, close to -6 eps.
  for (double eps : {1e-3, 1e-4}) {
    const ImplicitField field(config(kFour, eps));
    double lo = -1.5, hi = 0.0;  // u(0, lo) < 0 < u(0, hi)
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (lo + hi);
      (eval_u(field, 0.0, m) > 0.0 ? hi : lo) = m;
    }
    const double kappa = curvature(field, 0.0, hi);
    CHECK(kappa < 0.0);
    CHECK(kappa / eps == doctest::Approx(-6.0).epsilon(eps > 5e-4 ? 0.15 : 0.05));
  }
}

TEST_CASE("radial_derivative") {
  const ImplicitField field(config(kFour, 1e-3));
  CHECK(radial_derivative(field, -2.0, 0.0) == 0.0);
  const ImplicitField strip = ImplicitField::strip_limit(kFour);
  CHECK(radial_derivative(strip, -2.0, 5.0, 1.0) == -1.0);
  CHECK(radial_derivative(strip, -2.0, -7.0, -1.0) == -1.0);
}

TEST_CASE("predictions") {
  const AsymptoticPrediction p2 = predictions(config(kFour, 0.01));
  CHECK(p2.x_enclosure == doctest::Approx(7.400828044922853).epsilon(1e-13));
  CHECK(p2.rect.xmin == -p2.x_enclosure);
  CHECK(p2.rect.ymax == 1.5);
  CHECK(p2.rect.ymin == -1.5);
  CHECK(p2.zeta_minus == -p2.zeta_plus);
  // -f = x^4 - 5x^2 + 4 peaks at 0 on [-2, 2].
  CHECK(p2.sup_neg_f == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(p2.sup_neg_f_at) < 1e-6);
  CHECK(p2.eps_bound == doctest::Approx(0.25).epsilon(1e-12));

  const AsymptoticPrediction p4 = predictions(config(kFour, 1e-4));
  CHECK(p4.zeta_plus == doctest::Approx(7.0710678118654755).epsilon(1e-13));
}

TEST_CASE("restriction extrema") {
  const ImplicitField field(config(kFour, 1e-3));
  const RestrictionExtrema e = restriction_extrema(field);
  REQUIRE(e.maxima.size() == 2);
  REQUIRE(e.minima.size() == 1);
  // f = -(x^4 - 5x^2 + 4) peaks at +-sqrt(5/2) and dips at 0.
  CHECK(e.maxima[0] == doctest::Approx(-std::sqrt(2.5)).epsilon(1e-7));
  CHECK(e.maxima[1] == doctest::Approx(std::sqrt(2.5)).epsilon(1e-7));
  CHECK(std::abs(e.minima[0]) < 1e-7);
}

TEST_CASE("identities hold for random root configurations") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> ks(2, 4);
  std::uniform_real_distribution<double> gap(0.2, 2.0), start(-6.0, 0.0), logeps(-5.0, -2.0);
  std::uniform_real_distribution<double> xs(-10.0, 10.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = ks(rng);
    std::vector<double> roots{start(rng)};
    while (static_cast<int>(roots.size()) < 2 * k) roots.push_back(roots.back() + gap(rng));
    const ImplicitField field(config(roots, std::pow(10.0, logeps(rng))));
    CAPTURE(trial);
    // Horner rounding bound at a root: 2n u sum |a_j| |r|^j.
    const auto& a = field.coeffs().a;
    for (double r : roots) {
      double cond = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) cond += std::abs(a[j]) * std::pow(std::abs(r), j);
      const double bound = 2.0 * a.size() * 1.1102230246251565e-16 * cond * field.eps_alpha();
      CHECK(std::abs(field.value(r, 0.0) - 0.5) <= 1e-12 + bound);
    }
    for (int i = 0; i < 40; ++i) {
      const double x = xs(rng), y = 0.3 * xs(rng);
      CHECK(eval_u(field, x, 0.0) == 0.5 + field.eps_alpha() * eval_v(field, x, 0.0));
      const Jet uj = field.jet(x, y);
      const double scale = std::max(1.0, std::abs(uj.hess.xx) + std::abs(uj.hess.xy) + std::abs(uj.hess.yy));
      CHECK(std::abs(uj.hess.trace() + 1.0) <= 1e-9 * scale);
    }
  }
}
