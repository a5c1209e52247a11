#include <cmath>
#include <numbers>

#include "doctest.h"
#include "torsion/pde.hpp"

using namespace torsion;
using namespace torsion::pde;

namespace {

const DiskTorsionField kDisk;

double disk_phi(double x, double y) { return kDisk.value(x, y); }

IrregularGrid disk_grid(double h) { return build_grid(disk_phi, {0.0, 0.0}, {-1, 1, -1, 1}, h); }

double max_error(const IrregularGrid& g, const DiscreteField& u, const ScalarField& exact) {
  double e = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) e = std::max(e, std::abs(u.values[k] - exact.value(g.nodes[k])));
  return e;
}

struct KTwo {
  RootConfig cfg;
  ImplicitField field;
  DomainExtract domain;
  KTwo() : cfg(make()), field(cfg), domain(extract_domain(field, default_window(cfg))) {}
  static RootConfig make() {
    RootConfig c;
    c.k = 2;
    c.roots = {-2.0, -1.0, 1.0, 2.0};
    c.epsilon = 1e-3;
    return c;
  }
};

}  // namespace

TEST_CASE("disk grid and torsion solve") {
  const IrregularGrid g = disk_grid(1.0 / 64);
  const double expected = std::numbers::pi * 64 * 64;
  CHECK(std::abs(static_cast<double>(g.size()) - expected) <= 0.02 * expected);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(disk_phi(g.nodes[k].x, g.nodes[k].y) > 0.0);
    for (double a : g.arm[k]) {
      CHECK(a > 0.0);
      CHECK(a <= 1.0);
    }
  }
  const DiscreteField u = solve_torsion(g);
  CHECK(u.residual <= 1e-9);
  CHECK(u.positive);
  CHECK(max_error(g, u, kDisk) <= 5e-4);
}

TEST_CASE("strip segment: exact arms and exact quadratic reproduction") {
  const ImplicitField strip = ImplicitField::strip_limit({-2.0, -1.0, 1.0, 2.0});
  const double a = 1.3;
  auto phi = [&](double x, double y) { return std::min(strip.value(x, y), a - std::abs(x)); };
  const IrregularGrid g = build_grid(phi, {0.0, 0.03}, {-a, a, -1, 1}, 0.1);
  int north_south = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int d = 0; d < 4; ++d) {
      if (g.neighbor[k][d] >= 0) continue;
      const Vec2 b = g.boundary_point(k, d);
      if (d == North || d == South) {
        ++north_south;
        CHECK(std::abs(std::abs(b.y) - 1.0) <= 1e-10);
      } else {
        CHECK(std::abs(std::abs(b.x) - a) <= 1e-10);
      }
    }
  }
  CHECK(north_south > 0);
  const DiscreteField u = solve_torsion(g, [&](Vec2 p) { return strip.value(p); });
  CHECK(u.residual <= 1e-9);
  CHECK(max_error(g, u, strip) <= 1e-12);
}

TEST_CASE("grid errors") {
  CHECK_THROWS_AS(disk_grid(0.0), Error);
  try {
    disk_grid(0.2);
    FAIL("expected a resolution error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Resolution);
  }
  const ImplicitField strip = ImplicitField::strip_limit({-2.0, -1.0, 1.0, 2.0});
  try {
    build_grid([&](double x, double y) { return strip.value(x, y); }, {0, 0}, {-2, 2, -1, 1}, 0.05);
    FAIL("expected an enclosure error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EnclosureViolation);
  }
  CHECK_THROWS_AS(build_grid(disk_phi, {5.0, 0.0}, {-1, 1, -1, 1}, 0.05), Error);
}

TEST_CASE("torsion on the constructed domain converges at second order") {
  const KTwo k2;
  const IrregularGrid g = build_grid(k2.domain, k2.field, 0.05);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(k2.field.value(g.nodes[k]) > 0.0);
    for (double a : g.arm[k]) CHECK((a > 0.0 && a <= 1.0));
  }
  const DiscreteField u = solve_torsion(g);
  CHECK(u.positive);
  CHECK(u.residual <= 1e-9);

  auto phi = [&](double x, double y) { return k2.field.value(x, y); };
  const OrderStudy s =
      torsion_order_study(phi, k2.domain.anchor, k2.domain.boundary.bounds(), k2.field, {0.1, 0.05, 0.025});
  REQUIRE(s.entries.size() == 3);
  CHECK(s.entries[2].max_error < s.entries[1].max_error);
  CHECK(s.entries[1].max_error < s.entries[0].max_error);
  CHECK(s.observed_order >= 1.8);
  CHECK(s.observed_order <= 2.2);
}

TEST_CASE("nonlinearities") {
  CHECK(nonlinearity_by_name("const").f(3.0) == 1.0);
  CHECK(nonlinearity_by_name("linear").f(3.0) == 4.0);
  CHECK(nonlinearity_by_name("exp").f_prime(0.0) == 1.0);
  CHECK_THROWS_AS(nonlinearity_by_name("cubic"), Error);
  Nonlinearity zero{"zero", [](double u) { return u; }, [](double) { return 1.0; }};
  CHECK_THROWS_AS(NonlinearProblem(zero, 1.0), Error);
  CHECK_THROWS_AS(NonlinearProblem(nonlinearity_by_name("exp"), 0.0), Error);
}

TEST_CASE("semilinear solves on the disk") {
  const IrregularGrid g = disk_grid(1.0 / 32);
  const DiscreteField u0 = solve_torsion(g);

  SUBCASE("f = c scales the torsion solution") {
    for (double c : {1.0, 2.5}) {
      const double lambda = 0.3;
      const DiscreteField u = solve_semilinear(g, NonlinearProblem(constant_nonlinearity(c), lambda));
      CHECK(u.residual <= 1e-9);
      for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(u.values[k] == doctest::Approx(c * lambda * u0.values[k]).epsilon(1e-9));
      }
    }
  }
  SUBCASE("exp at small lambda stays near the scaled torsion value") {
    const DiscreteField u = solve_semilinear(g, NonlinearProblem(nonlinearity_by_name("exp"), 0.1));
    CHECK(u.positive);
    CHECK(u.residual <= 1e-9);
    CHECK(std::abs(u.max_abs() - 0.025) <= 0.1 * 0.025);
  }
  SUBCASE("Gelfand problem beyond the extremal value") {
    try {
      solve_semilinear(g, NonlinearProblem(nonlinearity_by_name("exp"), 10.0));
      FAIL("expected no solution");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoSolution);
    }
  }
}

TEST_CASE("smallest eigenvalue") {
  const IrregularGrid g = disk_grid(1.0 / 64);
  const DiscreteField u0 = solve_torsion(g);
  const Semistability s = semistability(g, NonlinearProblem(constant_nonlinearity(1.0), 1.0), u0);
  CHECK(s.pass);
  CHECK(s.lambda_min > 0.0);
  const double j0sq = 5.7832;
  CHECK(std::abs(s.lambda_min - j0sq) <= 0.01 * j0sq);

  // A linearisation shifted past the first eigenvalue is not semi-stable.
  Nonlinearity steep{"steep", [](double) { return 1.0; }, [](double) { return 10.0; }};
  const Semistability t = semistability(g, NonlinearProblem(steep, 1.0), u0);
  CHECK(t.lambda_min == doctest::Approx(s.lambda_min - 10.0).epsilon(1e-6));
  CHECK_FALSE(t.pass);
}

TEST_CASE("convergence study") {
  const IrregularGrid disk = disk_grid(1.0 / 32);
  const std::vector<double> lambdas{0.2, 0.1, 0.05, 0.025};

  const ConvergenceStudy c = convergence_study(disk, nonlinearity_by_name("const"), lambdas, false);
  for (const auto& e : c.entries) CHECK(*e.sup_error <= 1e-14);
  CHECK(c.monotone);

  const ConvergenceStudy x = convergence_study(disk, nonlinearity_by_name("exp"), lambdas);
  CHECK(x.monotone);
  for (std::size_t i = 1; i < x.entries.size(); ++i) {
    const double ratio = *x.entries[i - 1].sup_error / *x.entries[i].sup_error;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.5);
    CHECK(x.entries[i].stability->pass);
  }

  const KTwo k2;
  const IrregularGrid g = build_grid(k2.domain, k2.field, 0.1);
  const ConvergenceStudy l = convergence_study(g, nonlinearity_by_name("linear"), lambdas, false);
  CHECK(l.monotone);
  CHECK(*l.entries.back().sup_error <= 0.05 * l.torsion_sup);

  const ConvergenceStudy e = convergence_study(g, nonlinearity_by_name("exp"), {0.05});
  CHECK(e.entries[0].stability->pass);

  const ConvergenceStudy bad = convergence_study(disk, nonlinearity_by_name("exp"), {10.0, 0.1}, false);
  CHECK_FALSE(bad.entries[0].error.empty());
  CHECK(bad.entries[1].sup_error.has_value());
  CHECK_FALSE(bad.monotone);
}
