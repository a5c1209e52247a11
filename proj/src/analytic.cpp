#include "torsion/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "torsion/numeric.hpp"

namespace torsion {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::InvalidInput, message);
}

void validate_roots(const std::vector<double>& roots, int k) {
  require(k >= 2, "k must be at least 2");
  require(roots.size() == static_cast<std::size_t>(2 * k), "expected exactly 2k roots");
  for (std::size_t i = 0; i < roots.size(); ++i) {
    require(std::isfinite(roots[i]), "roots must be finite");
    if (i > 0) require(roots[i - 1] < roots[i], "roots must be strictly increasing");
  }
}

}  // namespace

void RootConfig::validate() const {
  validate_roots(roots, k);
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  require(alpha > 1.0 && alpha < 2.0, "alpha must lie in (1, 2)");
  require(h > 0.0 && h < 1.0, "h must lie in (0, 1)");
}

std::vector<double> RootConfig::canonical_roots(int k) {
  require(k >= 2, "k must be at least 2");
  std::vector<double> roots;
  roots.reserve(2 * k);
  for (int j = k; j >= 1; --j) roots.push_back(-(2.0 * j - 1.0));
  for (int j = 1; j <= k; ++j) roots.push_back(2.0 * j - 1.0);
  return roots;
}

double PolyCoeffs::evaluate(double x) const {
  double acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * x + *it;
  return acc;
}

PolyCoeffs poly_from_roots(std::span<const double> roots) {
  for (std::size_t i = 1; i < roots.size(); ++i) {
    require(roots[i - 1] < roots[i], "roots must be strictly increasing");
  }
  // Multiply by (z - r) one root at a time.
  std::vector<double> a{1.0};
  for (double r : roots) {
    std::vector<double> next(a.size() + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      next[i + 1] += a[i];
      next[i] -= r * a[i];
    }
    a = std::move(next);
  }
  return {std::move(a)};
}

std::vector<double> derivative(std::span<const double> coeffs) {
  if (coeffs.size() <= 1) return {0.0};
  std::vector<double> d(coeffs.size() - 1);
  for (std::size_t i = 1; i < coeffs.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs[i];
  return d;
}

ImplicitField::ImplicitField(RootConfig config) : config_(std::move(config)) {
  config_.validate();
  coeffs_ = poly_from_roots(config_.roots);
  d1_ = derivative(coeffs_.a);
  eps_alpha_ = std::pow(config_.epsilon, config_.alpha);
}

ImplicitField::ImplicitField(RootConfig config, ZeroEpsilonTag) : config_(std::move(config)) {
  validate_roots(config_.roots, config_.k);
  config_.epsilon = 0.0;
  coeffs_ = poly_from_roots(config_.roots);
  d1_ = derivative(coeffs_.a);
  eps_alpha_ = 0.0;
}

ImplicitField ImplicitField::strip_limit(std::vector<double> roots) {
  RootConfig config;
  config.k = static_cast<int>(roots.size() / 2);
  config.roots = std::move(roots);
  return ImplicitField(std::move(config), ZeroEpsilonTag{});
}

void ImplicitField::horner(std::complex<double> z, std::complex<double>& p,
                           std::complex<double>& dp, std::complex<double>& ddp) const {
  const auto& a = coeffs_.a;
  p = a.back();
  dp = 0.0;
  ddp = 0.0;
  for (std::size_t i = a.size() - 1; i-- > 0;) {
    ddp = ddp * z + dp;
    dp = dp * z + p;
    p = p * z + a[i];
  }
  ddp *= 2.0;
}

double neg_poly_real_part(const PolyCoeffs& coeffs, double x, double y) {
  const std::complex<double> z(x, y);
  const auto& a = coeffs.a;
  std::complex<double> p = a.back();
  for (std::size_t i = a.size() - 1; i-- > 0;) p = p * z + a[i];
  return -p.real();
}

double ImplicitField::v(double x, double y) const { return neg_poly_real_part(coeffs_, x, y); }

double ImplicitField::restriction(double x) const { return -coeffs_.evaluate(x); }

double ImplicitField::restriction_derivative(double x) const {
  double acc = 0.0;
  for (auto it = d1_.rbegin(); it != d1_.rend(); ++it) acc = acc * x + *it;
  return -acc;
}

Jet ImplicitField::v_jet(double x, double y) const {
  std::complex<double> p, dp, ddp;
  horner({x, y}, p, dp, ddp);
  // F = -P; v = Re F, F' = v_x - i v_y, F'' = v_xx - i v_xy, v_yy = -v_xx.
  Jet j;
  j.value = -p.real();
  j.grad = {-dp.real(), dp.imag()};
  j.hess = {-ddp.real(), ddp.imag(), ddp.real()};
  return j;
}

double ImplicitField::value(double x, double y) const {
  const double eps = config_.epsilon;
  return ((0.5 - 0.5 * y * y) + eps * (y * y * y - 3.0 * x * x * y)) + eps_alpha_ * v(x, y);
}

Jet ImplicitField::jet(double x, double y) const {
  const double eps = config_.epsilon;
  const double e = eps_alpha_;
  const Jet vj = v_jet(x, y);
  Jet j;
  j.value = ((0.5 - 0.5 * y * y) + eps * (y * y * y - 3.0 * x * x * y)) + e * vj.value;
  j.grad.x = -6.0 * eps * x * y + e * vj.grad.x;
  j.grad.y = (-y + 3.0 * eps * (y * y - x * x)) + e * vj.grad.y;
  j.hess.xx = -6.0 * eps * y + e * vj.hess.xx;
  j.hess.xy = -6.0 * eps * x + e * vj.hess.xy;
  j.hess.yy = (-1.0 + 6.0 * eps * y) + e * vj.hess.yy;
  return j;
}

double eval_v(const ImplicitField& field, double x, double y) { return field.v(x, y); }
double eval_u(const ImplicitField& field, double x, double y) { return field.value(x, y); }
Vec2 grad_u(const ImplicitField& field, double x, double y) { return field.jet(x, y).grad; }
Hessian hess_u(const ImplicitField& field, double x, double y) { return field.jet(x, y).hess; }

double curvature(const Jet& j, double grad_tol) {
  const double gx = j.grad.x;
  const double gy = j.grad.y;
  const double g2 = gx * gx + gy * gy;
  const double g = std::sqrt(g2);
  if (!(g > grad_tol)) {
    std::ostringstream msg;
    msg << "level-set curvature undefined: |grad u| = " << g << " <= " << grad_tol;
    throw Error(ErrorKind::DegeneratePoint, msg.str());
  }
  const double num = j.hess.xx * gy * gy - 2.0 * j.hess.xy * gx * gy + j.hess.yy * gx * gx;
  return -num / (g2 * g);
}

double curvature(const ScalarField& field, double x, double y, double grad_tol) {
  return curvature(field.jet(x, y), grad_tol);
}

double radial_derivative(const ScalarField& field, double center_x, double x, double y) {
  const Vec2 g = field.gradient(x, y);
  return (x - center_x) * g.x + y * g.y;
}

double radial_derivative(const ImplicitField& field, double x, double y) {
  return radial_derivative(field, field.config().roots.front(), x, y);
}

AsymptoticPrediction predictions(const RootConfig& config) {
  config.validate();
  const double k = config.k;
  const double eps = config.epsilon;
  const double ea = std::pow(eps, config.alpha);

  AsymptoticPrediction p;
  p.x_enclosure = std::pow(3.0 / ea, 1.0 / (2.0 * k));
  p.rect = {-p.x_enclosure, p.x_enclosure, -(1.0 + config.h), 1.0 + config.h};
  p.zeta_plus = std::pow(3.0 / (k * (2.0 * k - 1.0) * std::pow(eps, config.alpha - 1.0)),
                         1.0 / (2.0 * k - 2.0));
  p.zeta_minus = -p.zeta_plus;
  p.tip_abscissa = std::pow(0.5 / ea, 1.0 / (2.0 * k));

  // -f is the monic product itself.
  const PolyCoeffs coeffs = poly_from_roots(config.roots);
  auto neg_f = [&](double x) { return coeffs.evaluate(x); };
  const auto [at, sup] = numeric::sampled_max(neg_f, config.roots.front(), config.roots.back(), 4096);
  p.sup_neg_f = sup;
  p.sup_neg_f_at = at;
  p.eps_bound = sup > 0.0 ? std::pow(1.0 / (2.0 * sup), 1.0 / config.alpha)
                          : std::numeric_limits<double>::infinity();
  return p;
}

RestrictionExtrema restriction_extrema(const ImplicitField& field) {
  const auto& r = field.config().roots;
  RestrictionExtrema out;
  auto f = [&](double x) { return field.restriction(x); };
  auto neg_f = [&](double x) { return -field.restriction(x); };
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (i % 2 == 0) {
      out.maxima.push_back(numeric::sampled_max(f, r[i], r[i + 1], 512).first);
    } else {
      out.minima.push_back(numeric::sampled_max(neg_f, r[i], r[i + 1], 512).first);
    }
  }
  return out;
}

}  // namespace torsion
