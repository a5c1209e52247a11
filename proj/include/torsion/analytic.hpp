#pragma once

#include <complex>
#include <span>
#include <vector>

#include "torsion/field.hpp"
#include "torsion/types.hpp"

namespace torsion {

/// Construction parameters of the multi-peak torsion function
///
///   u(x, y) = 1/2 - y^2/2 + eps (y^3 - 3 x^2 y) + eps^alpha Re F(x + i y),
///   F(z)    = -prod_i (z - roots[i]).
struct RootConfig {
  int k = 2;
  std::vector<double> roots;
  double epsilon = 1e-3;
  double alpha = 1.5;
  double h = 0.5;

  // Throws Error(InvalidInput) on any violated invariant.
  void validate() const;

  /// Roots +-1, +-3, ..., +-(2k-1).
  static std::vector<double> canonical_roots(int k);
};

// Coefficients of the monic polynomial prod (z - x_i), lowest degree first.
struct PolyCoeffs {
  std::vector<double> a;

  int degree() const { return static_cast<int>(a.size()) - 1; }
  double evaluate(double x) const;
};

PolyCoeffs poly_from_roots(std::span<const double> roots);

// Re F(x + iy) with F = -sum a_i z^i, by complex Horner evaluation.
double neg_poly_real_part(const PolyCoeffs& coeffs, double x, double y);

// Lowest-degree-first coefficients of the derivative.
std::vector<double> derivative(std::span<const double> coeffs);

class ImplicitField final : public ScalarField {
 public:
  explicit ImplicitField(RootConfig config);

  /// The eps -> 0 limit 1/2 - y^2/2 built from the same root set. This is the
  /// only way to obtain epsilon == 0.
  static ImplicitField strip_limit(std::vector<double> roots);

  const RootConfig& config() const { return config_; }
  const PolyCoeffs& coeffs() const { return coeffs_; }
  double eps_alpha() const { return eps_alpha_; }

  /// v = Re F.
  double v(double x, double y) const;
  /// f = F restricted to the real axis.
  double restriction(double x) const;
  double restriction_derivative(double x) const;
  Jet v_jet(double x, double y) const;

  double value(double x, double y) const override;
  Jet jet(double x, double y) const override;
  using ScalarField::jet;
  using ScalarField::value;

 private:
  struct ZeroEpsilonTag {};
  ImplicitField(RootConfig config, ZeroEpsilonTag);

  // Returns P(z), P'(z), P''(z) for the monic product polynomial P = -F.
  void horner(std::complex<double> z, std::complex<double>& p, std::complex<double>& dp,
              std::complex<double>& ddp) const;

  RootConfig config_;
  PolyCoeffs coeffs_;
  std::vector<double> d1_;
  double eps_alpha_ = 0.0;
};

double eval_v(const ImplicitField& field, double x, double y);
double eval_u(const ImplicitField& field, double x, double y);
Vec2 grad_u(const ImplicitField& field, double x, double y);
Hessian hess_u(const ImplicitField& field, double x, double y);

inline constexpr double kDefaultGradientTolerance = 1e-10;

/// Signed curvature of the level curve through (x, y),
///   -(u_xx u_y^2 - 2 u_xy u_x u_y + u_yy u_x^2) / |grad u|^3,
/// positive where the superlevel side is locally convex.
/// Throws Error(DegeneratePoint) when |grad u| <= grad_tol.
double curvature(const ScalarField& field, double x, double y,
                 double grad_tol = kDefaultGradientTolerance);
double curvature(const Jet& jet, double grad_tol = kDefaultGradientTolerance);

/// (x - center_x) u_x + y u_y.
double radial_derivative(const ScalarField& field, double center_x, double x, double y);
double radial_derivative(const ImplicitField& field, double x, double y);

struct Rect {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

struct AsymptoticPrediction {
  double x_enclosure = 0.0;  // (3 / eps^alpha)^(1/2k)
  Rect rect;                 // [-x_enclosure, x_enclosure] x [-(1+h), 1+h]
  double zeta_minus = 0.0;
  double zeta_plus = 0.0;    // (3 / (k (2k-1) eps^(alpha-1)))^(1/(2k-2))
  double sup_neg_f = 0.0;    // sup of -f over [x_1, x_2k]
  double sup_neg_f_at = 0.0;
  double eps_bound = 0.0;    // (1 / (2 sup(-f)))^(1/alpha)
  double tip_abscissa = 0.0; // (1/2)^(1/2k) eps^(-alpha/2k), boundary extent on y = 0
};

AsymptoticPrediction predictions(const RootConfig& config);

// Interior extrema of f between consecutive roots. maxima[j] lies in
// (x_{2j+1}, x_{2j+2}) for j = 0..k-1 and minima[j] in (x_{2j+2}, x_{2j+3})
// for j = 0..k-2 (1-based root indices).
struct RestrictionExtrema {
  std::vector<double> maxima;
  std::vector<double> minima;
};

RestrictionExtrema restriction_extrema(const ImplicitField& field);

}  // namespace torsion
