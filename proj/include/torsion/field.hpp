#pragma once

#include "torsion/types.hpp"

namespace torsion {

// Value, gradient and Hessian at one point.
struct Jet {
  double value = 0.0;
  Vec2 grad;
  Hessian hess;
};

// A smooth scalar field on the plane with exact first and second derivatives.
// Implementations must be immutable after construction; every method is safe
// to call concurrently.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual double value(double x, double y) const = 0;
  virtual Jet jet(double x, double y) const = 0;

  Vec2 gradient(double x, double y) const { return jet(x, y).grad; }
  Hessian hessian(double x, double y) const { return jet(x, y).hess; }
  double value(Vec2 p) const { return value(p.x, p.y); }
  Jet jet(Vec2 p) const { return jet(p.x, p.y); }
};

/// Torsion function of the disk of radius R centred at the origin,
/// u = (R^2 - x^2 - y^2) / 4. Its zero level set is the circle of radius R
/// and its level-set curvature there is exactly 1/R.
class DiskTorsionField final : public ScalarField {
 public:
  explicit DiskTorsionField(double radius = 1.0);

  double radius() const { return radius_; }

  using ScalarField::jet;
  using ScalarField::value;
  double value(double x, double y) const override;
  Jet jet(double x, double y) const override;

 private:
  double radius_;
};

}  // namespace torsion
