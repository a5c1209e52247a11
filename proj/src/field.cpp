#include "torsion/field.hpp"

namespace torsion {

DiskTorsionField::DiskTorsionField(double radius) : radius_(radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidInput, "disk radius must be positive");
}

double DiskTorsionField::value(double x, double y) const {
  return 0.25 * (radius_ * radius_ - x * x - y * y);
}

Jet DiskTorsionField::jet(double x, double y) const {
  return {value(x, y), {-0.5 * x, -0.5 * y}, {-0.5, 0.0, -0.5}};
}

}  // namespace torsion
