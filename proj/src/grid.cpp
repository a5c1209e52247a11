#include "torsion/grid.hpp"

#include <cmath>

#include "torsion/parallel.hpp"

namespace torsion {

void GridWindow::validate() const {
  if (!(xmax > xmin) || !(ymax > ymin) || !std::isfinite(xmin) || !std::isfinite(xmax) ||
      !std::isfinite(ymin) || !std::isfinite(ymax)) {
    throw Error(ErrorKind::InvalidInput, "grid window is degenerate");
  }
  if (nx < 16 || ny < 16) throw Error(ErrorKind::InvalidInput, "grid needs at least 16x16 samples");
}

double GridWindow::diagonal() const { return std::hypot(dx(), dy()); }

GridWindow GridWindow::doubled() const {
  GridWindow w = *this;
  w.nx = 2 * nx;
  w.ny = 2 * ny;
  return w;
}

GridWindow GridWindow::around(const Rect& r, double inflate, int nx, int ny) {
  const double cx = 0.5 * (r.xmin + r.xmax);
  const double cy = 0.5 * (r.ymin + r.ymax);
  const double hx = 0.5 * r.width() * (1.0 + inflate);
  const double hy = 0.5 * r.height() * (1.0 + inflate);
  return {cx - hx, cx + hx, cy - hy, cy + hy, nx, ny};
}

Raster<double> sample(const ScalarField& field, const GridWindow& window) {
  window.validate();
  Raster<double> out(window);
  parallel_for(static_cast<std::size_t>(window.ny), [&](std::size_t j) {
    const int jj = static_cast<int>(j);
    for (int i = 0; i < window.nx; ++i) {
      const Vec2 p = window.node(i, jj);
      out.at(i, jj) = field.value(p.x, p.y);
    }
  });
  return out;
}

}  // namespace torsion
