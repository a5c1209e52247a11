#pragma once

#include <cstdint>
#include <vector>

#include "torsion/analytic.hpp"
#include "torsion/field.hpp"

namespace torsion {

// Uniform node lattice: nx * ny samples including both window edges.
struct GridWindow {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;
  int nx = 16;
  int ny = 16;

  void validate() const;
  double dx() const { return (xmax - xmin) / (nx - 1); }
  double dy() const { return (ymax - ymin) / (ny - 1); }
  double diagonal() const;
  Vec2 node(int i, int j) const { return {xmin + i * dx(), ymin + j * dy()}; }
  Rect rect() const { return {xmin, xmax, ymin, ymax}; }
  GridWindow doubled() const;

  static GridWindow around(const Rect& r, double inflate, int nx, int ny);
};

template <class T>
struct Raster {
  GridWindow window;
  std::vector<T> data;

  Raster() = default;
  explicit Raster(const GridWindow& w, T fill = T{})
      : window(w), data(static_cast<std::size_t>(w.nx) * w.ny, fill) {}

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * window.nx + i; }
  T& at(int i, int j) { return data[index(i, j)]; }
  const T& at(int i, int j) const { return data[index(i, j)]; }
  int nx() const { return window.nx; }
  int ny() const { return window.ny; }
};

using Mask = Raster<std::uint8_t>;

// Samples the field on every node, rows in parallel.
Raster<double> sample(const ScalarField& field, const GridWindow& window);

}  // namespace torsion
