#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "torsion/geometry.hpp"
#include "torsion/numeric.hpp"
#include "torsion/parallel.hpp"

namespace torsion {

double Contour::signed_area() const {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(vertices[i], vertices[(i + 1) % n]);
  }
  return 0.5 * twice;
}

double Contour::length() const {
  double len = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i + 1 < n; ++i) len += distance(vertices[i], vertices[i + 1]);
  if (closed && n > 1) len += distance(vertices.back(), vertices.front());
  return len;
}

Rect Contour::bounds() const {
  Rect r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec2& p : vertices) {
    r.xmin = std::min(r.xmin, p.x);
    r.xmax = std::max(r.xmax, p.x);
    r.ymin = std::min(r.ymin, p.y);
    r.ymax = std::max(r.ymax, p.y);
  }
  return r;
}

bool Contour::contains(Vec2 p) const {
  if (!closed) return false;
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

void annotate(Contour& contour, const ScalarField& field, double center_x) {
  const std::size_t n = contour.vertices.size();
  contour.grad_norm.assign(n, 0.0);
  contour.curvature.assign(n, 0.0);
  contour.radial_derivative.assign(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const Vec2 p = contour.vertices[i];
    const Jet j = field.jet(p);
    contour.grad_norm[i] = norm(j.grad);
    contour.curvature[i] = curvature(j);
    contour.radial_derivative[i] = (p.x - center_x) * j.grad.x + p.y * j.grad.y;
  });
}

Vec2 project_to_level(const ScalarField& field, double level, Vec2 p, int steps) {
  for (int s = 0; s < steps; ++s) {
    const Jet j = field.jet(p);
    const double g2 = dot(j.grad, j.grad);
    if (g2 == 0.0) break;
    const double r = j.value - level;
    if (r == 0.0) break;
    p = p - (r / g2) * j.grad;
  }
  return p;
}

std::vector<Contour> extract_level_set(const ScalarField& field, double level,
                                       const GridWindow& window, double refine_tol) {
  if (!(refine_tol > 0.0)) throw Error(ErrorKind::InvalidInput, "refine_tol must be positive");
  const Raster<double> samples = sample(field, window);
  return extract_level_set(field, samples, level, {refine_tol});
}

namespace {

// Edge numbering: horizontal edge (i,j)-(i+1,j) first, then vertical (i,j)-(i,j+1).
struct EdgeIndex {
  int nx, ny;
  int horizontal(int i, int j) const { return j * (nx - 1) + i; }
  int vertical(int i, int j) const { return (nx - 1) * ny + j * nx + i; }
  int count() const { return (nx - 1) * ny + nx * (ny - 1); }
  bool is_vertical(int e) const { return e >= (nx - 1) * ny; }
  std::array<std::array<int, 2>, 2> endpoints(int e) const {
    if (!is_vertical(e)) return {{{e % (nx - 1), e / (nx - 1)}, {e % (nx - 1) + 1, e / (nx - 1)}}};
    const int r = e - (nx - 1) * ny;
    return {{{r % nx, r / nx}, {r % nx, r / nx + 1}}};
  }
};

struct Segment {
  int a;
  int b;
};

void orient_by_gradient(Contour& c, const ScalarField& field) {
  const std::size_t n = c.vertices.size();
  if (n < 2) return;
  // Majority vote over up to 64 evenly spaced vertices: superlevel on the left.
  double vote = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, n / 64);
  for (std::size_t i = 0; i < n; i += stride) {
    const std::size_t prev = (i == 0) ? (c.closed ? n - 1 : 0) : i - 1;
    const std::size_t next = (i + 1 == n) ? (c.closed ? 0 : n - 1) : i + 1;
    const Vec2 t = c.vertices[next] - c.vertices[prev];
    const Vec2 left{-t.y, t.x};
    const Vec2 g = field.gradient(c.vertices[i].x, c.vertices[i].y);
    vote += (dot(g, left) > 0.0) ? 1.0 : -1.0;
  }
  if (vote < 0.0) std::reverse(c.vertices.begin(), c.vertices.end());
}

}  // namespace

std::vector<Contour> extract_level_set(const ScalarField& field, const Raster<double>& samples,
                                       double level, const LevelSetOptions& options) {
  const GridWindow& w = samples.window;
  w.validate();
  const int nx = w.nx;
  const int ny = w.ny;
  const EdgeIndex edges{nx, ny};
  auto above = [&](int i, int j) { return samples.at(i, j) >= level; };

  // Crossing edges and their polished points.
  std::vector<int> crossing;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      if (above(i, j) != above(i + 1, j)) crossing.push_back(edges.horizontal(i, j));
    }
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (above(i, j) != above(i, j + 1)) crossing.push_back(edges.vertical(i, j));
    }
  }
  std::sort(crossing.begin(), crossing.end());
  std::vector<int> point_of(static_cast<std::size_t>(edges.count()), -1);
  for (std::size_t k = 0; k < crossing.size(); ++k) point_of[crossing[k]] = static_cast<int>(k);
  std::vector<Vec2> points(crossing.size());
  parallel_for(crossing.size(), [&](std::size_t k) {
    const auto ends = edges.endpoints(crossing[k]);
    const Vec2 a = w.node(ends[0][0], ends[0][1]);
    const Vec2 b = w.node(ends[1][0], ends[1][1]);
    const Vec2 d = b - a;
    auto g = [&](double t) {
      const Jet j = field.jet(a + t * d);
      return std::pair<double, double>{j.value - level, dot(j.grad, d)};
    };
    const auto r = numeric::safeguarded_newton(g, 0.0, 1.0, options.refine_tol, 100);
    points[k] = a + r.t * d;
  });

  // Cell segments, in row-major cell order.
  std::vector<Segment> segments;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const bool bl = above(i, j), br = above(i + 1, j), tr = above(i + 1, j + 1),
                 tl = above(i, j + 1);
      const int bottom = edges.horizontal(i, j);
      const int top = edges.horizontal(i, j + 1);
      const int left = edges.vertical(i, j);
      const int right = edges.vertical(i + 1, j);
      std::array<int, 4> cut{};
      int ncut = 0;
      if (bl != br) cut[ncut++] = bottom;
      if (br != tr) cut[ncut++] = right;
      if (tr != tl) cut[ncut++] = top;
      if (tl != bl) cut[ncut++] = left;
      if (ncut == 2) {
        segments.push_back({cut[0], cut[1]});
      } else if (ncut == 4) {
        const Vec2 c = w.node(i, j) + 0.5 * Vec2{w.dx(), w.dy()};
        const bool centre = field.value(c.x, c.y) >= level;
        // Corners on the other side of the centre are cut off individually.
        if (bl != centre) segments.push_back({bottom, left});
        if (br != centre) segments.push_back({bottom, right});
        if (tr != centre) segments.push_back({right, top});
        if (tl != centre) segments.push_back({top, left});
      }
    }
  }

  // Edge -> incident segments.
  std::vector<std::array<int, 2>> incident(crossing.size(), {-1, -1});
  auto attach = [&](int edge, int seg) {
    auto& slot = incident[point_of[edge]];
    if (slot[0] < 0) slot[0] = seg; else slot[1] = seg;
  };
  for (std::size_t s = 0; s < segments.size(); ++s) {
    attach(segments[s].a, static_cast<int>(s));
    attach(segments[s].b, static_cast<int>(s));
  }

  std::vector<char> used(segments.size(), 0);
  std::vector<Contour> out;
  auto walk = [&](int start_edge, int start_seg, bool closed) {
    Contour c;
    c.level = level;
    c.closed = closed;
    int edge = start_edge;
    int seg = start_seg;
    c.vertices.push_back(points[point_of[edge]]);
    while (seg >= 0 && !used[seg]) {
      used[seg] = 1;
      const int next_edge = segments[seg].a == edge ? segments[seg].b : segments[seg].a;
      if (closed && next_edge == start_edge) break;
      c.vertices.push_back(points[point_of[next_edge]]);
      const auto& inc = incident[point_of[next_edge]];
      const int next_seg = inc[0] == seg ? inc[1] : inc[0];
      edge = next_edge;
      seg = next_seg;
    }
    // Coincident crossings (a node exactly on the level) produce duplicates.
    auto last = std::unique(c.vertices.begin(), c.vertices.end());
    c.vertices.erase(last, c.vertices.end());
    if (closed && c.vertices.size() > 1 && c.vertices.front() == c.vertices.back()) {
      c.vertices.pop_back();
    }
    return c;
  };

  // Open chains start at edges with a single incident segment.
  for (std::size_t k = 0; k < crossing.size(); ++k) {
    const auto& inc = incident[k];
    if (inc[0] >= 0 && inc[1] < 0 && !used[inc[0]]) {
      Contour c = walk(crossing[k], inc[0], false);
      if (c.vertices.size() >= 2) out.push_back(std::move(c));
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    Contour c = walk(segments[s].a, static_cast<int>(s), true);
    if (c.vertices.size() >= options.min_closed_vertices) out.push_back(std::move(c));
  }
  for (Contour& c : out) {
    orient_by_gradient(c, field);
    c.ccw = c.closed && c.signed_area() > 0.0;
  }
  return out;
}

}  // namespace torsion
