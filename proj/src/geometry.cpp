#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "torsion/geometry.hpp"
#include "torsion/numeric.hpp"

namespace torsion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<int, 2> nearest_node(const GridWindow& w, Vec2 p) {
  const int i = static_cast<int>(std::lround((p.x - w.xmin) / w.dx()));
  const int j = static_cast<int>(std::lround((p.y - w.ymin) / w.dy()));
  return {std::clamp(i, 0, w.nx - 1), std::clamp(j, 0, w.ny - 1)};
}

// 4-connected flood fill of the predicate from (i0, j0).
template <class Pred>
Mask flood_fill(const GridWindow& w, int i0, int j0, Pred&& inside) {
  Mask mask(w, 0);
  std::deque<std::array<int, 2>> queue;
  mask.at(i0, j0) = 1;
  queue.push_back({i0, j0});
  constexpr int di[4] = {1, -1, 0, 0};
  constexpr int dj[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    for (int d = 0; d < 4; ++d) {
      const int a = i + di[d];
      const int b = j + dj[d];
      if (a < 0 || b < 0 || a >= w.nx || b >= w.ny) continue;
      if (mask.at(a, b) || !inside(a, b)) continue;
      mask.at(a, b) = 1;
      queue.push_back({a, b});
    }
  }
  return mask;
}

bool touches_edge(const Mask& m) {
  for (int i = 0; i < m.nx(); ++i) {
    if (m.at(i, 0) || m.at(i, m.ny() - 1)) return true;
  }
  for (int j = 0; j < m.ny(); ++j) {
    if (m.at(0, j) || m.at(m.nx() - 1, j)) return true;
  }
  return false;
}

// Point on the closed contour at parameter t of segment [i, i+1], moved onto
// the level set.
Vec2 on_segment(const Contour& c, const ScalarField& field, std::size_t i, double t) {
  const std::size_t n = c.vertices.size();
  const Vec2 a = c.vertices[i % n];
  const Vec2 b = c.vertices[(i + 1) % n];
  return project_to_level(field, c.level, a + t * (b - a), 3);
}

}  // namespace

double DomainExtract::mask_area() const {
  std::size_t count = 0;
  for (auto v : inside.data) count += v ? 1 : 0;
  return static_cast<double>(count) * inside.window.dx() * inside.window.dy();
}

DomainExtract extract_domain(const ScalarField& field, Vec2 anchor, const GridWindow& window,
                             double refine_tol) {
  window.validate();
  if (!(field.value(anchor) > 0.0)) {
    throw Error(ErrorKind::ConstructionFailed,
                "anchor is not in the superlevel set {u > 0}; epsilon is too large");
  }
  if (!window.rect().contains(anchor)) {
    throw Error(ErrorKind::InvalidInput, "anchor lies outside the grid window");
  }
  const Raster<double> samples = sample(field, window);

  // Start from the nearest positive corner of the cell holding the anchor.
  auto [i0, j0] = nearest_node(window, anchor);
  if (!(samples.at(i0, j0) > 0.0)) {
    bool found = false;
    for (int dj = -1; dj <= 1 && !found; ++dj) {
      for (int di = -1; di <= 1 && !found; ++di) {
        const int a = std::clamp(i0 + di, 0, window.nx - 1);
        const int b = std::clamp(j0 + dj, 0, window.ny - 1);
        if (samples.at(a, b) > 0.0) {
          i0 = a;
          j0 = b;
          found = true;
        }
      }
    }
    if (!found) {
      throw Error(ErrorKind::Resolution, "grid too coarse to resolve the domain at the anchor");
    }
  }
  DomainExtract out;
  out.anchor = anchor;
  out.inside = flood_fill(window, i0, j0, [&](int i, int j) { return samples.at(i, j) > 0.0; });
  if (touches_edge(out.inside)) {
    throw Error(ErrorKind::EnclosureViolation,
                "the superlevel component containing the anchor reaches the window edge");
  }

  std::vector<Contour> contours = extract_level_set(field, samples, 0.0, {refine_tol});
  const Contour* best = nullptr;
  double best_area = 0.0;
  for (const Contour& c : contours) {
    if (!c.closed || !c.contains(anchor)) continue;
    const double a = std::abs(c.signed_area());
    if (a > best_area) {
      best_area = a;
      best = &c;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorKind::ConstructionFailed, "no closed level curve encloses the anchor");
  }
  out.boundary = *best;
  annotate(out.boundary, field, anchor.x);
  return out;
}

DomainExtract extract_domain(const ImplicitField& field, const GridWindow& window,
                             double refine_tol) {
  const Vec2 anchor{field.config().roots.front(), 0.0};
  if (!window.rect().contains(anchor)) {
    throw Error(ErrorKind::ConstructionFailed,
                "window does not reach x_1; the enclosure rectangle is narrower than the roots "
                "(epsilon too large)");
  }
  return extract_domain(field, anchor, window, refine_tol);
}

GridWindow default_window(const RootConfig& config, int nx, int ny) {
  return GridWindow::around(predictions(config).rect, 0.05, nx, ny);
}

RectNegativity check_rect_negativity(const ImplicitField& field,
                                     const AsymptoticPrediction& prediction,
                                     int samples_per_side, double vertical_slack) {
  const Rect& r = prediction.rect;
  RectNegativity out;
  out.max_u = -kInf;
  out.max_u_vertical = -kInf;
  const int n = std::max(samples_per_side, 2);
  auto visit = [&](double x, double y, bool vertical) {
    const double u = field.value(x, y);
    if (u > out.max_u) {
      out.max_u = u;
      out.argmax = {x, y};
    }
    if (vertical) {
      out.max_u_vertical = std::max(out.max_u_vertical, u);
      out.vertical_deviation = std::max(out.vertical_deviation, std::abs(u + 2.5 + 0.5 * y * y));
    }
  };
  for (int s = 0; s < n; ++s) {
    const double t = static_cast<double>(s) / (n - 1);
    const double x = r.xmin + t * r.width();
    const double y = r.ymin + t * r.height();
    visit(x, r.ymin, false);
    visit(x, r.ymax, false);
    visit(r.xmin, y, true);
    visit(r.xmax, y, true);
  }
  out.pass = out.max_u < 0.0;
  out.vertical_pass = out.max_u_vertical <= -2.0 + vertical_slack;
  return out;
}

int ComponentCount::label_near(Vec2 p) const {
  if (labels.empty()) return -1;
  const auto [i0, j0] = nearest_node(window, p);
  const int direct = labels[static_cast<std::size_t>(j0) * window.nx + i0];
  if (direct >= 0) return direct;
  int best = -1;
  double best_d = kInf;
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      const int i = i0 + di, j = j0 + dj;
      if (i < 0 || j < 0 || i >= window.nx || j >= window.ny) continue;
      const int l = labels[static_cast<std::size_t>(j) * window.nx + i];
      if (l < 0) continue;
      const double d = distance(window.node(i, j), p);
      if (d < best_d) {
        best_d = d;
        best = l;
      }
    }
  }
  return best;
}

namespace {

ComponentCount count_once(const ScalarField& field, double level, const GridWindow& w,
                          const DomainExtract* domain) {
  const Raster<double> s = sample(field, w);
  ComponentCount out;
  out.window = w;
  out.labels.assign(s.data.size(), -1);
  std::vector<int> raw(s.data.size(), -1);
  int next = 0;
  std::vector<Vec2> seeds;
  for (int j = 0; j < w.ny; ++j) {
    for (int i = 0; i < w.nx; ++i) {
      if (raw[s.index(i, j)] >= 0 || !(s.at(i, j) > level)) continue;
      const Mask m = flood_fill(w, i, j, [&](int a, int b) { return s.at(a, b) > level; });
      // The component's seed: its node with the largest value.
      Vec2 seed = w.node(i, j);
      double best = s.at(i, j);
      for (std::size_t k = 0; k < m.data.size(); ++k) {
        if (!m.data[k]) continue;
        raw[k] = next;
        if (s.data[k] > best) {
          best = s.data[k];
          seed = w.node(static_cast<int>(k % w.nx), static_cast<int>(k / w.nx));
        }
      }
      seeds.push_back(seed);
      ++next;
    }
  }
  // Keep components inside the domain; {u > level} with level > 0 cannot
  // straddle its boundary, so one representative point decides.
  std::vector<int> relabel(next, -1);
  for (int c = 0; c < next; ++c) {
    if (domain == nullptr || domain->contains(seeds[c])) {
      relabel[c] = out.count++;
      out.seeds.push_back(seeds[c]);
    }
  }
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (raw[k] >= 0) out.labels[k] = relabel[raw[k]];
  }
  return out;
}

}  // namespace

ComponentCount superlevel_component_count(const ScalarField& field, double level,
                                          const GridWindow& window, const DomainExtract* domain,
                                          int max_nx, int max_ny) {
  window.validate();
  ComponentCount prev = count_once(field, level, window, domain);
  std::vector<int> history{prev.count};
  GridWindow w = window;
  while (true) {
    const GridWindow next = w.doubled();
    if (next.nx > max_nx || next.ny > max_ny) {
      std::ostringstream msg;
      msg << "superlevel component count did not stabilise before " << max_nx << "x" << max_ny;
      throw Error(ErrorKind::Indeterminate, msg.str());
    }
    ComponentCount cur = count_once(field, level, next, domain);
    history.push_back(cur.count);
    if (cur.count == prev.count) {
      cur.history = history;
      return cur;
    }
    prev = std::move(cur);
    w = next;
  }
}

GridWindow counting_window(const DomainExtract& domain, int nx, int ny) {
  return GridWindow::around(domain.boundary.bounds(), 0.02, nx, ny);
}

StarshapeCertificate starshape_certificate(const DomainExtract& domain, const ScalarField& field,
                                           double center_x, double margin) {
  const Contour& c = domain.boundary;
  StarshapeCertificate out;
  out.center = {center_x, 0.0};
  out.margin = margin;
  out.max_radial_derivative = -kInf;
  const std::size_t n = c.vertices.size();
  if (n == 0) throw Error(ErrorKind::CertificateFailure, "empty boundary contour");
  auto radial = [&](Vec2 p) { return radial_derivative(field, center_x, p.x, p.y); };
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = radial(c.vertices[i]);
    if (r > out.max_radial_derivative) {
      out.max_radial_derivative = r;
      out.argmax = c.vertices[i];
      best = i;
    }
  }
  // Refine on the two segments adjacent to the best vertex.
  for (std::size_t seg : {(best + n - 1) % n, best}) {
    if (!c.closed && seg + 1 >= n) continue;
    auto g = [&](double t) { return radial(on_segment(c, field, seg, t)); };
    const auto [t, v] = numeric::sampled_max(g, 0.0, 1.0, 17);
    if (v > out.max_radial_derivative) {
      out.max_radial_derivative = v;
      out.argmax = on_segment(c, field, seg, t);
    }
  }
  out.pass = out.max_radial_derivative <= -margin;
  return out;
}

namespace {

int sign_changes(const std::vector<double>& values, bool closed) {
  const std::size_t n = values.size();
  int count = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) count += (values[i] < 0.0) != (values[i + 1] < 0.0);
  if (closed && n > 1) count += (values.back() < 0.0) != (values.front() < 0.0);
  return count;
}

}  // namespace

CurvatureCertificate curvature_certificate(const DomainExtract& domain, const ScalarField& field,
                                           const AsymptoticPrediction* prediction) {
  const Contour& c = domain.boundary;
  const std::size_t n = c.vertices.size();
  CurvatureCertificate out;
  if (n < 3) throw Error(ErrorKind::CertificateFailure, "boundary contour too short");
  auto kappa = [&](Vec2 p) {
    try {
      return curvature(field, p.x, p.y);
    } catch (const Error& e) {
      throw Error(ErrorKind::CertificateFailure, e.what());
    }
  };

  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = kappa(c.vertices[i]);
  double scale = 0.0;
  for (double v : k) scale = std::max(scale, std::abs(v));

  // Doubled density: midpoints projected onto the level set.
  std::vector<double> k2;
  k2.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    k2.push_back(k[i]);
    if (c.closed || i + 1 < n) k2.push_back(kappa(on_segment(c, field, i, 0.5)));
  }
  out.zero_count = sign_changes(k, c.closed);
  out.zero_count_refined = sign_changes(k2, c.closed);

  // Polish each sign change by bisection along the segment parameter.
  const double ktol = 1e-8 * std::max(scale, 1e-300);
  for (std::size_t i = 0; i < n; ++i) {
    if (!c.closed && i + 1 >= n) break;
    const double ka = k[i];
    const double kb = k[(i + 1) % n];
    if ((ka < 0.0) == (kb < 0.0)) continue;
    auto g = [&](double t) { return kappa(on_segment(c, field, i, t)); };
    const auto r = numeric::bisect(g, 0.0, 1.0, ktol, 80);
    out.zero_locations.push_back(on_segment(c, field, i, r.t));
  }

  // Global minimum, refined on the adjacent segments.
  const auto it = std::min_element(k.begin(), k.end());
  std::size_t imin = static_cast<std::size_t>(it - k.begin());
  out.min_curvature = *it;
  out.min_location = c.vertices[imin];
  for (std::size_t seg : {(imin + n - 1) % n, imin}) {
    if (!c.closed && seg + 1 >= n) continue;
    auto g = [&](double t) { return -kappa(on_segment(c, field, seg, t)); };
    const auto [t, v] = numeric::sampled_max(g, 0.0, 1.0, 17);
    if (-v < out.min_curvature) {
      out.min_curvature = -v;
      out.min_location = on_segment(c, field, seg, t);
    }
  }
  out.max_curvature = *std::max_element(k.begin(), k.end());

  if (prediction != nullptr) {
    out.predicted_zeros = {prediction->zeta_minus, prediction->zeta_plus};
    for (double zeta : out.predicted_zeros) {
      double best = kInf;
      for (const Vec2& z : out.zero_locations) {
        if ((z.x < 0.0) != (zeta < 0.0)) continue;
        best = std::min(best, std::abs(z.x - zeta) / std::abs(zeta));
      }
      out.zero_relative_errors.push_back(best);
    }
  }

  // Boundary point straight below the origin, when the origin is inside.
  if (domain.contains({0.0, 0.0}) && field.value(0.0, 0.0) > 0.0) {
    const double ylow = c.bounds().ymin - 1e-3 * (1.0 + std::abs(c.bounds().ymin));
    if (field.value(0.0, ylow) < 0.0) {
      auto g = [&](double y) {
        const Jet j = field.jet(0.0, y);
        return std::pair<double, double>{j.value, j.grad.y};
      };
      const auto r = numeric::safeguarded_newton(g, ylow, 0.0, 1e-13, 200);
      out.bottom_point = Vec2{0.0, r.t};
      out.bottom_curvature = kappa(*out.bottom_point);
    }
  }
  out.pass = out.zero_count == 2 && out.zero_count_refined == 2;
  return out;
}

CurvatureTrend min_curvature_trend(const std::vector<RootConfig>& configs, int nx, int ny) {
  CurvatureTrend out;
  for (const RootConfig& config : configs) {
    TrendEntry e;
    e.epsilon = config.epsilon;
    try {
      const ImplicitField field(config);
      const DomainExtract domain = extract_domain(field, default_window(config, nx, ny));
      e.min_curvature = curvature_certificate(domain, field).min_curvature;
    } catch (const Error& err) {
      e.error = std::string(to_string(err.kind())) + ": " + err.what();
    }
    out.entries.push_back(std::move(e));
  }
  out.decreasing = true;
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    if (!out.entries[i].min_curvature) {
      out.decreasing = false;
      break;
    }
    if (i > 0 && !(std::abs(*out.entries[i].min_curvature) <
                   std::abs(*out.entries[i - 1].min_curvature))) {
      out.decreasing = false;
    }
  }
  return out;
}

StripDistance strip_hausdorff(const ScalarField& field, double half_width, double refine_tol,
                              int nx, int ny) {
  const double margin = 0.05 * half_width + 0.05;
  const GridWindow w{-half_width - margin, half_width + margin, -2.0, 2.0, nx, ny};
  const std::vector<Contour> contours = extract_level_set(field, 0.0, w, refine_tol);

  // Clip every polyline to |x| <= half_width.
  struct Piece {
    Vec2 a, b;
  };
  std::vector<Piece> pieces;
  std::vector<Vec2> points;
  // outside -> point where [outside, inside] crosses x = +-half_width
  auto clip_point = [&](Vec2 outside, Vec2 inside) {
    const double edge = outside.x > 0.0 ? half_width : -half_width;
    const double t = (edge - outside.x) / (inside.x - outside.x);
    return outside + t * (inside - outside);
  };
  for (const Contour& c : contours) {
    const std::size_t n = c.vertices.size();
    const std::size_t segs = c.closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i) {
      Vec2 a = c.vertices[i];
      Vec2 b = c.vertices[(i + 1) % n];
      const bool ina = std::abs(a.x) <= half_width;
      const bool inb = std::abs(b.x) <= half_width;
      if (!ina && !inb) continue;
      if (!ina) a = clip_point(a, b);
      if (!inb) b = clip_point(b, a);
      pieces.push_back({a, b});
      points.push_back(a);
      points.push_back(b);
    }
  }
  StripDistance out;
  out.contour_points = points.size();
  if (pieces.empty()) {
    out.hausdorff = out.contour_to_lines = out.lines_to_contour = kInf;
    return out;
  }
  for (const Vec2& p : points) {
    out.contour_to_lines =
        std::max(out.contour_to_lines, std::min(std::abs(p.y - 1.0), std::abs(p.y + 1.0)));
  }
  auto seg_dist = [](Vec2 p, const Piece& s) {
    const Vec2 d = s.b - s.a;
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? dot(p - s.a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, s.a + t * d);
  };
  constexpr int kLineSamples = 2001;
  for (double yl : {-1.0, 1.0}) {
    for (int s = 0; s < kLineSamples; ++s) {
      const Vec2 p{-half_width + 2.0 * half_width * s / (kLineSamples - 1), yl};
      double best = kInf;
      for (const Piece& piece : pieces) best = std::min(best, seg_dist(p, piece));
      out.lines_to_contour = std::max(out.lines_to_contour, best);
    }
  }
  out.hausdorff = std::max(out.contour_to_lines, out.lines_to_contour);
  return out;
}

}  // namespace torsion
