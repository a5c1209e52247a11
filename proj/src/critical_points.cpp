#include "torsion/critical_points.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "torsion/parallel.hpp"

namespace torsion {

const char* to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::Maximum: return "maximum";
    case CriticalKind::Saddle: return "saddle";
    case CriticalKind::Minimum: return "minimum";
    case CriticalKind::Degenerate: return "degenerate";
  }
  return "unknown";
}

std::array<double, 2> eigenvalues(const Hessian& h) {
  const double mean = 0.5 * (h.xx + h.yy);
  const double radius = std::hypot(0.5 * (h.xx - h.yy), h.xy);
  return {mean - radius, mean + radius};
}

CriticalKind classify(const Hessian& h, double degeneracy_tol) {
  const auto [lo, hi] = eigenvalues(h);
  if (std::min(std::abs(lo), std::abs(hi)) < degeneracy_tol) return CriticalKind::Degenerate;
  if (hi < 0.0) return CriticalKind::Maximum;
  if (lo > 0.0) return CriticalKind::Minimum;
  return CriticalKind::Saddle;
}

namespace {

constexpr double kSingularDet = 1e-14;
constexpr double kShift = 1e-7;

std::optional<Vec2> newton(const ScalarField& field, Vec2 p, const CriticalPointOptions& o) {
  Jet j = field.jet(p);
  double res = norm(j.grad);
  for (int it = 0; it < o.max_iterations; ++it) {
    if (res <= o.newton_tol) return p;
    Hessian h = j.hess;
    if (std::abs(h.det()) < kSingularDet) {
      h.xx += kShift;
      h.yy += kShift;
    }
    const double det = h.det();
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const Vec2 step{-(h.yy * j.grad.x - h.xy * j.grad.y) / det,
                    -(-h.xy * j.grad.x + h.xx * j.grad.y) / det};
    // Halve until the gradient norm decreases.
    double t = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half, t *= 0.5) {
      const Vec2 q = p + t * step;
      const Jet jq = field.jet(q);
      const double rq = norm(jq.grad);
      if (std::isfinite(rq) && rq < res) {
        p = q;
        j = jq;
        res = rq;
        improved = true;
        break;
      }
    }
    if (!improved) return res <= o.newton_tol ? std::optional<Vec2>(p) : std::nullopt;
  }
  return res <= o.newton_tol ? std::optional<Vec2>(p) : std::nullopt;
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const ScalarField& field,
                                                const DomainExtract& domain,
                                                const CriticalPointOptions& options) {
  const Rect b = domain.boundary.bounds();
  const double diameter = std::hypot(b.width(), b.height());
  const int sx = std::max(options.seeds_x, 2);
  const int sy = std::max(options.seeds_y, 2);

  std::vector<Vec2> seeds;
  const GridWindow& mw = domain.inside.window;
  for (int j = 0; j < sy; ++j) {
    for (int i = 0; i < sx; ++i) {
      const Vec2 s{b.xmin + (i + 0.5) * b.width() / sx, b.ymin + (j + 0.5) * b.height() / sy};
      const int mi = static_cast<int>(std::lround((s.x - mw.xmin) / mw.dx()));
      const int mj = static_cast<int>(std::lround((s.y - mw.ymin) / mw.dy()));
      if (mi < 0 || mj < 0 || mi >= mw.nx || mj >= mw.ny) continue;
      if (domain.inside.at(mi, mj)) seeds.push_back(s);
    }
  }

  std::vector<std::optional<Vec2>> limits(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    auto p = newton(field, seeds[s], options);
    if (p && domain.contains(*p)) limits[s] = p;
  });

  std::vector<CriticalPoint> out;
  const double radius = options.merge_radius * diameter;
  for (const auto& p : limits) {
    if (!p) continue;
    const bool seen = std::any_of(out.begin(), out.end(), [&](const CriticalPoint& c) {
      return distance(c.location, *p) <= radius;
    });
    if (seen) continue;
    const Jet j = field.jet(*p);
    CriticalPoint c;
    c.location = *p;
    c.value = j.value;
    c.residual = norm(j.grad);
    c.hessian_eigenvalues = eigenvalues(j.hess);
    c.kind = classify(j.hess, options.degeneracy_tol);
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return a.location.x != b.location.x ? a.location.x < b.location.x : a.location.y < b.location.y;
  });
  return out;
}

MaximaCheck maxima_count_vs_k(const ImplicitField& field, const DomainExtract& domain,
                              const CriticalPointOptions& options) {
  MaximaCheck out;
  out.k = field.config().k;
  out.points = find_critical_points(field, domain, options);
  const ComponentCount cc =
      superlevel_component_count(field, 0.5, counting_window(domain), &domain);
  out.component_count = cc.count;
  out.maxima_per_component.assign(cc.count, 0);
  for (const CriticalPoint& p : out.points) {
    if (p.kind != CriticalKind::Maximum) continue;
    ++out.count_maxima;
    const int label = p.value > 0.5 ? cc.label_near(p.location) : -1;
    if (label >= 0) ++out.maxima_per_component[label];
  }
  for (int c = 0; c < cc.count; ++c) {
    if (out.maxima_per_component[c] == 0) {
      std::ostringstream msg;
      msg << "superlevel component " << c << " (seed " << cc.seeds[c].x << ", " << cc.seeds[c].y
          << ") contains no located maximum; resolution too coarse";
      throw Error(ErrorKind::Inconsistency, msg.str());
    }
  }
  out.pass = out.count_maxima >= out.k;
  return out;
}

}  // namespace torsion
