#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>

namespace torsion::numeric {

// Golden-section search for a maximiser of a unimodal function on [a, b].
template <class Fn>
double golden_section_max(Fn&& fn, double a, double b, double xtol = 1e-14) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int it = 0; it < 200 && (b - a) > xtol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

// Dense sampling followed by golden-section polish around the best sample.
// Returns (argmax, max).
template <class Fn>
std::pair<double, double> sampled_max(Fn&& fn, double a, double b, std::size_t samples = 4096) {
  double best_t = a;
  double best_v = -std::numeric_limits<double>::infinity();
  const double step = (b - a) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = (i + 1 == samples) ? b : a + step * static_cast<double>(i);
    const double v = fn(t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  const double lo = std::max(a, best_t - step);
  const double hi = std::min(b, best_t + step);
  const double t = golden_section_max(fn, lo, hi);
  const double v = fn(t);
  if (v >= best_v) return {t, v};
  return {best_t, best_v};
}

// Root of g on [a, b] where g(a) and g(b) have opposite signs (or one is
// zero). Bisection safeguarded Newton when a derivative is supplied; plain
// bisection otherwise. Stops once |g| <= ftol or the bracket collapses.
struct BracketResult {
  double t = 0.0;
  double g = 0.0;
  int iterations = 0;
};

template <class G>
BracketResult bisect(G&& g, double a, double b, double ftol, int max_iter = 200) {
  double ga = g(a);
  if (ga == 0.0) return {a, 0.0, 0};
  double gb = g(b);
  if (gb == 0.0) return {b, 0.0, 0};
  BracketResult best{std::abs(ga) < std::abs(gb) ? a : b,
                     std::abs(ga) < std::abs(gb) ? ga : gb, 0};
  for (int it = 1; it <= max_iter; ++it) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double gm = g(m);
    if (std::abs(gm) < std::abs(best.g)) best = {m, gm, it};
    best.iterations = it;
    if (std::abs(gm) <= ftol) return {m, gm, it};
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return best;
}

// g returns (value, derivative).
template <class G>
BracketResult safeguarded_newton(G&& g, double a, double b, double ftol, int max_iter = 100) {
  auto [ga, da] = g(a);
  if (std::abs(ga) <= ftol) return {a, ga, 0};
  auto [gb, db] = g(b);
  if (std::abs(gb) <= ftol) return {b, gb, 0};
  (void)da;
  (void)db;
  // Orient so that g(lo) < 0 < g(hi).
  double lo = a, hi = b;
  if (ga > 0.0) std::swap(lo, hi);
  double t = (std::abs(ga) * b + std::abs(gb) * a) / (std::abs(ga) + std::abs(gb));
  if (!(t > std::min(a, b) && t < std::max(a, b))) t = 0.5 * (a + b);
  BracketResult best{t, std::numeric_limits<double>::infinity(), 0};
  for (int it = 1; it <= max_iter; ++it) {
    auto [gt, dt] = g(t);
    if (std::abs(gt) < std::abs(best.g)) best = {t, gt, it};
    best.iterations = it;
    if (std::abs(gt) <= ftol) return {t, gt, it};
    if (gt < 0.0) lo = t; else hi = t;
    double next = (dt != 0.0) ? t - gt / dt : 0.5 * (lo + hi);
    const double left = std::min(lo, hi), right = std::max(lo, hi);
    if (!(next > left && next < right)) next = 0.5 * (lo + hi);
    if (next == t) break;
    t = next;
  }
  return best;
}

}  // namespace torsion::numeric
