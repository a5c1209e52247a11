#pragma once

#include <array>
#include <vector>

#include "torsion/geometry.hpp"

namespace torsion {

enum class CriticalKind { Maximum, Saddle, Minimum, Degenerate };

const char* to_string(CriticalKind kind);

struct CriticalPoint {
  Vec2 location;
  CriticalKind kind = CriticalKind::Degenerate;
  std::array<double, 2> hessian_eigenvalues{};  // ascending
  double value = 0.0;
  double residual = 0.0;  // |grad u| at location
};

// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::array<double, 2> eigenvalues(const Hessian& h);

// Morse type from eigenvalue signs; degenerate when the smallest |eigenvalue|
// is below degeneracy_tol.
CriticalKind classify(const Hessian& h, double degeneracy_tol = 1e-12);

struct CriticalPointOptions {
  int seeds_x = 256;
  int seeds_y = 64;
  double newton_tol = 1e-12;
  double degeneracy_tol = 1e-12;
  int max_iterations = 100;
  double merge_radius = 1e-6;  // relative to the domain diameter
};

/// Newton on grad u from a seed lattice over the domain. Diverged seeds and
/// limits outside the domain are dropped; survivors closer than
/// merge_radius * diameter are merged. Output is sorted by (x, y).
std::vector<CriticalPoint> find_critical_points(const ScalarField& field,
                                                const DomainExtract& domain,
                                                const CriticalPointOptions& options = {});

struct MaximaCheck {
  int k = 0;
  int count_maxima = 0;
  int component_count = 0;             // superlevel-1/2 components
  std::vector<int> maxima_per_component;
  std::vector<CriticalPoint> points;
  bool pass = false;                   // count_maxima >= k
};

/// Counts maxima against k and pairs them with the components of {u > 1/2}.
/// Throws Error(Inconsistency) if some component holds no located maximum.
MaximaCheck maxima_count_vs_k(const ImplicitField& field, const DomainExtract& domain,
                              const CriticalPointOptions& options = {});

}  // namespace torsion
