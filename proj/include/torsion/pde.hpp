#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "torsion/geometry.hpp"

namespace torsion::pde {

// Positive inside the domain, nonpositive outside.
using DomainFunction = std::function<double(double, double)>;
// Dirichlet data evaluated at boundary intersection points.
using BoundaryData = std::function<double(Vec2)>;

enum Direction { East = 0, West = 1, North = 2, South = 3 };

struct IrregularGrid {
  double spacing = 0.0;
  Vec2 origin;                                   // lattice point (0, 0)
  std::vector<std::array<int, 2>> ij;            // lattice indices per node
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 4>> neighbor;      // node index, or -1 across the boundary
  std::vector<std::array<double, 4>> arm;        // fraction of spacing, in (0, 1]
  int max_column_nodes = 0;
  int max_row_nodes = 0;

  std::size_t size() const { return nodes.size(); }
  Vec2 boundary_point(std::size_t n, int dir) const;
  bool adjacent_to_boundary(std::size_t n) const;
};

inline constexpr int kMinNodesAcross = 16;

/// Lattice nodes with phi > 0 connected to the node nearest `anchor`, within
/// `box` grown by two cells. Arms across the boundary are located by bisection
/// on phi to 1e-12. Throws Resolution if fewer than kMinNodesAcross nodes span
/// the domain, EnclosureViolation if the fill reaches the lattice edge.
IrregularGrid build_grid(const DomainFunction& phi, Vec2 anchor, const Rect& box, double spacing);

/// Grid on an extracted domain using the exact field for the arms.
IrregularGrid build_grid(const DomainExtract& domain, const ScalarField& field, double spacing);

struct DiscreteField {
  std::vector<double> values;
  double residual = 0.0;     // max |A u - b| / max |b|
  int iterations = 0;
  bool positive = true;      // all nodal values > 0
  std::vector<std::string> warnings;

  double max_abs() const;
};

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iterations = 20000;
};

/// Shortley-Weller discretisation of -Δu = rhs with u = g on the boundary
/// (g = 0 if empty), solved by preconditioned BiCGSTAB.
DiscreteField solve_poisson(const IrregularGrid& grid, double rhs, const BoundaryData& g = {},
                            const SolveOptions& options = {});

inline DiscreteField solve_torsion(const IrregularGrid& grid, const BoundaryData& g = {},
                                   const SolveOptions& options = {}) {
  return solve_poisson(grid, 1.0, g, options);
}

struct Nonlinearity {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> f_prime;
};

// "const" (1), "linear" (1 + u), "exp" (e^u). Throws InvalidInput otherwise.
Nonlinearity nonlinearity_by_name(const std::string& name);
Nonlinearity constant_nonlinearity(double c);

struct NonlinearProblem {
  Nonlinearity nonlinearity;
  double lambda;

  // Throws InvalidInput unless f(0) > 0 and lambda > 0.
  NonlinearProblem(Nonlinearity n, double lambda);

  double f(double u) const { return nonlinearity.f(u); }
  double f_prime(double u) const { return nonlinearity.f_prime(u); }
};

struct NewtonOptions {
  double tol = 1e-10;  // max-norm residual relative to lambda f(0)
  int max_iterations = 50;
};

/// Newton with residual backtracking on A u = lambda f(u), zero boundary data.
/// Starts from lambda f(0) times the torsion solution unless `initial` is given.
/// Throws NoSolution on divergence or stagnation.
DiscreteField solve_semilinear(const IrregularGrid& grid, const NonlinearProblem& problem,
                               const DiscreteField* initial = nullptr,
                               const NewtonOptions& options = {});

struct Semistability {
  double lambda_min = 0.0;
  int iterations = 0;
  bool pass = false;
};

/// Smallest eigenvalue of A - lambda diag(f'(u)) by shifted inverse iteration.
/// Pass iff lambda_min >= -tolerance. Throws EigenFailure on stagnation.
Semistability semistability(const IrregularGrid& grid, const NonlinearProblem& problem,
                            const DiscreteField& u, double tolerance = 1e-8,
                            double rel_tol = 1e-8, int max_iterations = 2000);

struct ConvergenceEntry {
  double lambda = 0.0;
  std::optional<double> sup_error;  // max |u_lambda / (lambda f(0)) - u_0|
  std::optional<Semistability> stability;
  std::string error;
};

struct ConvergenceStudy {
  std::vector<ConvergenceEntry> entries;
  double torsion_sup = 0.0;  // max u_0
  bool monotone = false;
};

/// lambdas in decreasing order. Per-entry failures are recorded, not thrown.
ConvergenceStudy convergence_study(const IrregularGrid& grid, const Nonlinearity& nonlinearity,
                                   const std::vector<double>& lambdas, bool with_stability = true);

struct SpacingEntry {
  double spacing = 0.0;
  std::size_t nodes = 0;
  double max_error = 0.0;
  double residual = 0.0;
};

struct OrderStudy {
  std::vector<SpacingEntry> entries;
  std::vector<double> pairwise_orders;
  double observed_order = 0.0;  // least-squares slope of log error vs log spacing
};

/// Torsion solves at each spacing compared against an exact solution at the nodes.
OrderStudy torsion_order_study(const DomainFunction& phi, Vec2 anchor, const Rect& box,
                               const ScalarField& exact, const std::vector<double>& spacings);

}  // namespace torsion::pde
