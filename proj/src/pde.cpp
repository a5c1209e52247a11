#include "torsion/pde.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "torsion/parallel.hpp"

namespace torsion::pde {

namespace {

constexpr std::array<std::array<int, 2>, 4> kStep{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ColMatrix = Eigen::SparseMatrix<double>;

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct System {
  RowMatrix a;
  ColMatrix interior;      // symmetric: -1/h^2 couplings with the diagonal of a
  Eigen::VectorXd boundary;  // contribution of the Dirichlet data
};

System assemble(const IrregularGrid& grid, const BoundaryData& g) {
  const std::size_t n = grid.size();
  const double h = grid.spacing;
  std::vector<Eigen::Triplet<double>> ta, ts;
  ta.reserve(5 * n);
  ts.reserve(5 * n);
  System s;
  s.boundary = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    const int row = static_cast<int>(p);
    double diag = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const int plus = 2 * axis, minus = 2 * axis + 1;
      const double hp = grid.arm[p][plus] * h;
      const double hm = grid.arm[p][minus] * h;
      const double cp = 2.0 / (hp * (hp + hm));
      const double cm = 2.0 / (hm * (hp + hm));
      diag += cp + cm;
      for (auto [dir, c] : {std::pair{plus, cp}, std::pair{minus, cm}}) {
        const int q = grid.neighbor[p][dir];
        if (q >= 0) {
          ta.emplace_back(row, q, -c);
          ts.emplace_back(row, q, -1.0 / (h * h));
        } else if (g) {
          s.boundary[row] += c * g(grid.boundary_point(p, dir));
        }
      }
    }
    ta.emplace_back(row, row, diag);
    ts.emplace_back(row, row, diag);
  }
  const auto dim = static_cast<Eigen::Index>(n);
  s.a.resize(dim, dim);
  s.a.setFromTriplets(ta.begin(), ta.end());
  s.interior.resize(dim, dim);
  s.interior.setFromTriplets(ts.begin(), ts.end());
  return s;
}

// Preconditioner: Cholesky factor of the symmetric interior operator.
class InteriorPreconditioner {
 public:
  InteriorPreconditioner() = default;
  template <class M>
  explicit InteriorPreconditioner(const M&) {}
  template <class M>
  InteriorPreconditioner& analyzePattern(const M&) { return *this; }
  template <class M>
  InteriorPreconditioner& factorize(const M&) { return *this; }
  template <class M>
  InteriorPreconditioner& compute(const M&) { return *this; }

  void set(const ColMatrix& s) {
    llt_.compute(s);
    ready_ = llt_.info() == Eigen::Success;
  }
  template <class Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    return ready_ ? Eigen::VectorXd(llt_.solve(b)) : Eigen::VectorXd(b);
  }
  Eigen::ComputationInfo info() const { return Eigen::Success; }
  bool ready() const { return ready_; }

 private:
  Eigen::SimplicialLLT<ColMatrix> llt_;
  bool ready_ = false;
};

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

bool all_positive(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

}  // namespace

Vec2 IrregularGrid::boundary_point(std::size_t n, int dir) const {
  const double t = arm[n][dir] * spacing;
  return {nodes[n].x + t * kStep[dir][0], nodes[n].y + t * kStep[dir][1]};
}

bool IrregularGrid::adjacent_to_boundary(std::size_t n) const {
  return std::any_of(neighbor[n].begin(), neighbor[n].end(), [](int q) { return q < 0; });
}

IrregularGrid build_grid(const DomainFunction& phi, Vec2 anchor, const Rect& box, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorKind::InvalidInput, "grid spacing must be positive");
  }
  const double h = spacing;
  const int i0 = static_cast<int>(std::floor((box.xmin - anchor.x) / h)) - 2;
  const int i1 = static_cast<int>(std::ceil((box.xmax - anchor.x) / h)) + 2;
  const int j0 = static_cast<int>(std::floor((box.ymin - anchor.y) / h)) - 2;
  const int j1 = static_cast<int>(std::ceil((box.ymax - anchor.y) / h)) + 2;
  if (i0 > 0 || i1 < 0 || j0 > 0 || j1 < 0) {
    throw Error(ErrorKind::InvalidInput, "anchor lies outside the grid box");
  }
  const int nx = i1 - i0 + 1, ny = j1 - j0 + 1;
  auto pos = [&](int i, int j) { return Vec2{anchor.x + i * h, anchor.y + j * h}; };

  std::vector<double> values(static_cast<std::size_t>(nx) * ny);
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t r) {
    const int j = j0 + static_cast<int>(r);
    for (int i = i0; i <= i1; ++i) {
      const Vec2 p = pos(i, j);
      values[r * nx + (i - i0)] = phi(p.x, p.y);
    }
  });
  auto cell = [&](int i, int j) { return static_cast<std::size_t>(j - j0) * nx + (i - i0); };
  if (!(values[cell(0, 0)] > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "grid anchor is not inside the domain");
  }

  std::vector<int> index(values.size(), -2);  // -2 unvisited, -1 queued
  std::deque<std::array<int, 2>> queue{{0, 0}};
  index[cell(0, 0)] = -1;
  std::vector<std::array<int, 2>> found;
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    if (i == i0 || i == i1 || j == j0 || j == j1) {
      throw Error(ErrorKind::EnclosureViolation, "domain reaches the edge of the grid box");
    }
    found.push_back({i, j});
    for (const auto& s : kStep) {
      const int a = i + s[0], b = j + s[1];
      const std::size_t c = cell(a, b);
      if (index[c] == -2 && values[c] > 0.0) {
        index[c] = -1;
        queue.push_back({a, b});
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const auto& p, const auto& q) {
    return p[1] != q[1] ? p[1] < q[1] : p[0] < q[0];
  });

  IrregularGrid grid;
  grid.spacing = h;
  grid.origin = anchor;
  const std::size_t n = found.size();
  grid.ij = found;
  grid.nodes.resize(n);
  grid.neighbor.resize(n);
  grid.arm.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    index[cell(found[k][0], found[k][1])] = static_cast<int>(k);
    grid.nodes[k] = pos(found[k][0], found[k][1]);
  }

  parallel_for(n, [&](std::size_t k) {
    const auto [i, j] = found[k];
    const Vec2 p = grid.nodes[k];
    for (int d = 0; d < 4; ++d) {
      const int q = index[cell(i + kStep[d][0], j + kStep[d][1])];
      grid.neighbor[k][d] = q;
      if (q >= 0) {
        grid.arm[k][d] = 1.0;
        continue;
      }
      // phi(p) > 0 >= phi(neighbour): bisect to machine resolution.
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (lo + hi);
        if (m == lo || m == hi) break;
        if (phi(p.x + m * h * kStep[d][0], p.y + m * h * kStep[d][1]) > 0.0) lo = m; else hi = m;
      }
      grid.arm[k][d] = hi;
    }
  });

  std::vector<int> columns(nx, 0), rows(ny, 0);
  for (const auto& [i, j] : found) {
    ++columns[i - i0];
    ++rows[j - j0];
  }
  grid.max_column_nodes = *std::max_element(columns.begin(), columns.end());
  grid.max_row_nodes = *std::max_element(rows.begin(), rows.end());
  if (std::min(grid.max_column_nodes, grid.max_row_nodes) < kMinNodesAcross) {
    std::ostringstream msg;
    msg << "spacing " << h << " resolves the domain with only "
        << std::min(grid.max_column_nodes, grid.max_row_nodes) << " nodes across (need "
        << kMinNodesAcross << ")";
    throw Error(ErrorKind::Resolution, msg.str());
  }
  return grid;
}

IrregularGrid build_grid(const DomainExtract& domain, const ScalarField& field, double spacing) {
  return build_grid([&field](double x, double y) { return field.value(x, y); }, domain.anchor,
                    domain.boundary.bounds(), spacing);
}

double DiscreteField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

DiscreteField solve_poisson(const IrregularGrid& grid, double rhs, const BoundaryData& g,
                            const SolveOptions& options) {
  const System sys = assemble(grid, g);
  const Eigen::VectorXd b =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), rhs) + sys.boundary;
  const double bscale = max_abs(b);
  if (bscale == 0.0) {
    DiscreteField zero;
    zero.values.assign(grid.size(), 0.0);
    zero.positive = false;
    return zero;
  }

  Eigen::BiCGSTAB<RowMatrix, InteriorPreconditioner> solver;
  solver.compute(sys.a);
  solver.preconditioner().set(sys.interior);
  // 2-norm target that implies the max-norm target.
  solver.setTolerance(options.rel_tol / std::sqrt(static_cast<double>(grid.size())));
  solver.setMaxIterations(options.max_iterations);
  Eigen::VectorXd u = solver.solve(b);
  int iterations = static_cast<int>(solver.iterations());
  double residual = max_abs(b - sys.a * u) / bscale;
  // Restart from the current iterate if roundoff left the max-norm short.
  for (int restart = 0; restart < 5 && residual > options.rel_tol && solver.info() == Eigen::Success;
       ++restart) {
    u = solver.solveWithGuess(b, u);
    iterations += static_cast<int>(solver.iterations());
    residual = max_abs(b - sys.a * u) / bscale;
  }
  if (!u.allFinite() || residual > 10.0 * options.rel_tol) {
    std::ostringstream msg;
    msg << "BiCGSTAB stopped at relative residual " << residual << " after " << iterations
        << " iterations";
    throw Error(ErrorKind::Solver, msg.str());
  }
  DiscreteField out;
  out.values = to_std(u);
  out.residual = residual;
  out.iterations = iterations;
  out.positive = all_positive(out.values);
  return out;
}

Nonlinearity constant_nonlinearity(double c) {
  return {"const", [c](double) { return c; }, [](double) { return 0.0; }};
}

Nonlinearity nonlinearity_by_name(const std::string& name) {
  if (name == "const") return constant_nonlinearity(1.0);
  if (name == "linear") return {"linear", [](double u) { return 1.0 + u; }, [](double) { return 1.0; }};
  if (name == "exp") {
    return {"exp", [](double u) { return std::exp(u); }, [](double u) { return std::exp(u); }};
  }
  throw Error(ErrorKind::InvalidInput, "unknown nonlinearity '" + name + "' (const, linear, exp)");
}

NonlinearProblem::NonlinearProblem(Nonlinearity n, double lam)
    : nonlinearity(std::move(n)), lambda(lam) {
  if (!nonlinearity.f || !nonlinearity.f_prime) {
    throw Error(ErrorKind::InvalidInput, "nonlinearity needs f and f'");
  }
  if (!(nonlinearity.f(0.0) > 0.0)) throw Error(ErrorKind::InvalidInput, "f(0) must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::InvalidInput, "lambda must be positive");
  }
}

DiscreteField solve_semilinear(const IrregularGrid& grid, const NonlinearProblem& problem,
                               const DiscreteField* initial, const NewtonOptions& options) {
  const System sys = assemble(grid, {});
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double scale = problem.lambda * problem.f(0.0);

  Eigen::VectorXd u;
  if (initial) {
    if (initial->values.size() != grid.size()) {
      throw Error(ErrorKind::InvalidInput, "initial guess does not match the grid");
    }
    u = to_eigen(initial->values);
  } else {
    u = scale * to_eigen(solve_torsion(grid).values);
  }

  auto residual = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd r = sys.a * w;
    for (Eigen::Index i = 0; i < n; ++i) r[i] -= problem.lambda * problem.f(w[i]);
    return r;
  };

  Eigen::SparseLU<ColMatrix> lu;
  ColMatrix jac = sys.a;
  lu.analyzePattern(jac);

  Eigen::VectorXd r = residual(u);
  double rnorm = max_abs(r);
  int it = 0;
  for (; it < options.max_iterations && rnorm > options.tol * scale; ++it) {
    jac = sys.a;
    for (Eigen::Index i = 0; i < n; ++i) {
      jac.coeffRef(i, i) -= problem.lambda * problem.f_prime(u[i]);
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorKind::NoSolution, "singular Newton Jacobian at iteration " +
                                             std::to_string(it));
    }
    const Eigen::VectorXd du = lu.solve(-r);
    double t = 1.0;
    bool accepted = false;
    for (; t >= 1.0 / 1024.0; t *= 0.5) {
      const Eigen::VectorXd trial = u + t * du;
      const Eigen::VectorXd rt = residual(trial);
      const double tn = max_abs(rt);
      if (std::isfinite(tn) && tn <= (1.0 - 1e-4 * t) * rnorm) {
        u = trial;
        r = rt;
        rnorm = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "Newton stagnated at iteration " << it << " with residual " << rnorm / scale
          << " (lambda " << problem.lambda << ")";
      throw Error(ErrorKind::NoSolution, msg.str());
    }
  }
  if (!(rnorm <= options.tol * scale)) {
    std::ostringstream msg;
    msg << "Newton did not converge in " << options.max_iterations << " iterations (lambda "
        << problem.lambda << ", residual " << rnorm / scale << ")";
    throw Error(ErrorKind::NoSolution, msg.str());
  }
  DiscreteField out;
  out.values = to_std(u);
  out.residual = rnorm / scale;
  out.iterations = it;
  out.positive = all_positive(out.values);
  if (!out.positive) out.warnings.push_back("solution has nonpositive nodal values");
  return out;
}

Semistability semistability(const IrregularGrid& grid, const NonlinearProblem& problem,
                            const DiscreteField& u, double tolerance, double rel_tol,
                            int max_iterations) {
  if (u.values.size() != grid.size()) {
    throw Error(ErrorKind::InvalidInput, "field does not match the grid");
  }
  const System sys = assemble(grid, {});
  const auto n = static_cast<Eigen::Index>(grid.size());
  ColMatrix m = sys.a;
  for (Eigen::Index i = 0; i < n; ++i) {
    m.coeffRef(i, i) -= problem.lambda * problem.f_prime(u.values[i]);
  }
  // Shift below the Gershgorin bound so the wanted eigenvalue is nearest.
  Eigen::VectorXd offsum = Eigen::VectorXd::Zero(n), diag = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (ColMatrix::InnerIterator e(m, k); e; ++e) {
      if (e.row() == e.col()) diag[e.row()] = e.value();
      else offsum[e.row()] += std::abs(e.value());
    }
  }
  const double bound = (diag - offsum).minCoeff();
  const double sigma = bound - std::max(1.0, 1e-3 * std::abs(bound));
  ColMatrix shifted = m;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SparseLU<ColMatrix> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::EigenFailure, "shifted operator factorisation failed");
  }

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
  double mu = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd y = lu.solve(x);
    const double xy = x.dot(y);
    if (!(std::abs(xy) > 0.0) || !y.allFinite()) break;
    const double next = sigma + 1.0 / xy;  // x has unit norm
    const bool done = std::isfinite(mu) && std::abs(next - mu) <= rel_tol * std::abs(next - sigma);
    mu = next;
    x = y.normalized();
    if (done) return {mu, it, mu >= -tolerance};
  }
  throw Error(ErrorKind::EigenFailure, "inverse iteration did not settle");
}

ConvergenceStudy convergence_study(const IrregularGrid& grid, const Nonlinearity& nonlinearity,
                                   const std::vector<double>& lambdas, bool with_stability) {
  ConvergenceStudy out;
  const DiscreteField u0 = solve_torsion(grid);
  out.torsion_sup = u0.max_abs();
  out.entries.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t e) {
    ConvergenceEntry& entry = out.entries[e];
    entry.lambda = lambdas[e];
    try {
      const NonlinearProblem problem(nonlinearity, lambdas[e]);
      const DiscreteField u = solve_semilinear(grid, problem);
      const double scale = problem.lambda * problem.f(0.0);
      double err = 0.0;
      for (std::size_t i = 0; i < u.values.size(); ++i) {
        err = std::max(err, std::abs(u.values[i] / scale - u0.values[i]));
      }
      entry.sup_error = err;
      if (with_stability) entry.stability = semistability(grid, problem, u);
    } catch (const Error& ex) {
      entry.error = std::string(to_string(ex.kind())) + ": " + ex.what();
    }
  });
  out.monotone = true;
  const double negligible = 1e-12 * std::max(out.torsion_sup, 1.0);
  for (std::size_t e = 0; e < out.entries.size(); ++e) {
    if (!out.entries[e].sup_error) {
      out.monotone = false;
      continue;
    }
    if (e > 0 && out.entries[e - 1].sup_error) {
      const double prev = *out.entries[e - 1].sup_error, cur = *out.entries[e].sup_error;
      if (!(cur < prev || cur <= negligible)) out.monotone = false;
    }
  }
  return out;
}

OrderStudy torsion_order_study(const DomainFunction& phi, Vec2 anchor, const Rect& box,
                               const ScalarField& exact, const std::vector<double>& spacings) {
  OrderStudy out;
  out.entries.resize(spacings.size());
  for (std::size_t s = 0; s < spacings.size(); ++s) {
    const IrregularGrid grid = build_grid(phi, anchor, box, spacings[s]);
    const DiscreteField u = solve_torsion(grid);
    double err = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      err = std::max(err, std::abs(u.values[k] - exact.value(grid.nodes[k])));
    }
    out.entries[s] = {spacings[s], grid.size(), err, u.residual};
  }
  for (std::size_t s = 1; s < out.entries.size(); ++s) {
    const auto& a = out.entries[s - 1];
    const auto& b = out.entries[s];
    out.pairwise_orders.push_back(std::log(a.max_error / b.max_error) /
                                  std::log(a.spacing / b.spacing));
  }
  if (out.entries.size() >= 2) {
    double mx = 0, my = 0;
    for (const auto& e : out.entries) {
      mx += std::log(e.spacing);
      my += std::log(e.max_error);
    }
    mx /= out.entries.size();
    my /= out.entries.size();
    double sxy = 0, sxx = 0;
    for (const auto& e : out.entries) {
      sxy += (std::log(e.spacing) - mx) * (std::log(e.max_error) - my);
      sxx += (std::log(e.spacing) - mx) * (std::log(e.spacing) - mx);
    }
    out.observed_order = sxy / sxx;
  }
  return out;
}

}  // namespace torsion::pde
