#include "radcrit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "radcrit/energy.hpp"
#include "radcrit/errors.hpp"

namespace radcrit {

namespace {

// Signed power |x|^{p-2} x with 0 at x = 0.
double spow(double x, double q) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), q), x);
}

struct Regularization {
  double eps = 0.0;
  // Jacobian-only regularization; the final stage evaluates the exact
  // residual but keeps a nondegenerate Jacobian.
  double jac_eps = -1.0;
  // Local scales: increment per cell and magnitude per node.
  const std::vector<double>* cell_scale = nullptr;
  const std::vector<double>* node_scale = nullptr;
};

// Cell flux k*(du^2 + eta^2)^{(p-2)/2} du and its derivative in du.
// A few ulps: the error of forming a nodal difference and its power.
constexpr double kRoundoff = 8.0 * 2.220446049250313e-16;

struct Flux {
  double value;
  double derivative;
};

Flux cell_flux(double k, double du, double eta, double p) {
  if (p == 2.0) return {k * du, k};
  if (eta == 0.0) {
    const double a = std::max(std::abs(du), 1e-150);
    return {k * spow(du, p - 1.0), k * (p - 1.0) * std::pow(a, p - 2.0)};
  }
  const double s = du * du + eta * eta;
  return {k * std::pow(s, 0.5 * (p - 2.0)) * du,
          k * std::pow(s, 0.5 * (p - 4.0)) * ((p - 1.0) * du * du + eta * eta)};
}

Flux potential_term(double m, double v, double u, double zeta, double p) {
  if (v == 0.0) return {0.0, 0.0};
  if (p == 2.0) return {m * v * u, m * v};
  if (zeta == 0.0) {
    const double a = std::max(std::abs(u), 1e-150);
    return {m * v * spow(u, p - 1.0), m * v * (p - 1.0) * std::pow(a, p - 2.0)};
  }
  const double s = u * u + zeta * zeta;
  return {m * v * std::pow(s, 0.5 * (p - 2.0)) * u,
          m * v * std::pow(s, 0.5 * (p - 4.0)) * ((p - 1.0) * u * u + zeta * zeta)};
}

struct Assembly {
  std::vector<double> residual;
  std::vector<double> diag, lower, upper;  // lower[j] couples j to j-1, upper[j] to j+1
  std::vector<double> scale;               // per-node magnitude of contributing terms
  std::vector<double> rounding;            // flux change from rounding the nodal values
};

Assembly assemble(const DiscreteSystem& sys, std::span<const double> u, Regularization reg,
                  bool with_jacobian) {
  const Grid& g = *sys.grid;
  const double p = g.p();
  const std::size_t n = g.size();
  Assembly a;
  a.residual.assign(n, 0.0);
  a.scale.assign(n, 0.0);
  a.rounding.assign(n, 0.0);
  if (with_jacobian) {
    a.diag.assign(n, 0.0);
    a.lower.assign(n, 0.0);
    a.upper.assign(n, 0.0);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double sc = reg.cell_scale ? (*reg.cell_scale)[i] : 0.0;
    Flux f = cell_flux(g.stiffness(i), u[i + 1] - u[i], reg.eps * sc, p);
    if (with_jacobian && reg.jac_eps >= 0.0)
      f.derivative = cell_flux(g.stiffness(i), u[i + 1] - u[i], reg.jac_eps * sc, p).derivative;
    // d/du_i of (1/p) k |u_{i+1}-u_i|^p is -flux; d/du_{i+1} is +flux.
    a.residual[i] -= f.value;
    a.residual[i + 1] += f.value;
    a.scale[i] = std::max(a.scale[i], std::abs(f.value));
    a.scale[i + 1] = std::max(a.scale[i + 1], std::abs(f.value));
    // Differences of O(|u|) values carry an absolute error of eps |u|; on
    // nearly flat cells that dominates the flux itself.
    const double du = std::abs(u[i + 1] - u[i]);
    const double delta = kRoundoff * (std::abs(u[i]) + std::abs(u[i + 1]));
    const double rb = g.stiffness(i) * (std::pow(du + delta, p - 1.0) - std::pow(du, p - 1.0));
    a.rounding[i] += rb;
    a.rounding[i + 1] += rb;
    if (with_jacobian) {
      a.diag[i] += f.derivative;
      a.diag[i + 1] += f.derivative;
      a.upper[i] -= f.derivative;
      a.lower[i + 1] -= f.derivative;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double m = g.mass(j);
    if (sys.potential[j] != 0.0) {
      const double sc = reg.node_scale ? (*reg.node_scale)[j] : 0.0;
      Flux t = potential_term(m, sys.potential[j], u[j], reg.eps * sc, p);
      if (with_jacobian && reg.jac_eps >= 0.0)
        t.derivative = potential_term(m, sys.potential[j], u[j], reg.jac_eps * sc, p).derivative;
      a.residual[j] += t.value;
      a.scale[j] = std::max(a.scale[j], std::abs(t.value));
      if (with_jacobian) a.diag[j] += t.derivative;
    }
    if (!sys.source.empty() && sys.source[j] != 0.0) {
      const double s = m * sys.source[j];
      a.residual[j] -= s;
      a.scale[j] = std::max(a.scale[j], std::abs(s));
    }
    if (sys.fixed[j]) a.residual[j] = 0.0;
  }
  return a;
}

double norm_of(const Assembly& a, const DiscreteSystem& sys) {
  double rmax = 0.0, smax = 0.0;
  for (std::size_t j = 0; j < a.residual.size(); ++j) {
    if (sys.fixed[j]) continue;
    rmax = std::max(rmax, std::max(0.0, std::abs(a.residual[j]) - a.rounding[j]));
    smax = std::max(smax, a.scale[j]);
  }
  if (smax == 0.0) return rmax == 0.0 ? 0.0 : kInf;
  return rmax / smax;
}

double squared_norm(const Assembly& a) {
  double s = 0.0;
  for (double r : a.residual) s += r * r;
  return s;
}

// Tridiagonal solve of J delta = -r restricted to free nodes.
bool newton_direction(const Assembly& a, const DiscreteSystem& sys, std::vector<double>& delta) {
  const std::size_t n = a.residual.size();
  std::vector<double> diag(n), upper(n), rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (sys.fixed[j]) {
      diag[j] = 1.0;
      upper[j] = 0.0;
      rhs[j] = 0.0;
    } else {
      diag[j] = a.diag[j];
      upper[j] = (j + 1 < n && !sys.fixed[j + 1]) ? a.upper[j] : 0.0;
      rhs[j] = -a.residual[j];
    }
  }
  std::vector<double> lower(n, 0.0);
  for (std::size_t j = 1; j < n; ++j)
    lower[j] = (!sys.fixed[j] && !sys.fixed[j - 1]) ? a.lower[j] : 0.0;
  // Thomas forward sweep.
  for (std::size_t j = 1; j < n; ++j) {
    if (lower[j] == 0.0) continue;
    if (diag[j - 1] == 0.0 || !std::isfinite(diag[j - 1])) return false;
    const double w = lower[j] / diag[j - 1];
    diag[j] -= w * upper[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  delta.assign(n, 0.0);
  for (std::size_t jj = n; jj-- > 0;) {
    if (diag[jj] == 0.0 || !std::isfinite(diag[jj])) return false;
    const double next = jj + 1 < n ? delta[jj + 1] : 0.0;
    delta[jj] = (rhs[jj] - upper[jj] * next) / diag[jj];
    if (!std::isfinite(delta[jj])) return false;
  }
  return true;
}

}  // namespace

double SolverOptions::resolved_tol(double p) const {
  if (tol > 0.0) return tol;
  return p == 2.0 ? 1e-10 : 1e-8;
}

DiscreteSystem dirichlet_system(const RadialProblem& problem, GridPtr grid,
                                std::span<const double> source) {
  DiscreteSystem sys;
  sys.potential = sample_potential(*grid, problem.potential);
  sys.source.assign(source.begin(), source.end());
  if (!sys.source.empty() && sys.source.size() != grid->size())
    throw ArgumentError("source length differs from node count");
  sys.fixed.assign(grid->size(), 0);
  if (!grid->has_origin()) sys.fixed.front() = 1;
  sys.fixed.back() = 1;
  sys.grid = std::move(grid);
  return sys;
}

std::vector<double> system_residual(const DiscreteSystem& system, std::span<const double> u) {
  return assemble(system, u, {}, false).residual;
}

double normalized_residual(const DiscreteSystem& system, std::span<const double> u) {
  return norm_of(assemble(system, u, {}, false), system);
}

SolveReport solve_system(const DiscreteSystem& sys, std::vector<double> u,
                         const SolverOptions& options) {
  const Grid& g = *sys.grid;
  const double p = g.p();
  const double tol = options.resolved_tol(p);
  if (u.size() != g.size()) throw ArgumentError("initial guess length differs from node count");

  // Regularization scales follow the local size of the current iterate,
  // floored by a small multiple of the global one, so solutions spanning
  // many decades are regularized uniformly in relative terms.
  std::vector<double> cell_scale(g.cells()), node_scale(g.size());
  auto update_scales = [&]() {
    double slope = 0.0, value = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
      slope = std::max(slope, std::abs(u[i + 1] - u[i]) / g.cell_length(i));
    for (double x : u) value = std::max(value, std::abs(x));
    if (value == 0.0) value = 1.0;
    if (slope == 0.0) slope = value / g.interval().length();
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
      cell_scale[i] = std::max(std::abs(u[i + 1] - u[i]), 1e-10 * slope * g.cell_length(i));
    for (std::size_t j = 0; j < u.size(); ++j) node_scale[j] = std::max(std::abs(u[j]), 1e-10 * value);
  };

  std::vector<double> stages;
  if (p == 2.0) {
    stages.push_back(0.0);
  } else {
    for (double e = options.eps_start; e > options.eps_end * (1.0 - 1e-12); e /= options.eps_factor)
      stages.push_back(e);
    if (stages.empty() || stages.back() > options.eps_end * (1.0 + 1e-12))
      stages.push_back(options.eps_end);
    // The regularized flux differs from the true one by O(eps^{p-1}) on
    // nearly flat cells, so finish on the unregularized system.
    stages.push_back(0.0);
  }

  int iterations = 0;
  double eps_final = 0.0;
  std::vector<double> delta, trial(u.size());
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const bool last = s + 1 == stages.size();
    update_scales();
    Regularization reg{stages[s], -1.0, &cell_scale, &node_scale};
    if (stages[s] == 0.0 && p != 2.0) reg.jac_eps = options.eps_end;
    const double stage_tol = last ? tol : std::max(tol, 1e-6);
    eps_final = stages[s];
    Assembly a = assemble(sys, u, reg, true);
    for (int it = 0; it < options.max_newton; ++it) {
      if (norm_of(a, sys) <= stage_tol) break;
      if (!newton_direction(a, sys, delta)) break;
      ++iterations;
      const double phi0 = squared_norm(a);
      double t = 1.0;
      bool accepted = false;
      Assembly at;
      for (int ls = 0; ls < 40; ++ls) {
        for (std::size_t j = 0; j < u.size(); ++j) trial[j] = u[j] + t * delta[j];
        at = assemble(sys, trial, reg, true);
        const double phi = squared_norm(at);
        if (std::isfinite(phi) && phi <= (1.0 - 1e-4 * t) * phi0) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
      u.swap(trial);
      a = std::move(at);
    }
  }

  SolveReport report{Field(sys.grid, u)};
  report.iterations = iterations;
  report.regularization_eps_final = eps_final;
  report.final_residual_norm = normalized_residual(sys, u);
  report.converged = report.final_residual_norm <= tol;
  return report;
}

Field weak_residual(const Field& u, const Field& f, const RadialProblem& problem) {
  if (f.size() != u.size()) throw ArgumentError("f length differs from u");
  auto sys = dirichlet_system(problem, u.grid_ptr(), f.values());
  return Field(u.grid_ptr(), system_residual(sys, u.values()));
}

namespace {

double principal_eigenvalue_quick(const RadialProblem& problem, const GridPtr& grid);

}  // namespace

SolveReport solve_dirichlet(const RadialProblem& problem, Boundary boundary, const Field& f,
                            const SolverOptions& options, SolveMode mode) {
  problem.validate();
  if (!std::isfinite(boundary.left) || !std::isfinite(boundary.right))
    throw ArgumentError("boundary values must be finite");
  const GridPtr& grid = f.grid_ptr();
  if (mode == SolveMode::checked) {
    const double lambda = principal_eigenvalue_quick(problem, grid);
    if (!(lambda > 0.0))
      throw PreconditionError("principal eigenvalue of the level is not positive");
  }
  auto sys = dirichlet_system(problem, grid, f.values());
  std::vector<double> u0(grid->size());
  const double a = grid->has_origin() ? boundary.right : boundary.left;
  for (std::size_t j = 0; j < u0.size(); ++j) {
    const double t = (grid->coord(j) - grid->coord(0)) / grid->interval().length();
    u0[j] = a + t * (boundary.right - a);
  }
  if (!grid->has_origin()) u0.front() = boundary.left;
  u0.back() = boundary.right;

  if (problem.p != 2.0) {
    // Warm start from the p = 2 problem with the same data.
    RadialProblem linear = problem;
    linear.p = 2.0;
    auto lgrid = std::make_shared<const Grid>(std::vector<double>(grid->coords().begin(),
                                                                  grid->coords().end()),
                                              grid->coordinate(), 2.0, grid->d(),
                                              grid->has_origin(), grid->spacing());
    auto lsys = dirichlet_system(linear, lgrid, f.values());
    auto lin = solve_system(lsys, u0, options);
    bool usable = true;
    for (double x : lin.solution.values()) usable = usable && std::isfinite(x);
    if (usable) {
      u0.assign(lin.solution.values().begin(), lin.solution.values().end());
    }
  }
  return solve_system(sys, std::move(u0), options);
}

// ---------------------------------------------------------------- eigen

double rayleigh_quotient(const Grid& grid, std::span<const double> u,
                         std::span<const double> potential, std::span<const double> weight) {
  const double num = energy_sum(grid, u, potential);
  double den = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double w = weight.empty() ? 1.0 : weight[j];
    if (w != 0.0 && u[j] != 0.0) den += grid.mass(j) * w * std::pow(std::abs(u[j]), grid.p());
  }
  return num / den;
}

namespace {

struct IterationSetup {
  double shift = 0.0;
  bool weighted = false;
};

// Inverse power iteration: E_{V+shift}'(u_{k+1}) = w |u_k|^{p-2} u_k.
EigenResult inverse_iteration(const RadialProblem& problem, const GridPtr& grid,
                              std::span<const double> weight, const EigenOptions& options,
                              IterationSetup setup, bool& positivity_lost) {
  const Grid& g = *grid;
  const double p = g.p();
  positivity_lost = false;
  auto sys = dirichlet_system(problem, grid, {});
  const std::vector<double> potential = sys.potential;
  if (setup.shift != 0.0)
    for (double& v : sys.potential) v += setup.shift;
  sys.source.assign(g.size(), 0.0);

  std::vector<double> w(g.size(), 1.0);
  if (setup.weighted) w.assign(weight.begin(), weight.end());

  auto normalize = [&](std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      if (w[j] != 0.0 && u[j] != 0.0) s += g.mass(j) * w[j] * std::pow(std::abs(u[j]), p);
    const double c = std::pow(s, -1.0 / p);
    for (double& x : u) x *= c;
  };

  std::vector<double> u(g.size(), 1.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (sys.fixed[j]) u[j] = 0.0;
  normalize(u);

  EigenResult result{0.0, Field(grid, u)};
  result.shift = setup.shift;
  std::vector<double> guess;
  double prev = kInf;
  SolverOptions sopt = options.solver;
  for (int k = 0; k < options.max_iter; ++k) {
    for (std::size_t j = 0; j < g.size(); ++j) sys.source[j] = w[j] * spow(u[j], p - 1.0);
    if (guess.empty()) {
      guess = u;
    }
    std::vector<double> next;
    auto attempt = [&](const std::vector<double>& start, const SolverOptions& so) {
      auto rep = solve_system(sys, start, so);
      next.assign(rep.solution.values().begin(), rep.solution.values().end());
      bool ok = rep.converged || rep.final_residual_norm < 1e-6;
      for (std::size_t j = 0; j < g.size() && ok; ++j) {
        if (!std::isfinite(next[j])) ok = false;
        if (!sys.fixed[j] && next[j] <= 0.0) ok = false;
      }
      return ok;
    };
    bool ok = attempt(guess, sopt);
    // A shortened continuation from the warm start can stall; redo the full one.
    if (!ok && p != 2.0) ok = attempt(guess, options.solver);
    if (!ok && p != 2.0) {
      std::vector<double> cold(g.size(), 1.0);
      for (std::size_t j = 0; j < g.size(); ++j)
        if (sys.fixed[j]) cold[j] = 0.0;
      ok = attempt(cold, options.solver);
    }
    if (!ok) {
      positivity_lost = true;
      result.iterations = k;
      return result;
    }
    // Warm start for the next solve: the new iterate rescaled by the
    // current eigenvalue estimate has the right magnitude.
    normalize(next);
    u = next;
    const double lambda = rayleigh_quotient(g, u, potential, setup.weighted ? w : std::span<const double>{});
    result.rayleigh_history.push_back(lambda);
    const double shifted = setup.weighted ? lambda : lambda + setup.shift;
    guess = u;
    if (shifted > 0.0) {
      const double c = std::pow(shifted, -1.0 / (p - 1.0));
      for (double& x : guess) x *= c;
    }
    if (p != 2.0) sopt.eps_start = std::max(options.solver.eps_end, 1e-4);
    result.iterations = k + 1;
    result.lambda = lambda;
    if (std::abs(lambda - prev) <= options.rel_tol * std::abs(lambda)) {
      result.converged = true;
      break;
    }
    prev = lambda;
  }
  result.eigenfunction = Field(grid, u);
  return result;
}

double principal_eigenvalue_quick(const RadialProblem& problem, const GridPtr& grid) {
  return principal_eigenpair(problem, grid).lambda;
}

}  // namespace

EigenResult principal_eigenpair(const RadialProblem& problem, GridPtr grid,
                                const EigenOptions& options) {
  problem.validate();
  const auto pot = sample_potential(*grid, problem.potential);
  for (std::size_t j = 0; j < grid->size(); ++j)
    if (!std::isfinite(grid->mass(j))) throw ArgumentError("grid mass overflows; use a smaller level");
  double vmin = 0.0;
  for (double v : pot) vmin = std::min(vmin, v);
  bool lost = false;
  {
    // Without shift first: valid whenever lambda_1 > 0, and much faster.
    auto r = inverse_iteration(problem, grid, {}, options, {}, lost);
    if (!lost && (vmin >= 0.0 || (r.converged && r.lambda > 0.0))) return r;
  }
  const double shift = -vmin + 1.0;
  auto r = inverse_iteration(problem, grid, {}, options, {shift, false}, lost);
  if (lost) r.converged = false;
  return r;
}

EigenResult weighted_eigenpair(const RadialProblem& problem, GridPtr grid,
                               std::span<const double> weight, const EigenOptions& options) {
  problem.validate();
  if (weight.size() != grid->size()) throw ArgumentError("weight length differs from node count");
  bool any = false;
  for (double w : weight) {
    if (w < 0.0) throw ArgumentError("weight must be nonnegative");
    any = any || w > 0.0;
  }
  if (!any) throw ArgumentError("weight vanishes identically");
  bool lost = false;
  auto r = inverse_iteration(problem, grid, weight, options, {0.0, true}, lost);
  if (lost) throw PreconditionError("Q_V is not coercive on the level (iterate lost positivity)");
  return r;
}

// ---------------------------------------------------------------- classification

std::string to_string(SignClass s) {
  switch (s) {
    case SignClass::solution: return "solution";
    case SignClass::supersolution: return "supersolution";
    case SignClass::subsolution: return "subsolution";
    case SignClass::neither: return "neither";
  }
  return "neither";
}

double pointwise_residual_extent(const Field& u, const RadialProblem& problem, double& min_out,
                                 double& max_out, const Interval* region) {
  const Grid& g = u.grid();
  auto sys = dirichlet_system(problem, u.grid_ptr(), {});
  const auto res = system_residual(sys, u.values());
  double umax = 0.0;
  for (double x : u.values()) umax = std::max(umax, std::abs(x));
  const double norm = std::pow(umax, g.p() - 1.0);
  min_out = kInf;
  max_out = -kInf;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (sys.fixed[j]) continue;
    if (region && !(region->lo < g.coord(j) && g.coord(j) < region->hi)) continue;
    const double m = g.mass(j);
    const double v = std::isfinite(m) ? res[j] / (m * norm) : 0.0;
    min_out = std::min(min_out, v);
    max_out = std::max(max_out, v);
  }
  if (min_out > max_out) min_out = max_out = 0.0;
  return std::max(std::abs(min_out), std::abs(max_out));
}

namespace {

SignClass classify_impl(const Field& u, const RadialProblem& problem, double tol,
                        const Interval* region) {
  const Grid& g = u.grid();
  for (std::size_t j = g.first_interior(); j <= g.last_interior(); ++j) {
    if (region && !(region->lo < g.coord(j) && g.coord(j) < region->hi)) continue;
    if (!(u[j] > 0.0)) throw ArgumentError("classify_sign expects u > 0 on the interior");
  }
  double lo = 0.0, hi = 0.0;
  pointwise_residual_extent(u, problem, lo, hi, region);
  const bool super = lo >= -tol;
  const bool sub = hi <= tol;
  if (super && sub) return SignClass::solution;
  if (super) return SignClass::supersolution;
  if (sub) return SignClass::subsolution;
  return SignClass::neither;
}

}  // namespace

SignClass classify_sign(const Field& u, const RadialProblem& problem, double tol) {
  return classify_impl(u, problem, tol, nullptr);
}

SignClass classify_sign(const Field& u, const RadialProblem& problem, double tol,
                        const Interval& region) {
  return classify_impl(u, problem, tol, &region);
}

// ---------------------------------------------------------------- comparison

ComparisonResult wcp_check(const Field& u1, const Field& u2, const RadialProblem& problem,
                           double tol, double hypothesis_tol) {
  if (u1.size() != u2.size()) throw ArgumentError("fields of different length");
  const Grid& g = u1.grid();
  auto sys = dirichlet_system(problem, u1.grid_ptr(), {});
  const auto r1 = system_residual(sys, u1.values());
  const auto r2 = system_residual(sys, u2.values());
  // Residuals are compared on the scale of the terms entering them, as in
  // the solver's normalized residual.
  const double p = g.p();
  double scale = 0.0;
  for (const Field* f : {&u1, &u2}) {
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const double du = std::abs((*f)[i + 1] - (*f)[i]);
      if (du > 0.0) scale = std::max(scale, g.stiffness(i) * std::pow(du, p - 1.0));
    }
    for (std::size_t j = 0; j < g.size(); ++j)
      if (sys.potential[j] != 0.0 && std::isfinite(g.mass(j)))
        scale = std::max(scale, std::abs(g.mass(j) * sys.potential[j]) *
                                    std::pow(std::abs((*f)[j]), p - 1.0));
  }
  const std::vector<double>& q1 = r1;
  const std::vector<double>& q2 = r2;
  const double htol = hypothesis_tol * scale;
  std::vector<std::string> failed;
  bool ordered = true, nonneg = true;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (sys.fixed[j]) continue;
    ordered = ordered && q1[j] <= q2[j] + htol;
    nonneg = nonneg && q2[j] >= -htol;
  }
  if (!ordered) failed.push_back("Q'(u1) <= Q'(u2)");
  if (!nonneg) failed.push_back("Q'(u2) >= 0");
  bool bdry_order = true, bdry_sign = true;
  for (std::size_t j : {std::size_t{0}, g.size() - 1}) {
    if (!sys.fixed[j]) continue;
    bdry_order = bdry_order && u1[j] <= u2[j] + tol;
    bdry_sign = bdry_sign && u2[j] >= -tol;
  }
  if (!bdry_order) failed.push_back("u1 <= u2 on the boundary");
  if (!bdry_sign) failed.push_back("u2 >= 0 on the boundary");
  bool vnonneg = true;
  for (double v : sys.potential) vnonneg = vnonneg && v >= 0.0;
  if (!vnonneg) {
    const auto eig = principal_eigenpair(problem, u1.grid_ptr());
    if (!(eig.lambda > 0.0)) failed.push_back("lambda_1(level) > 0");
  }
  if (!failed.empty()) {
    std::ostringstream os;
    os << "weak comparison hypotheses failed:";
    for (const auto& f : failed) os << ' ' << f << ';';
    throw PreconditionError(os.str());
  }
  ComparisonResult out;
  out.max_violation = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    out.max_violation = std::max(out.max_violation, u1[j] - u2[j]);
  out.holds = out.max_violation <= tol;
  return out;
}

}  // namespace radcrit
