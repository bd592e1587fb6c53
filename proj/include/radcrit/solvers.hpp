#pragma once

// Weak residuals, Dirichlet solves, principal eigenpairs, sign
// classification and the weak comparison harness.
//
// The nonlinear solver runs damped Newton on the regularized flux
// (|u'|^2 + eps^2)^{(p-2)/2} u' with eps decreasing geometrically from
// eps_start to eps_end (relative to the slope scale of the initial guess).
// For p = 2 the system is linear and no regularization is applied.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radcrit/domain.hpp"

namespace radcrit {

struct SolverOptions {
  /// Normalized residual tolerance; 0 picks 1e-10 for p = 2, 1e-8 otherwise.
  double tol = 0.0;
  int max_newton = 200;
  double eps_start = 1e-1;
  double eps_end = 1e-8;
  double eps_factor = 10.0;

  double resolved_tol(double p) const;
};

struct SolveReport {
  Field solution;
  int iterations = 0;
  double final_residual_norm = 0.0;
  double regularization_eps_final = 0.0;
  bool converged = false;
};

/// A discrete problem E'(u) = mass * source with some nodes held fixed.
struct DiscreteSystem {
  GridPtr grid;
  std::vector<double> potential;  // V at nodes
  std::vector<double> source;     // f at nodes (lumped against the mass)
  std::vector<char> fixed;        // 1 where u is prescribed
};

/// Dirichlet conditions at both ends (only the outer end on origin grids).
DiscreteSystem dirichlet_system(const RadialProblem& problem, GridPtr grid,
                                std::span<const double> source);

/// Newton with eps-continuation starting from `initial` (fixed nodes keep
/// their initial values). Never throws on non-convergence.
SolveReport solve_system(const DiscreteSystem& system, std::vector<double> initial,
                         const SolverOptions& options = {});

/// Residual of E'(u) - mass*f at every node; entries at fixed nodes are 0.
std::vector<double> system_residual(const DiscreteSystem& system, std::span<const double> u);

/// max |residual| over free nodes divided by the largest magnitude of the
/// individual terms (fluxes, potential, source) entering any free node.
double normalized_residual(const DiscreteSystem& system, std::span<const double> u);

/// Weak residual int(|u'|^{p-2}u' phi_i' + V|u|^{p-2}u phi_i - f phi_i) for
/// each node carrying an unknown; zero at Dirichlet boundary nodes.
Field weak_residual(const Field& u, const Field& f, const RadialProblem& problem);

enum class SolveMode { unchecked, checked };

struct Boundary {
  double left = 0.0;
  double right = 0.0;
};

/// Solve Q'(u) = f on f's grid with the given boundary values. In checked
/// mode a principal eigenvalue <= 0 raises PreconditionError.
SolveReport solve_dirichlet(const RadialProblem& problem, Boundary boundary, const Field& f,
                            const SolverOptions& options = {},
                            SolveMode mode = SolveMode::unchecked);

struct EigenOptions {
  double rel_tol = 1e-8;
  int max_iter = 2000;
  SolverOptions solver{};
};

struct EigenResult {
  double lambda = 0.0;
  Field eigenfunction;
  int iterations = 0;
  bool converged = false;
  /// Constant added to V during the iteration (already subtracted from lambda).
  double shift = 0.0;
  std::vector<double> rayleigh_history;
};

/// Principal Dirichlet eigenpair of Q_V on the grid; eigenfunction positive
/// inside, normalized so that int |phi|^p r^(d-1) dr = 1.
EigenResult principal_eigenpair(const RadialProblem& problem, GridPtr grid,
                                const EigenOptions& options = {});

/// Principal eigenpair of Q_V'(u) = t W |u|^{p-2} u with W >= 0 nodal
/// weights (requires Q_V coercive on the grid). Eigenfunction normalized by
/// int W |phi|^p = 1; `lambda` holds t.
EigenResult weighted_eigenpair(const RadialProblem& problem, GridPtr grid,
                               std::span<const double> weight, const EigenOptions& options = {});

/// Rayleigh quotient (sum k|du|^p + sum m V|u|^p) / sum m w |u|^p; weight
/// empty means w = 1.
double rayleigh_quotient(const Grid& grid, std::span<const double> u,
                         std::span<const double> potential, std::span<const double> weight = {});

enum class SignClass { solution, supersolution, subsolution, neither };
std::string to_string(SignClass s);

/// Classifies u by the pointwise residual residual_j / (mass_j * max|u|^{p-1})
/// at the nodes carrying unknowns, or only at nodes strictly inside
/// `region` (coordinates) when given.
SignClass classify_sign(const Field& u, const RadialProblem& problem, double tol);
SignClass classify_sign(const Field& u, const RadialProblem& problem, double tol,
                        const Interval& region);

/// Largest pointwise residual magnitude used by classify_sign.
double pointwise_residual_extent(const Field& u, const RadialProblem& problem, double& min_out,
                                 double& max_out, const Interval* region = nullptr);

struct ComparisonResult {
  bool holds = false;
  double max_violation = 0.0;
};

/// Weak comparison on the grid of u1/u2. Hypotheses checked first
/// (PreconditionError names every failed one); then reports whether
/// u1 <= u2 + tol nodewise.
ComparisonResult wcp_check(const Field& u1, const Field& u2, const RadialProblem& problem,
                           double tol = 1e-8, double hypothesis_tol = 1e-7);

}  // namespace radcrit
