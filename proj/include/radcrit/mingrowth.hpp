#pragma once

// Positive solutions of minimal growth: u^K limits, point-singularity
// solutions, singularity exponents, removability, variational certificates
// and the certified comparison principle.

#include <optional>
#include <string>
#include <vector>

#include "radcrit/domain.hpp"
#include "radcrit/solvers.hpp"

namespace radcrit {

/// Value of a field at a physical radius (linear interpolation in the
/// field's own coordinate).
double value_at_radius(const Field& u, double r);

struct MinimalGrowthOptions {
  std::size_t nodes_per_segment = 160;
  /// Window (radii) for the Cauchy criterion; default (1.5 k.hi, 3 k.hi).
  std::optional<Interval> window;
  double cauchy_tol = 1e-5;
  SolverOptions solver{};
};

struct MinimalGrowthLevel {
  std::size_t level = 0;  // 1-based index into the schedule
  Interval interval;
  /// u_N on the global grid (zero outside the level, trace values on K).
  Field u;
  double residual = 0.0;
  bool converged = false;
};

struct MinimalGrowthRun {
  CompactSetSpec k;
  std::vector<MinimalGrowthLevel> levels;
  /// u^K: the last computed u_N.
  std::optional<Field> limit;
  /// max(u_N - u_{N+1}) over all nodes, per consecutive pair.
  std::vector<double> monotonicity_log;
  /// max |u_{N+1} - u_N| on the window, per consecutive pair.
  std::vector<double> cauchy_log;
  Interval window;
  bool cauchy_met = false;
  std::string diagnostics;
};

/// Dirichlet solves on Omega_N \ K with the traces of K on its boundary and 0
/// on the boundary of Omega_N. Levels not containing K strictly are skipped.
MinimalGrowthRun uK_limit(const RadialProblem& problem, const CompactSetSpec& k,
                          const ExhaustionSchedule& schedule,
                          const MinimalGrowthOptions& options = {});

struct PointSingularityRun {
  std::vector<MinimalGrowthLevel> levels;
  /// Last u_N normalized by u_N(x1) = 1.
  std::optional<Field> limit;
  std::string diagnostics;
};

/// Singularity at the inner end x0 = levels' lower limit (0 for radial
/// problems). Level N solves Q'(u) = f_N on (a_N, b_N) with zero boundary data
/// and f_N a unit bump on (a_N, 2 a_N); u_N is then rescaled so u_N(x1) = 1.
PointSingularityRun point_singularity_solution(const RadialProblem& problem, double x1,
                                               const ExhaustionSchedule& schedule,
                                               const MinimalGrowthOptions& options = {});

struct ExponentFit {
  double slope = 0.0;
  /// Root mean square of the least-squares residual.
  double residual = 0.0;
  std::size_t points = 0;
};

enum class ExponentMode { power, logarithmic };

/// Least-squares slope of log u against log|r - x0| over nodes in the window
/// (radii); logarithmic mode uses log(-log|r - x0|) as abscissa.
ExponentFit singularity_exponent(const Field& u, double x0, const Interval& fit_window,
                                 ExponentMode mode = ExponentMode::power);

/// (p - d)/(p - 1)
double alpha_exponent(double d, double p);

enum class Removability { removable, nonremovable_blowup, nonremovable_flux, undetermined };
std::string to_string(Removability r);

struct RemovabilityReport {
  Removability verdict = Removability::undetermined;
  /// Shell maxima of u on dyadic shells |r - x0| in [delta, 2 delta], innermost first.
  std::vector<double> shell_maxima;
  /// Residual at x0 after continuous extension, over the flux scale.
  double flux_residual = 0.0;
};

/// u is a positive solution near x0 (interior node or left end of the grid).
RemovabilityReport removability_test(const RadialProblem& problem, const Field& u, double x0,
                                     double tol = 0.0);

enum class CertificateVerdict { decaying_to_zero, bounded_away };
std::string to_string(CertificateVerdict v);

struct CertificateLevel {
  std::size_t level = 0;
  double mu = 0.0;
  /// Minimizer w_N on the certificate grid of the level, int_B |w|^p = 1.
  Field w;
  double normalization = 0.0;
  int iterations = 0;
};

struct CertificateRun {
  /// Omega_2 = [0, omega2.k.hi] (or the given interval); region is outside it.
  CompactSetSpec omega2;
  Interval b;
  std::vector<CertificateLevel> levels;
  CertificateVerdict verdict = CertificateVerdict::bounded_away;
};

struct CertificateOptions {
  std::size_t nodes_per_segment = 160;
  int max_iter = 4000;
  double rel_tol = 1e-12;
  /// Projected descent iterations for p != 2.
  int descent_iter = 3000;
};

/// mu_N = inf { int_{Omega_N \ Omega_2} L(w, u) : w >= 0, w = 0 on the outer
/// boundary, int_B |w|^p = 1 } per level; p = 2 solves the generalized
/// eigenproblem of int u^2 |(w/u)'|^2 against the mass form on B, p != 2
/// runs projected descent from the p = 2 minimizer.
CertificateRun minimal_growth_certificate(const RadialProblem& problem, const Field& u,
                                          const CompactSetSpec& omega2, const Interval& b,
                                          const ExhaustionSchedule& schedule,
                                          const CertificateOptions& options = {});

/// Verdict from the last three ratios mu_N / mu_{N-1} (each <= 0.9).
CertificateVerdict certificate_trend(const std::vector<double>& mu);

struct ComparisonOptions {
  /// Tolerance for the sub/supersolution classification.
  double sign_tol = 1e-6;
  double tol = 1e-8;
};

/// u_sub <= v_super + tol on the nodes outside Omega_2, after checking the
/// hypotheses (sub/supersolution outside Omega_2, order on its boundary, a
/// decaying certificate for u_sub).
ComparisonResult comparison_check(const RadialProblem& problem, const Field& u_sub,
                                  const Field& v_super, const CompactSetSpec& omega2,
                                  const CertificateRun& certificate,
                                  const ComparisonOptions& options = {});

}  // namespace radcrit
