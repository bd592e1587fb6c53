#pragma once

// Criticality of Q_V along an exhaustion: thresholds t_N, null sequences,
// verdicts, ground states, Q-capacity and strict-positivity weights.
//
// For each level Omega_N the threshold is
//   t_N = inf { p Q_V(u) / int W |u|^p : u supported in Omega_N },
// attained by the principal eigenfunction v_N of Q'_V(v) = t W |v|^{p-2} v.
// Q_V is critical iff t_N -> 0.

#include <optional>
#include <string>
#include <vector>

#include "radcrit/domain.hpp"
#include "radcrit/solvers.hpp"

namespace radcrit {

enum class Verdict { critical, subcritical, undetermined };
std::string to_string(Verdict v);

struct CriticalityOptions {
  /// Cells between consecutive breakpoints of the nested grid.
  std::size_t nodes_per_segment = 120;
  double eps_crit = 1e-4;
  EigenOptions eigen{1e-12, 5000, {}};
};

/// Smooth unit bump on the middle third of the first level, taken in the
/// schedule's coordinate and mapped back to radii.
PotentialSpec default_probe(const ExhaustionSchedule& schedule);

/// Grids for every level of the schedule, refined at the probe support and
/// at the reference points.
NestedGrids criticality_grids(const RadialProblem& problem, const ExhaustionSchedule& schedule,
                              const PotentialSpec& probe, std::size_t nodes_per_segment);

struct Threshold {
  double t = 0.0;
  /// Principal eigenfunction, normalized by int W |v|^p = 1.
  Field v;
  int iterations = 0;
  bool converged = false;
};

/// t_N on one level grid. Throws PreconditionError when Q_V is not
/// nonnegative on the level.
Threshold threshold_tN(const RadialProblem& problem, const GridPtr& level, const PotentialSpec& probe,
                       const EigenOptions& options = CriticalityOptions{}.eigen);

struct NullSequenceEntry {
  std::size_t level = 0;  // 1-based
  Interval interval;      // level in schedule coordinates
  double t = 0.0;
  /// v_N normalized by v_N(x0) = 1.
  Field v;
  double energy = 0.0;             // Q_V(v_N)
  double weighted_integral = 0.0;  // int W |v_N|^p
  /// |Q_V(v_N) - (t/p) int W |v_N|^p| / Q_V(v_N)
  double identity_error = 0.0;
  /// Normalized residual of Q'_{V - tW}(v_N) = 0.
  double eigen_residual = 0.0;
  bool converged = false;
};

/// One entry per level until the first eigen failure (sequence truncated).
std::vector<NullSequenceEntry> null_sequence(const RadialProblem& problem,
                                             const ExhaustionSchedule& schedule,
                                             const PotentialSpec& probe,
                                             const CriticalityOptions& options = {});

struct PositivityWeight {
  PotentialSpec weight;
  double margin = 0.0;
  /// lambda_1(V - weight) per level.
  std::vector<double> lambdas;
};

struct CriticalityReport {
  std::vector<std::pair<std::size_t, double>> thresholds;
  Verdict verdict = Verdict::undetermined;
  double t_star_estimate = 0.0;
  std::optional<Field> ground_state;
  std::optional<PositivityWeight> positivity_weight;
  std::vector<double> energies;
  std::vector<NullSequenceEntry> sequence;
  /// Window (schedule coordinates) on which the ground state is compared.
  Interval window;
  /// max |ground_state - 1| on the window.
  double window_deviation = 0.0;
  /// Number of levels requested; fewer thresholds mean a truncated run.
  std::size_t levels_requested = 0;
};

/// Classifies from the trend of t_N. Critical: t_N <= eps_crit at the last
/// level and decreasing. Subcritical: t_N > 10 eps_crit with relative change
/// below 1% across the last three levels. Otherwise undetermined.
Verdict classify_thresholds(const std::vector<double>& t, double eps_crit);

/// Runs the whole schedule. In the critical case the last v_N is the ground
/// state; positivity weights are not computed here (see positivity_weight).
CriticalityReport criticality_verdict(const RadialProblem& problem,
                                      const ExhaustionSchedule& schedule,
                                      const PotentialSpec& probe,
                                      const CriticalityOptions& options = {});

/// Ground state of a critical functional; StateError otherwise.
Field ground_state(const RadialProblem& problem, const ExhaustionSchedule& schedule,
                   const PotentialSpec& probe, const CriticalityOptions& options = {});
Field ground_state(const CriticalityReport& report);

/// t*·W/2 verified by lambda_1(V - t*W/2) >= -1e-8 on every level of the
/// schedule. StateError unless the report is subcritical.
PositivityWeight positivity_weight(const RadialProblem& problem, const ExhaustionSchedule& schedule,
                                   const PotentialSpec& probe, const CriticalityReport& report,
                                   const CriticalityOptions& options = {});

struct CapacityReport {
  double value = 0.0;
  Field minimizer;
  /// Node indices of the minimizer grid where u = 1 is enforced.
  std::vector<std::size_t> active_set;
  /// Smallest first-order multiplier on K (normalized), >= -1e-8 at a KKT point.
  double min_multiplier = 0.0;
  int active_set_iterations = 0;
  bool converged = false;
};

/// Grid on `level` with breakpoints at the ends of K, `cells` cells per piece.
Grid capacity_grid(const RadialProblem& problem, const CompactSetSpec& k, const Interval& level,
                   std::size_t cells);

/// Cap_Q(K, level): minimizes the discrete Q over fields vanishing on the
/// level boundary with u >= 1 on the nodes of K.
CapacityReport q_capacity(const RadialProblem& problem, const CompactSetSpec& k,
                          const GridPtr& grid, const SolverOptions& options = {});
CapacityReport q_capacity(const RadialProblem& problem, const CompactSetSpec& k,
                          const Interval& level, std::size_t cells = 400,
                          const SolverOptions& options = {});

}  // namespace radcrit
