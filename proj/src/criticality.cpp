#include "radcrit/criticality.hpp"

#include <algorithm>
#include <cmath>

#include "radcrit/energy.hpp"
#include "radcrit/errors.hpp"

namespace radcrit {

namespace {

double to_schedule_coord(const ExhaustionSchedule& s, double r) {
  return s.coordinate == Coordinate::logarithmic ? std::log(r) : r;
}

double from_schedule_coord(const ExhaustionSchedule& s, double x) {
  return s.coordinate == Coordinate::logarithmic ? std::exp(x) : x;
}

std::vector<double> sample_weight(const Grid& g, const PotentialSpec& w) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double r = g.radius(j);
    if (!std::isfinite(r)) continue;
    const double x = w(r);
    if (x < 0.0) throw ArgumentError("probe must be nonnegative");
    out[j] = x;
  }
  return out;
}

bool has_negative_part(const Grid& g, const PotentialSpec& v) {
  for (double x : sample_potential(g, v))
    if (x < 0.0) return true;
  return false;
}

void require_nonnegative_form(const RadialProblem& problem, const GridPtr& grid) {
  if (!has_negative_part(*grid, problem.potential)) return;
  const auto eig = principal_eigenpair(problem, grid);
  if (eig.lambda < -1e-10)
    throw PreconditionError("Q_V is not nonnegative on the level (lambda_1 = " +
                            std::to_string(eig.lambda) + ")");
}

double weighted_lp(const Grid& g, std::span<const double> w, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (w[j] != 0.0 && u[j] != 0.0) s += g.mass(j) * w[j] * std::pow(std::abs(u[j]), g.p());
  return s;
}

Interval ground_state_window(const ExhaustionSchedule& s) {
  const Interval l = s.levels.front();
  const double q = 0.25 * l.length();
  return {l.lo + q, l.hi - q};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::critical: return "critical";
    case Verdict::subcritical: return "subcritical";
    case Verdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

PotentialSpec default_probe(const ExhaustionSchedule& schedule) {
  if (schedule.levels.empty()) throw ArgumentError("empty schedule");
  const Interval l = schedule.levels.front();
  const double a = from_schedule_coord(schedule, l.lo + l.length() / 3.0);
  const double b = from_schedule_coord(schedule, l.lo + 2.0 * l.length() / 3.0);
  return PotentialSpec::bump(0.5 * (a + b), 0.5 * (b - a), 1.0);
}

NestedGrids criticality_grids(const RadialProblem& problem, const ExhaustionSchedule& schedule,
                              const PotentialSpec& probe, std::size_t nodes_per_segment) {
  std::vector<double> extra;
  if (auto sup = probe.support()) {
    const double lo = std::max(sup->lo, problem.domain.lo);
    if (lo > 0.0 || schedule.coordinate == Coordinate::radial)
      extra.push_back(to_schedule_coord(schedule, lo));
    extra.push_back(to_schedule_coord(schedule, 0.5 * (sup->lo + sup->hi)));
    extra.push_back(to_schedule_coord(schedule, sup->hi));
  }
  extra.push_back(to_schedule_coord(schedule, schedule.x0));
  const Interval w = ground_state_window(schedule);
  extra.push_back(w.lo);
  extra.push_back(w.hi);
  return build_nested_grids(problem, schedule, nodes_per_segment, std::move(extra));
}

Threshold threshold_tN(const RadialProblem& problem, const GridPtr& level,
                       const PotentialSpec& probe, const EigenOptions& options) {
  problem.validate();
  require_nonnegative_form(problem, level);
  const auto w = sample_weight(*level, probe);
  auto eig = weighted_eigenpair(problem, level, w, options);
  if (!(eig.lambda > 0.0)) throw EvaluationError("threshold is not positive");
  return Threshold{eig.lambda, eig.eigenfunction, eig.iterations, eig.converged};
}

std::vector<NullSequenceEntry> null_sequence(const RadialProblem& problem,
                                             const ExhaustionSchedule& schedule,
                                             const PotentialSpec& probe,
                                             const CriticalityOptions& options) {
  schedule.validate(problem);
  const auto grids = criticality_grids(problem, schedule, probe, options.nodes_per_segment);
  std::vector<NullSequenceEntry> out;
  for (std::size_t n = 0; n < grids.levels.size(); ++n) {
    const GridPtr& g = grids.levels[n];
    Threshold th{0.0, Field::constant(g, 0.0)};
    try {
      th = threshold_tN(problem, g, probe, options.eigen);
    } catch (const EvaluationError&) {
      break;
    } catch (const PreconditionError&) {
      if (n == 0) throw;
      break;
    }
    if (!th.converged) break;
    const double at_x0 = th.v.at_coord(g->to_coord(schedule.x0));
    if (!(at_x0 > 0.0)) break;
    Field v = th.v.scaled(1.0 / at_x0);
    NullSequenceEntry e{n + 1, schedule.levels[n], th.t, v};
    const auto w = sample_weight(*g, probe);
    e.energy = energy_Q(v, problem).total;
    e.weighted_integral = weighted_lp(*g, w, v.values());
    e.identity_error = std::abs(e.energy - th.t / g->p() * e.weighted_integral) / e.energy;
    auto sys = dirichlet_system(problem, g, {});
    for (std::size_t j = 0; j < g->size(); ++j) sys.potential[j] -= th.t * w[j];
    e.eigen_residual = normalized_residual(sys, v.values());
    e.converged = true;
    out.push_back(std::move(e));
  }
  return out;
}

Verdict classify_thresholds(const std::vector<double>& t, double eps_crit) {
  const std::size_t n = t.size();
  if (n >= 2 && t[n - 1] <= eps_crit && t[n - 1] < t[n - 2]) return Verdict::critical;
  if (n >= 3 && t[n - 1] > 10.0 * eps_crit &&
      std::abs(t[n - 3] - t[n - 1]) < 0.01 * t[n - 1])
    return Verdict::subcritical;
  return Verdict::undetermined;
}

CriticalityReport criticality_verdict(const RadialProblem& problem,
                                      const ExhaustionSchedule& schedule,
                                      const PotentialSpec& probe,
                                      const CriticalityOptions& options) {
  CriticalityReport report;
  report.levels_requested = schedule.levels.size();
  report.sequence = null_sequence(problem, schedule, probe, options);
  std::vector<double> t;
  for (const auto& e : report.sequence) {
    report.thresholds.emplace_back(e.level, e.t);
    report.energies.push_back(e.energy);
    t.push_back(e.t);
  }
  if (!t.empty()) report.t_star_estimate = t.back();
  // A truncated run cannot certify a trend over the requested schedule.
  report.verdict = classify_thresholds(t, options.eps_crit);
  report.window = ground_state_window(schedule);
  if (report.verdict == Verdict::critical) {
    const Field& v = report.sequence.back().v;
    double dev = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double x = v.grid().coord(j);
      if (report.window.contains(x)) dev = std::max(dev, std::abs(v[j] - 1.0));
    }
    report.window_deviation = dev;
    report.ground_state = v;
  }
  return report;
}

Field ground_state(const CriticalityReport& report) {
  if (report.verdict != Verdict::critical || !report.ground_state)
    throw StateError("ground state requested but the verdict is " + to_string(report.verdict));
  return *report.ground_state;
}

Field ground_state(const RadialProblem& problem, const ExhaustionSchedule& schedule,
                   const PotentialSpec& probe, const CriticalityOptions& options) {
  return ground_state(criticality_verdict(problem, schedule, probe, options));
}

PositivityWeight positivity_weight(const RadialProblem& problem,
                                   const ExhaustionSchedule& schedule, const PotentialSpec& probe,
                                   const CriticalityReport& report,
                                   const CriticalityOptions& options) {
  if (report.verdict != Verdict::subcritical || !(report.t_star_estimate > 0.0))
    throw StateError("positivity weight requires a subcritical verdict, got " +
                     to_string(report.verdict));
  PositivityWeight out;
  out.weight = probe.scaled(0.5 * report.t_star_estimate);
  const auto shifted = problem.with_potential(problem.potential.plus(out.weight, -1.0));
  const auto grids = criticality_grids(problem, schedule, probe, options.nodes_per_segment);
  EigenOptions eo = options.eigen;
  eo.rel_tol = std::max(eo.rel_tol, 1e-10);
  out.margin = kInf;
  for (const auto& g : grids.levels) {
    const auto eig = principal_eigenpair(shifted, g, eo);
    out.lambdas.push_back(eig.lambda);
    out.margin = std::min(out.margin, eig.lambda);
  }
  if (out.margin < -1e-8)
    throw PreconditionError("lambda_1(V - t*W/2) < 0 on some level; weight not certified");
  return out;
}

// ---------------------------------------------------------------- capacity

Grid capacity_grid(const RadialProblem& problem, const CompactSetSpec& k, const Interval& level,
                   std::size_t cells) {
  ExhaustionSchedule s;
  s.levels = {level};
  s.x0 = 0.5 * (k.k.lo + k.k.hi);
  return *build_nested_grids(problem, s, cells, {k.k.lo, k.k.hi}).global;
}

CapacityReport q_capacity(const RadialProblem& problem, const CompactSetSpec& k,
                          const GridPtr& grid, const SolverOptions& options) {
  problem.validate();
  if (grid->coordinate() != Coordinate::radial)
    throw ArgumentError("capacity grids use radial coordinates");
  const Interval lvl = grid->interval();
  const bool center_ball = grid->has_origin() && k.k.lo == lvl.lo;
  if (!(k.k.lo <= k.k.hi) || !(k.k.hi < lvl.hi) || !(center_ball || lvl.lo < k.k.lo))
    throw ArgumentError("K must lie strictly inside the level");
  require_nonnegative_form(problem, grid);

  const std::size_t n = grid->size();
  std::vector<char> in_k(n, 0);
  bool any = false;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid->coord(j);
    const double slack = 1e-12 * std::max(1.0, std::abs(x));
    if (x >= k.k.lo - slack && x <= k.k.hi + slack) in_k[j] = any = true;
  }
  if (!any) throw ArgumentError("K contains no grid node");

  auto sys = dirichlet_system(problem, grid, {});
  const auto boundary = sys.fixed;
  std::vector<double> u(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid->coord(j);
    if (in_k[j]) {
      u[j] = 1.0;
    } else if (x < k.k.lo) {
      u[j] = boundary.front() ? (x - lvl.lo) / (k.k.lo - lvl.lo) : 1.0;
    } else {
      u[j] = (lvl.hi - x) / (lvl.hi - k.k.hi);
    }
    if (boundary[j]) u[j] = 0.0;
  }
  std::vector<char> active = in_k;

  CapacityReport report{0.0, Field(grid, u)};
  auto unconstrained = sys;
  // The active set moves by at least one node per side and pass.
  const int max_passes = static_cast<int>(n) + 10;
  bool settled = false;
  for (int it = 0; it < max_passes; ++it) {
    report.active_set_iterations = it + 1;
    for (std::size_t j = 0; j < n; ++j) {
      sys.fixed[j] = boundary[j] || active[j];
      if (active[j]) u[j] = 1.0;
    }
    auto rep = solve_system(sys, u, options);
    u.assign(rep.solution.values().begin(), rep.solution.values().end());
    report.converged = rep.converged;
    // Multipliers: gradient of Q at the constrained nodes.
    const auto grad = system_residual(unconstrained, u);
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (active[j]) scale = std::max(scale, std::abs(grad[j]));
    if (scale == 0.0) scale = 1.0;
    bool changed = false;
    report.min_multiplier = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_k[j]) continue;
      if (active[j]) {
        const double m = grad[j] / scale;
        report.min_multiplier = std::min(report.min_multiplier, m);
        if (m < -1e-8) {
          active[j] = 0;
          changed = true;
        }
      } else if (u[j] < 1.0 - 1e-12) {
        active[j] = 1;
        changed = true;
      }
    }
    if (report.min_multiplier == kInf) report.min_multiplier = 0.0;
    if (!changed) {
      settled = true;
      break;
    }
  }
  report.converged = report.converged && settled;
  report.minimizer = Field(grid, u);
  report.value = energy_Q(report.minimizer, problem).total;
  for (std::size_t j = 0; j < n; ++j)
    if (active[j]) report.active_set.push_back(j);
  return report;
}

CapacityReport q_capacity(const RadialProblem& problem, const CompactSetSpec& k,
                          const Interval& level, std::size_t cells,
                          const SolverOptions& options) {
  k.validate(problem);
  auto grid = std::make_shared<const Grid>(capacity_grid(problem, k, level, cells));
  return q_capacity(problem, k, grid, options);
}

}  // namespace radcrit
