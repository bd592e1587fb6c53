#include "radcrit/mingrowth.hpp"

#include <algorithm>
#include <cmath>

#include "radcrit/energy.hpp"
#include "radcrit/errors.hpp"

namespace radcrit {

namespace {

double coord_of(Coordinate c, double r) {
  if (c == Coordinate::radial) return r;
  return r > 0.0 ? std::log(r) : -kInf;
}

std::size_t index_at(const Grid& g, double x) {
  const auto xs = g.coords();
  auto it = std::lower_bound(xs.begin(), xs.end(), x - 1e-12 * std::max(1.0, std::abs(x)));
  if (it == xs.end() || std::abs(*it - x) > 1e-9 * std::max(1.0, std::abs(x)))
    throw ArgumentError("breakpoint is not a grid node");
  return static_cast<std::size_t>(it - xs.begin());
}

bool has_negative_part(const Grid& g, const PotentialSpec& v) {
  for (double x : sample_potential(g, v))
    if (x < 0.0) return true;
  return false;
}

// Thomas algorithm for a symmetric tridiagonal system (off[i] couples i, i+1).
std::vector<double> solve_tridiagonal(std::vector<double> diag, const std::vector<double>& off,
                                      std::vector<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> up(off);
  for (std::size_t j = 1; j < n; ++j) {
    const double w = off[j - 1] / diag[j - 1];
    diag[j] -= w * up[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  std::vector<double> x(n);
  for (std::size_t j = n; j-- > 0;) x[j] = (rhs[j] - (j + 1 < n ? up[j] * x[j + 1] : 0.0)) / diag[j];
  return x;
}

}  // namespace

double value_at_radius(const Field& u, double r) {
  const Grid& g = u.grid();
  const double x = g.to_coord(r);
  const Interval iv = g.interval();
  const double slack = 1e-12 * std::max(1.0, std::abs(x));
  if (x < iv.lo - slack || x > iv.hi + slack)
    throw ArgumentError("radius " + std::to_string(r) + " outside the field's grid");
  return u.at_coord(std::clamp(x, iv.lo, iv.hi));
}

// ---------------------------------------------------------------- u^K

MinimalGrowthRun uK_limit(const RadialProblem& problem, const CompactSetSpec& k,
                          const ExhaustionSchedule& schedule,
                          const MinimalGrowthOptions& options) {
  problem.validate();
  schedule.validate(problem);
  k.validate(problem);
  if (!(k.trace_lo > 0.0) || !(k.trace_hi > 0.0)) throw ArgumentError("traces must be positive");
  const Coordinate c = schedule.coordinate;
  const bool center_ball = k.is_center_ball(problem);
  if (center_ball && c != Coordinate::radial)
    throw ArgumentError("a center ball needs a radial schedule");

  MinimalGrowthRun run{k};
  run.window = options.window.value_or(Interval{1.5 * k.k.hi, 3.0 * k.k.hi});
  std::vector<double> extra{coord_of(c, k.k.hi), coord_of(c, run.window.lo),
                            coord_of(c, run.window.hi)};
  if (!center_ball) extra.push_back(coord_of(c, k.k.lo));
  const auto grids = build_nested_grids(problem, schedule, options.nodes_per_segment, extra);
  const Grid& g = *grids.global;
  const std::size_t kb = index_at(g, coord_of(c, k.k.hi));
  const std::size_t ka = center_ball ? 0 : index_at(g, coord_of(c, k.k.lo));
  const Interval wc{coord_of(c, run.window.lo), coord_of(c, run.window.hi)};
  const bool checked = has_negative_part(g, problem.potential);

  for (std::size_t n = 0; n < grids.levels.size(); ++n) {
    const auto [ia, ib] = grids.ranges[n];
    if (!(kb < ib) || !(center_ball ? ia == 0 : ia < ka)) continue;
    std::vector<double> u(g.size(), 0.0);
    double residual = 0.0;
    bool converged = true;
    auto piece = [&](std::size_t first, std::size_t last, Boundary bc) {
      auto pg = std::make_shared<const Grid>(g.slice(first, last));
      auto rep = solve_dirichlet(problem, bc, Field::constant(pg, 0.0), options.solver,
                                 checked ? SolveMode::checked : SolveMode::unchecked);
      for (std::size_t j = first; j <= last; ++j) u[j] = rep.solution[j - first];
      residual = std::max(residual, rep.final_residual_norm);
      converged = converged && rep.converged;
    };
    try {
      piece(kb, ib, {k.trace_hi, 0.0});
      if (!center_ball) piece(ia, ka, {0.0, k.trace_lo});
    } catch (const std::exception& e) {
      run.diagnostics = "level " + std::to_string(n + 1) + ": " + e.what();
      break;
    }
    for (std::size_t j = ka; j <= kb; ++j) {
      const double t = ka == kb ? 1.0 : (g.coord(j) - g.coord(ka)) / (g.coord(kb) - g.coord(ka));
      u[j] = center_ball ? k.trace_hi : (1.0 - t) * k.trace_lo + t * k.trace_hi;
    }
    if (!converged) {
      run.diagnostics = "level " + std::to_string(n + 1) + ": solver did not converge";
      break;
    }
    MinimalGrowthLevel level{n + 1, schedule.levels[n], Field(grids.global, std::move(u))};
    level.residual = residual;
    level.converged = true;
    if (!run.levels.empty()) {
      const Field& prev = run.levels.back().u;
      double mono = -kInf, cauchy = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        mono = std::max(mono, prev[j] - level.u[j]);
        if (wc.contains(g.coord(j))) cauchy = std::max(cauchy, std::abs(level.u[j] - prev[j]));
      }
      run.monotonicity_log.push_back(mono);
      run.cauchy_log.push_back(cauchy);
    }
    run.levels.push_back(std::move(level));
  }
  if (!run.levels.empty()) run.limit = run.levels.back().u;
  run.cauchy_met = !run.cauchy_log.empty() && run.cauchy_log.back() <= options.cauchy_tol;
  return run;
}

// ---------------------------------------------------------------- point singularity

PointSingularityRun point_singularity_solution(const RadialProblem& problem, double x1,
                                               const ExhaustionSchedule& schedule,
                                               const MinimalGrowthOptions& options) {
  problem.validate();
  schedule.validate(problem);
  const Coordinate c = schedule.coordinate;
  std::vector<double> extra{coord_of(c, x1)};
  for (const auto& l : schedule.levels) {
    const double a = c == Coordinate::radial ? l.lo : std::exp(l.lo);
    if (!(a > 0.0)) throw ArgumentError("levels must stay away from the singular point");
    extra.push_back(coord_of(c, 2.0 * a));
  }
  const auto grids = build_nested_grids(problem, schedule, options.nodes_per_segment, extra);
  const Grid& g = *grids.global;
  const bool checked = has_negative_part(g, problem.potential);

  PointSingularityRun run;
  for (std::size_t n = 0; n < grids.levels.size(); ++n) {
    const GridPtr& lg = grids.levels[n];
    const double a = lg->radius(0);
    const double x1c = lg->to_coord(x1);
    if (!(lg->coord(0) < x1c && x1c < lg->interval().hi)) continue;
    const auto bump = PotentialSpec::bump(1.5 * a, 0.5 * a, 1.0);
    const Field f = Field::from_radius(lg, [&](double r) { return std::isfinite(r) ? bump(r) : 0.0; });
    SolveReport rep{Field::constant(lg, 0.0)};
    try {
      rep = solve_dirichlet(problem, {0.0, 0.0}, f, options.solver,
                            checked ? SolveMode::checked : SolveMode::unchecked);
    } catch (const std::exception& e) {
      run.diagnostics = "level " + std::to_string(n + 1) + ": " + e.what();
      break;
    }
    if (!rep.converged) {
      run.diagnostics = "level " + std::to_string(n + 1) + ": solver did not converge";
      break;
    }
    const double at_x1 = rep.solution.at_coord(x1c);
    if (!(at_x1 > 0.0)) {
      run.diagnostics = "level " + std::to_string(n + 1) + ": u(x1) not positive";
      break;
    }
    // Q'(s u) = s^{p-1} Q'(u): rescaling keeps u a solution with scaled source.
    std::vector<double> u(g.size(), 0.0);
    const auto [ia, ib] = grids.ranges[n];
    for (std::size_t j = ia; j <= ib; ++j) u[j] = rep.solution[j - ia] / at_x1;
    MinimalGrowthLevel level{n + 1, schedule.levels[n], Field(grids.global, std::move(u))};
    level.residual = rep.final_residual_norm;
    level.converged = true;
    run.levels.push_back(std::move(level));
  }
  if (!run.levels.empty()) run.limit = run.levels.back().u;
  return run;
}

double alpha_exponent(double d, double p) { return (p - d) / (p - 1.0); }

ExponentFit singularity_exponent(const Field& u, double x0, const Interval& fit_window,
                                 ExponentMode mode) {
  const Grid& g = u.grid();
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double r = g.radius(j);
    if (!(fit_window.lo <= r && r <= fit_window.hi)) continue;
    const double dist = std::abs(r - x0);
    if (!(dist > 0.0)) continue;
    if (!(u[j] > 0.0)) throw ArgumentError("u must be positive on the fit window");
    if (mode == ExponentMode::logarithmic) {
      if (!(dist < 1.0)) throw ArgumentError("logarithmic fits need |r - x0| < 1");
      xs.push_back(std::log(-std::log(dist)));
    } else {
      xs.push_back(std::log(dist));
    }
    ys.push_back(std::log(u[j]));
  }
  if (xs.size() < 2) throw ArgumentError("fit window holds fewer than two nodes");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("degenerate fit window");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + fit.slope * (xs[i] - mx));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = xs.size();
  return fit;
}

// ---------------------------------------------------------------- removability

std::string to_string(Removability r) {
  switch (r) {
    case Removability::removable: return "removable";
    case Removability::nonremovable_blowup: return "nonremovable(blowup)";
    case Removability::nonremovable_flux: return "nonremovable(flux)";
    case Removability::undetermined: return "undetermined";
  }
  return "undetermined";
}

RemovabilityReport removability_test(const RadialProblem& problem, const Field& u, double x0,
                                     double tol) {
  const Grid& g = u.grid();
  if (tol <= 0.0) tol = SolverOptions{}.resolved_tol(g.p());
  RemovabilityReport report;

  double dmin = kInf, dmax = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double dist = std::abs(g.radius(j) - x0);
    if (dist > 1e-12 * std::max(1.0, std::abs(x0))) dmin = std::min(dmin, dist);
    dmax = std::max(dmax, dist);
  }
  for (double delta = dmin; 4.0 * delta <= dmax && report.shell_maxima.size() < 12; delta *= 2.0) {
    double m = -kInf;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double dist = std::abs(g.radius(j) - x0);
      if (dist >= delta && dist < 2.0 * delta) m = std::max(m, u[j]);
    }
    if (m > -kInf) report.shell_maxima.push_back(m);
  }

  const auto& sm = report.shell_maxima;
  if (sm.size() >= 4) {
    double scale = 0.0;
    for (double m : sm) scale = std::max(scale, std::abs(m));
    const double i0 = sm[0] - sm[1], i1 = sm[1] - sm[2], i2 = sm[2] - sm[3];
    const double flat = 1e-9 * std::max(scale, 1e-300);
    const bool all_flat = std::abs(i0) <= flat && std::abs(i1) <= flat && std::abs(i2) <= flat;
    if (!all_flat) {
      // Growth toward x0 whose dyadic increments do not decay: divergent.
      if (i0 > 0.0 && i1 > 0.0 && i2 > 0.0 && i0 >= 0.95 * i1 && i1 >= 0.95 * i2) {
        report.verdict = Removability::nonremovable_blowup;
        return report;
      }
      if (i0 * i1 < 0.0 && i1 * i2 < 0.0 && std::abs(i0) >= 0.5 * std::abs(i2)) {
        report.verdict = Removability::undetermined;
        return report;
      }
    }
  }

  // Continuous extension across x0, then the residual against the hat at x0.
  std::size_t j0 = g.size();
  for (std::size_t j = 0; j < g.size(); ++j)
    if (std::abs(g.radius(j) - x0) <= 1e-12 * std::max(1.0, std::abs(x0))) j0 = j;
  if (j0 == g.size() && x0 <= g.radius(0)) j0 = 0;
  if (j0 == g.size()) throw ArgumentError("x0 must be a grid node or the left end of the grid");
  auto sys = dirichlet_system(problem, u.grid_ptr(), {});
  sys.fixed[j0] = 0;
  const auto res = system_residual(sys, u.values());
  double scale = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const double du = std::abs(u[i + 1] - u[i]);
    if (du > 0.0) scale = std::max(scale, g.stiffness(i) * std::pow(du, g.p() - 1.0));
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (sys.potential[j] != 0.0 && std::isfinite(g.mass(j)))
      scale = std::max(scale, std::abs(g.mass(j) * sys.potential[j]) *
                                  std::pow(std::abs(u[j]), g.p() - 1.0));
  }
  report.flux_residual = scale > 0.0 ? std::abs(res[j0]) / scale : 0.0;
  report.verdict = report.flux_residual > 10.0 * tol ? Removability::nonremovable_flux
                                                     : Removability::removable;
  return report;
}

// ---------------------------------------------------------------- certificates

std::string to_string(CertificateVerdict v) {
  return v == CertificateVerdict::decaying_to_zero ? "decaying-to-zero" : "bounded-away";
}

CertificateVerdict certificate_trend(const std::vector<double>& mu) {
  const std::size_t n = mu.size();
  if (n < 4) return CertificateVerdict::bounded_away;
  for (std::size_t k = n - 3; k < n; ++k)
    if (!(mu[k] <= 0.9 * mu[k - 1])) return CertificateVerdict::bounded_away;
  return CertificateVerdict::decaying_to_zero;
}

namespace {

struct CertificateProblem {
  GridPtr grid;
  std::vector<double> u;   // positive weights
  std::vector<double> mb;  // clipped trapezoid mass of B
};

// Smallest mu with A z = mu D z, A = sum k u_i u_{i+1} (dz)^2, D = mb u^2,
// z = 0 at the outer node. Returns w = u z normalized by int_B w^2 = 1.
std::pair<double, std::vector<double>> quadratic_certificate(const CertificateProblem& cp,
                                                             const CertificateOptions& o,
                                                             int& iterations) {
  const Grid& g = *cp.grid;
  const std::size_t n = g.size();
  std::vector<double> diag(n, 0.0), off(n - 1, 0.0), coef(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    coef[i] = g.stiffness(i) * cp.u[i] * cp.u[i + 1];
    diag[i] += coef[i];
    diag[i + 1] += coef[i];
    off[i] = -coef[i];
  }
  diag[n - 1] = 1.0;
  off[n - 2] = 0.0;
  std::vector<double> dm(n);
  for (std::size_t j = 0; j < n; ++j) dm[j] = cp.mb[j] * cp.u[j] * cp.u[j];
  dm[n - 1] = 0.0;

  auto form = [&](const std::vector<double>& z) {
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) a += coef[i] * (z[i + 1] - z[i]) * (z[i + 1] - z[i]);
    return a;
  };
  auto normalize = [&](std::vector<double>& z) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m += dm[j] * z[j] * z[j];
    const double s = 1.0 / std::sqrt(m);
    for (double& x : z) x *= s;
  };
  std::vector<double> z(n, 1.0);
  z[n - 1] = 0.0;
  normalize(z);
  double mu = form(z), prev = kInf;
  iterations = 0;
  for (int it = 0; it < o.max_iter; ++it) {
    std::vector<double> rhs(n);
    for (std::size_t j = 0; j < n; ++j) rhs[j] = dm[j] * z[j];
    z = solve_tridiagonal(diag, off, std::move(rhs));
    z[n - 1] = 0.0;
    normalize(z);
    mu = form(z);
    iterations = it + 1;
    if (std::abs(prev - mu) <= o.rel_tol * mu) break;
    prev = mu;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = cp.u[j] * z[j];
  return {mu, w};
}

// sum_i k_i L(w, u) on cell i with ratio rho = mean(w)/mean(u).
double lagrangian_sum(const CertificateProblem& cp, const std::vector<double>& w,
                      std::vector<double>* grad) {
  const Grid& g = *cp.grid;
  const double p = g.p();
  double total = 0.0;
  if (grad) grad->assign(w.size(), 0.0);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double a = w[i + 1] - w[i];
    const double b = cp.u[i + 1] - cp.u[i];
    const double su = cp.u[i] + cp.u[i + 1];
    const double rho = (w[i] + w[i + 1]) / su;
    const double ab = std::abs(a), bb = std::abs(b);
    const double k = g.stiffness(i);
    const double bflux = b == 0.0 ? 0.0 : std::pow(bb, p - 2.0) * b;  // |b|^{p-2} b
    const double rp1 = rho > 0.0 ? std::pow(rho, p - 1.0) : 0.0;
    const double l = std::pow(ab, p) + (p - 1.0) * rp1 * rho * std::pow(bb, p) - p * rp1 * bflux * a;
    total += k * l;
    if (grad) {
      const double da = p * ((a == 0.0 ? 0.0 : std::pow(ab, p - 2.0) * a) - rp1 * bflux);
      const double rp2 = rho > 0.0 ? std::pow(rho, p - 2.0) : 0.0;
      const double drho = p * (p - 1.0) * (rp1 * std::pow(bb, p) - rp2 * bflux * a);
      (*grad)[i] += k * (-da + drho / su);
      (*grad)[i + 1] += k * (da + drho / su);
    }
  }
  return total;
}

double b_norm(const CertificateProblem& cp, const std::vector<double>& w, double p) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    if (cp.mb[j] != 0.0 && w[j] != 0.0) s += cp.mb[j] * std::pow(std::abs(w[j]), p);
  return s;
}

std::pair<double, std::vector<double>> descent_certificate(const CertificateProblem& cp,
                                                           std::vector<double> w,
                                                           const CertificateOptions& o,
                                                           int& iterations) {
  const double p = cp.grid->p();
  const std::size_t n = w.size();
  auto normalize = [&](std::vector<double>& v) {
    const double s = std::pow(b_norm(cp, v, p), -1.0 / p);
    for (double& x : v) x *= s;
  };
  for (double& x : w) x = std::max(x, 0.0);
  w[n - 1] = 0.0;
  normalize(w);
  std::vector<double> grad, trial(n);
  double f = lagrangian_sum(cp, w, &grad);
  double step = 0.0;
  iterations = 0;
  int stalls = 0;
  for (int it = 0; it < o.descent_iter; ++it) {
    // Gradient of F/G at G = 1: dF - F dG.
    for (std::size_t j = 0; j < n; ++j) {
      if (cp.mb[j] != 0.0 && w[j] > 0.0) grad[j] -= f * p * cp.mb[j] * std::pow(w[j], p - 1.0);
    }
    grad[n - 1] = 0.0;
    double gn = 0.0, wn = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      gn = std::max(gn, std::abs(grad[j]));
      wn = std::max(wn, std::abs(w[j]));
    }
    if (gn == 0.0) break;
    if (step == 0.0) step = 1e-2 * wn / gn;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = std::max(0.0, w[j] - step * grad[j]);
      trial[n - 1] = 0.0;
      if (b_norm(cp, trial, p) > 0.0) {
        normalize(trial);
        std::vector<double> tg;
        const double ft = lagrangian_sum(cp, trial, &tg);
        if (ft < f) {
          stalls = (f - ft) <= o.rel_tol * f ? stalls + 1 : 0;
          w.swap(trial);
          f = ft;
          grad.swap(tg);
          accepted = true;
          step *= 1.5;
          break;
        }
      }
      step *= 0.5;
    }
    iterations = it + 1;
    if (!accepted || stalls >= 20) break;
  }
  return {f, w};
}

}  // namespace

CertificateRun minimal_growth_certificate(const RadialProblem& problem, const Field& u,
                                          const CompactSetSpec& omega2, const Interval& b,
                                          const ExhaustionSchedule& schedule,
                                          const CertificateOptions& options) {
  problem.validate();
  schedule.validate(problem);
  const double k2 = omega2.k.hi;
  if (!(k2 < b.lo && b.lo < b.hi)) throw ArgumentError("B must lie outside the closure of Omega_2");
  const Coordinate c = schedule.coordinate;
  const auto grids = build_nested_grids(problem, schedule, options.nodes_per_segment,
                                        {coord_of(c, k2), coord_of(c, b.lo), coord_of(c, b.hi)});
  const Grid& g = *grids.global;
  const std::size_t ka = index_at(g, coord_of(c, k2));
  const double p = problem.p;

  CertificateRun run{omega2, b};
  for (std::size_t n = 0; n < grids.levels.size(); ++n) {
    const auto ib = grids.ranges[n].second;
    if (!(g.radius(ib) > b.hi) || !(grids.ranges[n].first <= ka)) continue;
    CertificateProblem cp;
    cp.grid = std::make_shared<const Grid>(g.slice(ka, ib));
    const Grid& lg = *cp.grid;
    cp.u.resize(lg.size());
    for (std::size_t j = 0; j < lg.size(); ++j) {
      cp.u[j] = value_at_radius(u, lg.radius(j));
      if (!(cp.u[j] > 0.0)) throw ArgumentError("u must be positive on the certificate region");
    }
    if (p != 2.0) {
      for (std::size_t i = 0; i + 1 < lg.size(); ++i)
        if (std::abs(cp.u[i + 1] - cp.u[i]) <= 1e-14 * std::abs(cp.u[i]))
          throw PreconditionError("|u'| vanishes on the certificate region");
    }
    cp.mb.assign(lg.size(), 0.0);
    const double blo = coord_of(c, b.lo), bhi = coord_of(c, b.hi);
    for (std::size_t i = 0; i + 1 < lg.size(); ++i) {
      const double lo = std::max(lg.coord(i), blo), hi = std::min(lg.coord(i + 1), bhi);
      if (!(lo < hi)) continue;
      const double m = lg.measure_between(lo, hi);
      cp.mb[i] += 0.5 * m;
      cp.mb[i + 1] += 0.5 * m;
    }
    int iterations = 0;
    auto [mu, w] = quadratic_certificate(cp, options, iterations);
    if (p != 2.0) {
      int more = 0;
      std::tie(mu, w) = descent_certificate(cp, std::move(w), options, more);
      iterations += more;
    }
    CertificateLevel level{n + 1, mu, Field(cp.grid, w)};
    level.normalization = b_norm(cp, w, p);
    level.iterations = iterations;
    run.levels.push_back(std::move(level));
  }
  std::vector<double> mu;
  for (const auto& l : run.levels) mu.push_back(l.mu);
  run.verdict = certificate_trend(mu);
  return run;
}

// ---------------------------------------------------------------- comparison

ComparisonResult comparison_check(const RadialProblem& problem, const Field& u_sub,
                                  const Field& v_super, const CompactSetSpec& omega2,
                                  const CertificateRun& certificate,
                                  const ComparisonOptions& options) {
  if (certificate.verdict != CertificateVerdict::decaying_to_zero)
    throw PreconditionError("certificate for the subsolution is not decaying to zero");
  if (u_sub.size() != v_super.size()) throw ArgumentError("fields of different length");
  const Grid& g = u_sub.grid();
  const double k2 = omega2.k.hi;
  const Interval region{g.to_coord(k2), g.interval().hi};
  std::vector<std::string> failed;
  const auto su = classify_sign(u_sub, problem, options.sign_tol, region);
  if (su != SignClass::subsolution && su != SignClass::solution)
    failed.push_back("u_sub is a subsolution outside Omega_2");
  const auto sv = classify_sign(v_super, problem, options.sign_tol, region);
  if (sv != SignClass::supersolution && sv != SignClass::solution)
    failed.push_back("v_super is a supersolution outside Omega_2");
  if (value_at_radius(u_sub, k2) > value_at_radius(v_super, k2) + options.tol)
    failed.push_back("u_sub <= v_super on the boundary of Omega_2");
  if (!failed.empty()) {
    std::string msg = "comparison hypotheses failed:";
    for (const auto& f : failed) msg += " " + f + ";";
    throw PreconditionError(msg);
  }
  ComparisonResult out;
  out.max_violation = -kInf;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (g.coord(j) >= region.lo) out.max_violation = std::max(out.max_violation, u_sub[j] - v_super[j]);
  out.holds = out.max_violation <= options.tol;
  return out;
}

}  // namespace radcrit
