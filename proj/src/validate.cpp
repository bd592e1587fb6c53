#include "radcrit/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "radcrit/criticality.hpp"
#include "radcrit/energy.hpp"
#include "radcrit/errors.hpp"
#include "radcrit/hash.hpp"
#include "radcrit/mingrowth.hpp"
#include "radcrit/solvers.hpp"

namespace radcrit {

Field random_compact_field(const GridPtr& grid, Rng& rng, double min_width) {
  const Interval iv = grid->interval();
  const double len = iv.length();
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(grid->size(), 0.0);
  const int k = count(rng);
  for (int b = 0; b < k; ++b) {
    const double half = len * (min_width + (0.5 - min_width) * unit(rng)) / 2.0;
    const double c = iv.lo + half + (len - 2.0 * half) * unit(rng);
    const double h = 0.1 + 2.0 * unit(rng);
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double z = (grid->coord(j) - c) / half;
      if (std::abs(z) < 1.0) v[j] += h * std::exp(1.0 - 1.0 / (1.0 - z * z));
    }
  }
  if (!grid->has_origin()) v.front() = 0.0;
  v.back() = 0.0;
  return Field(grid, std::move(v));
}

Field random_positive_solution(const RadialProblem& problem, const GridPtr& grid, Rng& rng) {
  std::uniform_real_distribution<double> bc(0.2, 2.0);
  auto rep = solve_dirichlet(problem, {bc(rng), bc(rng)}, Field::constant(grid, 0.0));
  if (!rep.converged) throw EvaluationError("random solution did not converge");
  return rep.solution;
}

namespace {

std::size_t scaled_count(std::size_t n, double scale) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * scale)));
}

GridPtr uniform_grid(const RadialProblem& pr, Interval iv, std::size_t n) {
  return std::make_shared<const Grid>(build_grid(pr, iv, n, {SpacingLaw::uniform, 0.0}));
}

SuiteResult picone_nonnegativity(Rng& rng, double scale) {
  SuiteResult r{"picone_nonnegativity"};
  r.trials = scaled_count(200, scale);
  std::uniform_real_distribution<double> pd(1.1, 6.0);
  std::uniform_int_distribution<int> dd(1, 4);
  double worst = kInf;
  for (std::size_t t = 0; t < r.trials; ++t) {
    RadialProblem pr;
    pr.p = pd(rng);
    pr.d = dd(rng);
    pr.domain = {0.5, 3.0};
    auto g = uniform_grid(pr, pr.domain, 300);
    Field u = random_compact_field(g, rng);
    Field v = random_compact_field(g, rng);
    for (double& x : v.mutable_values()) x += 0.05;
    const auto lag = picone_density(u, v);
    for (std::size_t i = 0; i < g->cells(); ++i) {
      const double mag = g->stiffness(i) * (std::pow(std::abs(u[i + 1] - u[i]), pr.p) +
                                            std::pow(std::abs(v[i + 1] - v[i]), pr.p)) +
                         1e-300;
      worst = std::min(worst, lag.cell_values[i] / mag);
    }
  }
  r.worst = worst;
  r.passed = worst >= -1e-12;
  r.detail = "min cell density / local magnitude";
  return r;
}

SuiteResult picone_identity(Rng& rng, double scale) {
  SuiteResult r{"picone_identity"};
  r.trials = scaled_count(30, scale);
  const double ps[] = {1.5, 2.0, 3.0};
  double worst = 0.0;
  for (std::size_t t = 0; t < r.trials; ++t) {
    RadialProblem pr;
    pr.p = ps[t % 3];
    pr.d = 1.0 + static_cast<double>(t % 3);
    pr.domain = {1.0, 2.0};
    auto g = uniform_grid(pr, pr.domain, 4000);
    Field v = random_positive_solution(pr, g, rng);
    Field u = random_compact_field(g, rng);
    const double q = energy_Q(u, pr).total;
    const double gap = picone_gap(u, v, pr);
    worst = std::max(worst, std::abs(gap) / (1.0 + std::abs(q)));
  }
  r.worst = worst;
  r.passed = worst <= 1e-6;
  r.detail = "max |Q(u) - int L(u,v)| / (1 + |Q(u)|), v a discrete solution, 4000 nodes";
  return r;
}

SuiteResult vector_inequality(Rng& rng, double scale) {
  SuiteResult r{"vector_inequality"};
  const double ps[] = {1.2, 1.5, 2.0, 3.0, 4.0};
  const std::size_t per_p = scaled_count(10000, scale);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> mag(-6.0, 6.0);
  bool ok = true;
  double p2_dev = 0.0;
  std::ostringstream env;
  for (double p : ps) {
    double lo = kInf, hi = 0.0;
    for (std::size_t t = 0; t < per_p; ++t) {
      double a[3], b[3];
      const double sa = std::exp(mag(rng)), sb = std::exp(mag(rng));
      for (int k = 0; k < 3; ++k) {
        a[k] = sa * nd(rng);
        b[k] = sb * nd(rng);
      }
      const auto v = vector_inequality_ratio(a, b, p);
      if (!std::isfinite(v.value) || !(v.value > 0.0)) ok = false;
      lo = std::min(lo, v.value);
      hi = std::max(hi, v.value);
      if (p == 2.0) p2_dev = std::max(p2_dev, std::abs(v.value - 1.0));
    }
    env << "p=" << p << ":[" << lo << "," << hi << "] ";
  }
  r.trials = per_p * 5;
  r.worst = p2_dev;
  r.passed = ok && p2_dev <= 1e-12;
  r.detail = "envelopes " + env.str();
  return r;
}

SuiteResult simplified_energy_suite(Rng& rng, double scale) {
  SuiteResult r{"simplified_energy_two_sided"};
  r.trials = scaled_count(100, scale);
  double spread = 1.0;
  bool ok = true;
  std::ostringstream os;
  for (double p : {1.5, 3.0}) {
    RadialProblem pr;
    pr.p = p;
    pr.d = 2.0;
    pr.domain = {1.0, 2.0};
    auto g = uniform_grid(pr, pr.domain, 800);
    Field v = random_positive_solution(pr, g, rng);
    double lo = kInf, hi = 0.0;
    for (std::size_t t = 0; t < r.trials; ++t) {
      Field w = random_compact_field(g, rng);
      std::vector<double> vw(g->size());
      for (std::size_t j = 0; j < vw.size(); ++j) vw[j] = v[j] * w[j];
      const double q = energy_Q(Field(g, vw), pr).total;
      const double s = simplified_energy(v, w).universal;
      const double ratio = q / s;
      if (!std::isfinite(ratio) || !(ratio > 0.0)) ok = false;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    spread = std::max(spread, hi / lo);
    os << "p=" << p << ":[" << lo << "," << hi << "] ";
  }
  r.worst = spread;
  r.passed = ok;
  r.detail = "Q(vw)/simplified envelopes " + os.str();
  return r;
}

SuiteResult energy_scaling(Rng& rng, double scale) {
  SuiteResult r{"energy_scaling"};
  r.trials = scaled_count(100, scale);
  std::uniform_real_distribution<double> pd(1.2, 5.0), td(0.1, 10.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < r.trials; ++k) {
    RadialProblem pr;
    pr.p = pd(rng);
    pr.d = 3.0;
    pr.domain = {0.5, 2.0};
    pr.potential = PotentialSpec::constant(td(rng));
    auto g = uniform_grid(pr, pr.domain, 200);
    Field u = random_compact_field(g, rng);
    const double t = td(rng);
    const double a = energy_Q(u.scaled(t), pr).total, b = std::pow(t, pr.p) * energy_Q(u, pr).total;
    worst = std::max(worst, std::abs(a - b) / std::abs(b));
  }
  r.worst = worst;
  r.passed = worst <= 1e-12;
  r.detail = "max relative |Q(tu) - t^p Q(u)|";
  return r;
}

SuiteResult maximum_principle(Rng& rng, double scale) {
  SuiteResult r{"maximum_principle"};
  r.trials = scaled_count(60, scale);
  const double ps[] = {1.5, 2.0, 3.0};
  std::uniform_real_distribution<double> bc(0.0, 2.0);
  double worst = kInf;
  bool strict = true;
  for (std::size_t t = 0; t < r.trials; ++t) {
    RadialProblem pr;
    pr.p = ps[t % 3];
    pr.d = 1.0 + static_cast<double>(t % 4);
    pr.domain = {0.5, 2.5};
    auto g = uniform_grid(pr, pr.domain, 300);
    Field f = random_compact_field(g, rng);
    auto rep = solve_dirichlet(pr, {bc(rng), bc(rng)}, f);
    for (std::size_t j = 0; j < g->size(); ++j) worst = std::min(worst, rep.solution[j]);
    for (std::size_t j = 1; j + 1 < g->size(); ++j) strict = strict && rep.solution[j] > 0.0;
  }
  r.worst = worst;
  r.passed = worst >= -1e-10 && strict;
  r.detail = "min u over solves with f >= 0, boundary >= 0; interior strictly positive";
  return r;
}

SuiteResult wcp_battery(Rng& rng, double scale) {
  SuiteResult r{"wcp_battery"};
  r.trials = scaled_count(100, scale);
  const double ps[] = {1.5, 2.0, 3.0};
  std::uniform_real_distribution<double> bc(0.0, 1.5), cv(0.0, 2.0);
  double worst = -kInf;
  for (std::size_t t = 0; t < r.trials; ++t) {
    RadialProblem pr;
    pr.p = ps[t % 3];
    pr.d = 1.0 + static_cast<double>(t % 3);
    pr.domain = {0.5, 2.0};
    pr.potential = PotentialSpec::constant(cv(rng));
    auto g = uniform_grid(pr, pr.domain, 200);
    Field f1 = random_compact_field(g, rng);
    Field extra = random_compact_field(g, rng);
    std::vector<double> f2(g->size());
    for (std::size_t j = 0; j < f2.size(); ++j) f2[j] = f1[j] + extra[j];
    const double a1 = bc(rng), b1 = bc(rng);
    const double a2 = a1 + bc(rng), b2 = b1 + bc(rng);
    auto u1 = solve_dirichlet(pr, {a1, b1}, f1).solution;
    auto u2 = solve_dirichlet(pr, {a2, b2}, Field(g, f2)).solution;
    const auto res = wcp_check(u1, u2, pr);
    worst = std::max(worst, res.max_violation);
  }
  r.worst = worst;
  r.passed = worst <= 1e-8;
  r.detail = "max nodal u1 - u2 over ordered-data pairs";
  return r;
}

SuiteResult threshold_monotonicity(Rng&, double) {
  SuiteResult r{"threshold_monotonicity"};
  RadialProblem pr;
  pr.p = 2.0;
  pr.d = 1.0;
  pr.domain = {0.0, kInf};
  pr.center = true;
  const auto s = ball_schedule(pr, 8);
  const auto seq = null_sequence(pr, s, default_probe(s));
  double worst = -kInf;
  for (std::size_t n = 1; n < seq.size(); ++n) worst = std::max(worst, seq[n].t - seq[n - 1].t);
  r.trials = seq.size();
  r.worst = worst;
  r.passed = seq.size() == s.levels.size() && worst <= 1e-9;
  r.detail = "max t_{N+1} - t_N, d=1 p=2 V=0";
  return r;
}

SuiteResult uk_monotonicity(Rng&, double) {
  SuiteResult r{"uk_monotonicity"};
  RadialProblem pr;
  pr.p = 2.0;
  pr.d = 3.0;
  pr.domain = {0.0, kInf};
  pr.center = true;
  const auto run = uK_limit(pr, CompactSetSpec{{0.0, 1.0}}, ball_schedule(pr, 8));
  double worst = -kInf;
  for (double m : run.monotonicity_log) worst = std::max(worst, m);
  r.trials = run.levels.size();
  r.worst = worst;
  r.passed = !run.levels.empty() && worst <= 1e-8;
  r.detail = "max u_N - u_{N+1}, d=3 p=2 K=[0,1]";
  return r;
}

SuiteResult gap_inequality(Rng& rng, double scale) {
  SuiteResult r{"gap_inequality"};
  RadialProblem pr;
  pr.p = 2.0;
  pr.d = 3.0;
  pr.domain = {0.0, kInf};
  pr.center = true;
  const auto s = ball_schedule(pr, 10);
  const auto probe = default_probe(s);
  const auto report = criticality_verdict(pr, s, probe);
  const auto weight = positivity_weight(pr, s, probe, report);
  const auto grids = criticality_grids(pr, s, probe, CriticalityOptions{}.nodes_per_segment);
  r.trials = scaled_count(200, scale);
  double worst = kInf;
  for (std::size_t t = 0; t < r.trials; ++t) {
    const GridPtr& g = grids.levels[t % grids.levels.size()];
    Field u = random_compact_field(g, rng, 0.001);
    const double q = energy_Q(u, pr).total * pr.p;
    double wint = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j)
      wint += g->mass(j) * weight.weight(g->radius(j)) * std::pow(std::abs(u[j]), pr.p);
    worst = std::min(worst, (q - wint) / std::max(q, 1e-300));
  }
  r.worst = worst;
  r.passed = worst >= -1e-8;
  r.detail = "min (int|u'|^p - int W_scaled|u|^p) / int|u'|^p, d=3 p=2";
  return r;
}

using SuiteFn = std::function<SuiteResult(Rng&, double)>;

const std::vector<std::pair<Suite, SuiteFn>>& registry() {
  static const std::vector<std::pair<Suite, SuiteFn>> r{
      {{"picone_nonnegativity", "Picone density >= -1e-12 cellwise for u >= 0, v > 0"},
       picone_nonnegativity},
      {{"picone_identity", "Q(u) = int L(u, v) for v a discrete solution"}, picone_identity},
      {{"vector_inequality", "vector inequality ratio finite and positive; 1 at p = 2"},
       vector_inequality},
      {{"simplified_energy_two_sided", "Q(vw)/simplified energy finite and positive"},
       simplified_energy_suite},
      {{"energy_scaling", "Q(tu) = t^p Q(u)"}, energy_scaling},
      {{"maximum_principle", "f >= 0, boundary >= 0 gives u >= 0, interior u > 0"},
       maximum_principle},
      {{"wcp_battery", "weak comparison on ordered-data pairs"}, wcp_battery},
      {{"threshold_monotonicity", "t_N non-increasing along nested levels"},
       threshold_monotonicity},
      {{"uk_monotonicity", "u_N non-decreasing along nested levels"}, uk_monotonicity},
      {{"gap_inequality", "Q(u) >= int W|u|^p with the certified positivity weight"},
       gap_inequality},
  };
  return r;
}

}  // namespace

const std::vector<Suite>& validation_suites() {
  static const std::vector<Suite> names = [] {
    std::vector<Suite> out;
    for (const auto& [s, fn] : registry()) out.push_back(s);
    return out;
  }();
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed, double scale) {
  for (const auto& [s, fn] : registry()) {
    if (s.name != name) continue;
    // Each suite draws from its own stream so results do not depend on order.
    const std::uint64_t h = fnv1a64(name);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    Rng rng(seq);
    try {
      return fn(rng, scale);
    } catch (const std::exception& e) {
      SuiteResult r{name};
      r.detail = std::string("exception: ") + e.what();
      return r;
    }
  }
  throw ArgumentError("unknown suite: " + name);
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed, double scale) {
  std::vector<SuiteResult> out;
  for (const auto& s : validation_suites()) out.push_back(run_suite(s.name, seed, scale));
  return out;
}

}  // namespace radcrit
