#include "radcrit/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "radcrit/criticality.hpp"
#include "radcrit/errors.hpp"
#include "radcrit/mingrowth.hpp"
#include "radcrit/validate.hpp"

namespace radcrit {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// JSON has no infinities; they are written as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json interval_json(const Interval& iv) { return json::array({num(iv.lo), num(iv.hi)}); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Table {
 public:
  explicit Table(std::string header) : text_(std::move(header) + "\n") {}
  template <class... T>
  void row(const T&... cells) {
    std::string line;
    ((line += cell(cells) + ","), ...);
    line.back() = '\n';
    text_ += line;
  }
  const std::string& text() const { return text_; }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(std::size_t n) { return std::to_string(n); }
  static std::string cell(int n) { return std::to_string(n); }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  std::string text_;
};

struct Context {
  const RunConfig& config;
  fs::path dir;
  std::ostream& log;
  json result = json::object();
  json tolerances = json::object();
  std::vector<std::string> files;
  int exit_code = kExitOk;
  std::string summary;

  void write(const std::string& name, const std::string& content) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir / name).string());
    os << content;
    files.push_back(name);
  }
  void write_field(const std::string& name, const Field& f) {
    std::ostringstream os;
    write_csv(os, f);
    write(name, os.str());
  }
  void nonconverged(const std::string& what) {
    exit_code = std::max(exit_code, static_cast<int>(kExitNonConvergence));
    result["nonconverged"].push_back(what);
  }
};

Spacing parse_spacing(const RunConfig& c) {
  const std::string s = c.word("spacing", "uniform");
  if (s == "uniform") return {SpacingLaw::uniform, 0.0};
  if (s == "geometric") return {SpacingLaw::geometric, 0.0};
  throw ConfigError("spacing must be uniform or geometric", c.params.at("spacing").line);
}

json schedule_json(const ExhaustionSchedule& s) {
  json levels = json::array();
  for (const auto& l : s.levels) levels.push_back(interval_json(l));
  return {{"coordinate", s.coordinate == Coordinate::radial ? "r" : "log_r"},
          {"levels", levels}};
}

std::size_t nps_or(const RunConfig& c, std::size_t fallback) {
  return c.schedule.nodes_per_segment > 0 ? c.schedule.nodes_per_segment : fallback;
}

void run_eig(Context& cx) {
  const RunConfig& c = cx.config;
  auto grid = std::make_shared<const Grid>(
      build_grid(c.problem, c.problem.domain, c.count("nodes", 2000), parse_spacing(c)));
  EigenOptions eo;
  eo.rel_tol = c.number("rel_tol", 1e-10);
  eo.solver = c.solver;
  cx.tolerances["eigen_rel_tol"] = eo.rel_tol;
  const EigenResult r = principal_eigenpair(c.problem, grid, eo);
  cx.result["lambda"] = num(r.lambda);
  cx.result["iterations"] = r.iterations;
  cx.result["converged"] = r.converged;
  cx.result["shift"] = r.shift;
  cx.result["nodes"] = grid->size();
  cx.write_field("eigenfunction.csv", r.eigenfunction);
  if (!r.converged) cx.nonconverged("eigenpair");
  cx.summary = "lambda_1 = " + fmt(r.lambda);
}

void run_solve(Context& cx) {
  const RunConfig& c = cx.config;
  auto grid = std::make_shared<const Grid>(
      build_grid(c.problem, c.problem.domain, c.count("nodes", 2000), parse_spacing(c)));
  const PotentialSpec src = c.terms("source");
  const Field f = Field::from_radius(grid, [&](double r) { return src(r); });
  const Boundary bc{c.number("left", 0.0), c.number("right", 0.0)};
  const SolveReport r = solve_dirichlet(c.problem, bc, f, c.solver);
  cx.result["iterations"] = r.iterations;
  cx.result["final_residual_norm"] = r.final_residual_norm;
  cx.result["regularization_eps_final"] = r.regularization_eps_final;
  cx.result["converged"] = r.converged;
  cx.result["sign"] = to_string(classify_sign(r.solution, c.problem, 1e-6));
  double umin = r.solution[0], umax = r.solution[0];
  for (double v : r.solution.values()) umin = std::min(umin, v), umax = std::max(umax, v);
  cx.result["min"] = umin;
  cx.result["max"] = umax;
  cx.write_field("solution.csv", r.solution);
  if (!r.converged) cx.nonconverged("dirichlet solve");
  cx.summary = "residual " + fmt(r.final_residual_norm) + (r.converged ? "" : " (not converged)");
}

void run_critical(Context& cx) {
  const RunConfig& c = cx.config;
  const ExhaustionSchedule s = c.make_schedule();
  const PotentialSpec probe = c.has("probe") ? c.terms("probe") : default_probe(s);
  CriticalityOptions o;
  o.nodes_per_segment = nps_or(c, o.nodes_per_segment);
  o.eps_crit = c.number("eps_crit", o.eps_crit);
  o.eigen.solver = c.solver;
  cx.tolerances["eps_crit"] = o.eps_crit;
  cx.tolerances["eigen_rel_tol"] = o.eigen.rel_tol;
  cx.result["schedule"] = schedule_json(s);
  cx.result["probe"] = probe.describe();

  const CriticalityReport rep = criticality_verdict(c.problem, s, probe, o);
  Table t("level,lo,hi,t,energy,weighted_integral,identity_error,eigen_residual,converged");
  for (const auto& e : rep.sequence) {
    t.row(e.level, e.interval.lo, e.interval.hi, e.t, e.energy, e.weighted_integral,
          e.identity_error, e.eigen_residual, e.converged);
    if (!e.converged) cx.nonconverged("level " + std::to_string(e.level));
  }
  cx.write("thresholds.csv", t.text());
  if (rep.sequence.size() < rep.levels_requested)
    cx.nonconverged("sequence truncated at level " + std::to_string(rep.sequence.size()));

  cx.result["verdict"] = to_string(rep.verdict);
  cx.result["t_star_estimate"] = num(rep.t_star_estimate);
  cx.result["levels_requested"] = rep.levels_requested;
  cx.result["levels_computed"] = rep.sequence.size();
  double worst = 0.0;
  for (const auto& e : rep.sequence) worst = std::max(worst, e.identity_error);
  cx.result["max_identity_error"] = worst;
  if (rep.ground_state) {
    cx.result["window"] = interval_json(rep.window);
    cx.result["window_deviation"] = rep.window_deviation;
    cx.write_field("ground_state.csv", *rep.ground_state);
  }
  if (rep.verdict == Verdict::subcritical && c.flag("positivity_weight", true)) {
    const PositivityWeight w = positivity_weight(c.problem, s, probe, rep, o);
    double lmin = kInf;
    for (double l : w.lambdas) lmin = std::min(lmin, l);
    cx.result["positivity_weight"] = {{"weight", w.weight.describe()},
                                      {"margin", num(w.margin)},
                                      {"min_lambda", num(lmin)}};
    Table tw("level,lambda");
    for (std::size_t n = 0; n < w.lambdas.size(); ++n) tw.row(n + 1, w.lambdas[n]);
    cx.write("positivity_weight.csv", tw.text());
  }
  cx.summary = "verdict " + to_string(rep.verdict);
}

void run_capacity(Context& cx) {
  const RunConfig& c = cx.config;
  const ExhaustionSchedule s = c.make_schedule();
  const CompactSetSpec k{*c.interval("k")};
  k.validate(c.problem);
  const std::size_t cells = c.count("cells", 400);
  cx.result["schedule"] = schedule_json(s);
  cx.result["k"] = interval_json(k.k);
  Table t("level,lo,hi,capacity,min_multiplier,active_nodes,converged");
  json values = json::array();
  std::optional<Field> last;
  for (std::size_t n = 0; n < s.levels.size(); ++n) {
    const Interval lv = s.level_radii(n);
    if (!std::isfinite(lv.hi) || !(lv.hi > k.k.hi)) continue;
    if (!(lv.lo < k.k.lo) && !k.is_center_ball(c.problem)) continue;
    const CapacityReport r = q_capacity(c.problem, k, lv, cells, c.solver);
    t.row(n + 1, lv.lo, lv.hi, r.value, r.min_multiplier, r.active_set.size(), r.converged);
    values.push_back(r.value);
    if (!r.converged) cx.nonconverged("level " + std::to_string(n + 1));
    last = r.minimizer;
  }
  cx.write("capacity.csv", t.text());
  if (last) cx.write_field("minimizer.csv", *last);
  cx.result["capacities"] = values;
  cx.summary = values.empty() ? "no level contains K"
                              : "capacity at last level " + fmt(values.back().get<double>());
}

void run_mingrowth(Context& cx) {
  const RunConfig& c = cx.config;
  const ExhaustionSchedule s = c.make_schedule();
  MinimalGrowthOptions o;
  o.nodes_per_segment = nps_or(c, o.nodes_per_segment);
  o.window = c.interval("window");
  o.cauchy_tol = c.number("cauchy_tol", o.cauchy_tol);
  o.solver = c.solver;
  cx.tolerances["cauchy_tol"] = o.cauchy_tol;
  cx.result["schedule"] = schedule_json(s);
  const std::string mode = c.word("mode", "compact");

  std::vector<MinimalGrowthLevel> levels;
  std::optional<Field> limit;
  if (mode == "compact") {
    const Interval kdef = c.problem.center ? Interval{0.0, 1.0} : Interval{1.0, 2.0};
    const CompactSetSpec k{c.interval("k", kdef), c.number("trace_lo", 1.0),
                           c.number("trace_hi", 1.0)};
    const MinimalGrowthRun run = uK_limit(c.problem, k, s, o);
    levels = run.levels;
    limit = run.limit;
    cx.result["k"] = interval_json(k.k);
    cx.result["window"] = interval_json(run.window);
    cx.result["cauchy_met"] = run.cauchy_met;
    double viol = 0.0;
    for (double v : run.monotonicity_log) viol = std::max(viol, v);
    cx.result["max_monotonicity_violation"] = viol;
    cx.result["cauchy_last"] = run.cauchy_log.empty() ? json(nullptr) : json(run.cauchy_log.back());
    cx.result["diagnostics"] = run.diagnostics;
    Table t("level,lo,hi,residual,converged,monotonicity,cauchy");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto& l = levels[i];
      const std::string mono = i == 0 ? "" : fmt(run.monotonicity_log.at(i - 1));
      const std::string cau = i == 0 ? "" : fmt(run.cauchy_log.at(i - 1));
      t.row(l.level, l.interval.lo, l.interval.hi, l.residual, l.converged, mono, cau);
    }
    cx.write("levels.csv", t.text());
    cx.summary = std::string("u^K ") + (run.cauchy_met ? "converged on window" : "Cauchy test not met");
  } else if (mode == "point") {
    const double x1 = c.number("x1", 1.0);
    const PointSingularityRun run = point_singularity_solution(c.problem, x1, s, o);
    levels = run.levels;
    limit = run.limit;
    cx.result["x1"] = x1;
    cx.result["diagnostics"] = run.diagnostics;
    Table t("level,lo,hi,residual,converged");
    for (const auto& l : levels) t.row(l.level, l.interval.lo, l.interval.hi, l.residual, l.converged);
    cx.write("levels.csv", t.text());
    cx.summary = "point singularity solution on " + std::to_string(levels.size()) + " levels";
    if (limit && c.has("fit_window")) {
      const std::string m = c.word("exponent", "power");
      if (m != "power" && m != "logarithmic")
        throw ConfigError("exponent must be power or logarithmic", c.params.at("exponent").line);
      const ExponentFit fit =
          singularity_exponent(*limit, c.problem.domain.lo, *c.interval("fit_window"),
                               m == "power" ? ExponentMode::power : ExponentMode::logarithmic);
      cx.result["exponent"] = {{"mode", m},
                               {"slope", fit.slope},
                               {"residual", fit.residual},
                               {"points", fit.points},
                               {"alpha", num(alpha_exponent(c.problem.d, c.problem.p))}};
      cx.summary += ", slope " + fmt(fit.slope);
    }
  } else {
    throw ConfigError("mode must be compact or point", c.params.at("mode").line);
  }
  for (const auto& l : levels)
    if (!l.converged) cx.nonconverged("level " + std::to_string(l.level));
  if (limit) cx.write_field("limit.csv", *limit);
}

void run_certify(Context& cx) {
  const RunConfig& c = cx.config;
  const ExhaustionSchedule s = c.make_schedule();
  const PotentialSpec uspec = c.terms("u");
  const CompactSetSpec omega2{*c.interval("omega2")};
  const Interval b = *c.interval("b");
  Interval range{omega2.k.hi, s.level_radii(s.levels.size() - 1).hi};
  range = c.interval("sample_range", range);
  if (!(range.lo > 0.0) || !std::isfinite(range.hi))
    throw ConfigError("certify.sample_range must be positive and bounded");
  auto grid = std::make_shared<const Grid>(build_log_grid(
      c.problem, {std::log(range.lo), std::log(range.hi)}, c.count("samples", 20001)));
  const Field u = Field::from_radius(grid, [&](double r) { return uspec(r); });
  CertificateOptions o;
  o.nodes_per_segment = nps_or(c, o.nodes_per_segment);
  cx.tolerances["certificate_rel_tol"] = o.rel_tol;
  const CertificateRun run = minimal_growth_certificate(c.problem, u, omega2, b, s, o);
  Table t("level,lo,hi,mu,iterations");
  json mus = json::array();
  for (const auto& l : run.levels) {
    const Interval iv = s.levels.at(l.level - 1);
    t.row(l.level, iv.lo, iv.hi, l.mu, l.iterations);
    mus.push_back(l.mu);
  }
  cx.write("certificate.csv", t.text());
  if (!run.levels.empty()) cx.write_field("minimizer.csv", run.levels.back().w);
  cx.result["schedule"] = schedule_json(s);
  cx.result["u"] = uspec.describe();
  cx.result["omega2"] = interval_json(omega2.k);
  cx.result["b"] = interval_json(b);
  cx.result["mu"] = mus;
  if (run.levels.size() >= 2)
    cx.result["mu_ratio_last_first"] = run.levels.back().mu / run.levels.front().mu;
  cx.result["verdict"] = to_string(run.verdict);
  cx.summary = "certificate " + to_string(run.verdict);
}

void run_validate(Context& cx) {
  const RunConfig& c = cx.config;
  const double scale = c.number("scale", 0.25);
  std::vector<std::string> names;
  if (c.has("suites")) {
    std::string all = c.word("suites", "");
    std::istringstream is(all);
    for (std::string n; std::getline(is, n, ',');) {
      n.erase(0, n.find_first_not_of(' '));
      n.erase(n.find_last_not_of(' ') + 1);
      bool known = false;
      for (const auto& s : validation_suites()) known = known || s.name == n;
      if (!known) throw ConfigError("unknown suite '" + n + "'", c.params.at("suites").line);
      names.push_back(n);
    }
  } else {
    for (const auto& s : validation_suites()) names.push_back(s.name);
  }
  cx.result["scale"] = scale;
  Table t("suite,passed,trials,worst");
  json suites = json::array();
  int failed = 0;
  for (const auto& n : names) {
    const SuiteResult r = run_suite(n, c.seed, scale);
    t.row(r.name, r.passed, r.trials, r.worst);
    suites.push_back({{"name", r.name},
                      {"passed", r.passed},
                      {"trials", r.trials},
                      {"worst", num(r.worst)},
                      {"detail", r.detail}});
    cx.log << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
    failed += r.passed ? 0 : 1;
  }
  cx.write("suites.csv", t.text());
  cx.result["suites"] = suites;
  if (failed > 0) cx.exit_code = kExitValidation;
  cx.summary = std::to_string(names.size() - failed) + "/" + std::to_string(names.size()) +
               " suites passed";
}

}  // namespace

RunResult run(const RunConfig& config, std::ostream& log) {
  Context cx{config, fs::path(config.out), log};
  fs::create_directories(cx.dir);
  cx.tolerances["solver_tol"] = config.solver.resolved_tol(config.problem.p);
  cx.tolerances["max_newton"] = config.solver.max_newton;
  cx.tolerances["eps_start"] = config.solver.eps_start;
  cx.tolerances["eps_end"] = config.solver.eps_end;
  cx.tolerances["eps_factor"] = config.solver.eps_factor;

  std::string error;
  try {
    switch (config.command) {
      case Command::eig: run_eig(cx); break;
      case Command::solve: run_solve(cx); break;
      case Command::critical: run_critical(cx); break;
      case Command::capacity: run_capacity(cx); break;
      case Command::mingrowth: run_mingrowth(cx); break;
      case Command::certify: run_certify(cx); break;
      case Command::validate: run_validate(cx); break;
    }
  } catch (const std::exception& ex) {
    error = ex.what();
    cx.exit_code = kExitValidation;
    cx.summary = "error: " + error;
  }

  json entries = json::array();
  for (const auto& e : config.entries) entries.push_back(json::array({e.key, e.value}));
  const RadialProblem& pr = config.problem;
  json report = {
      {"command", to_string(config.command)},
      {"config_hash", config.hash_hex()},
      {"config", entries},
      {"seed", config.seed},
      {"problem",
       {{"p", pr.p},
        {"d", pr.d},
        {"domain", interval_json(pr.domain)},
        {"center", pr.center},
        {"potential", pr.potential.describe()}}},
      {"tolerances", cx.tolerances},
      {"result", cx.result},
      {"files", cx.files},
      {"exit_code", cx.exit_code},
      {"status", cx.exit_code == kExitOk              ? "ok"
                 : cx.exit_code == kExitNonConvergence ? "nonconverged"
                                                       : "failed"},
  };
  if (!error.empty()) report["error"] = error;
  const fs::path path = cx.dir / "report.json";
  std::ofstream(path, std::ios::binary) << report.dump(2) << "\n";
  return {cx.exit_code, cx.summary, path.string()};
}

}  // namespace radcrit
