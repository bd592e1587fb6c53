#include "radcrit/domain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "radcrit/errors.hpp"

namespace radcrit {

namespace {

// Integral of exp(a*s) over [s0, s1], evaluated without cancellation.
double exp_integral(double a, double s0, double s1) {
  const double len = s1 - s0;
  if (std::abs(a) * len < 1e-300 || a == 0.0) return len;
  // Factor out the larger endpoint so the remaining factor lies in (0, 1].
  if (a > 0.0) return std::exp(a * s1) * -std::expm1(-a * len) / a;
  return std::exp(a * s0) * -std::expm1(a * len) / -a;
}

// Integral of r^(d-1) over [r0, r1].
double power_integral(double d, double r0, double r1) {
  if (r0 == 0.0) return std::pow(r1, d) / d;
  if (!std::isfinite(r1)) return kInf;
  return std::pow(r0, d) * std::expm1(d * std::log1p((r1 - r0) / r0)) / d;
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

// ---------------------------------------------------------------- potential

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::constant(double c) {
  PotentialSpec v;
  v.terms_.push_back({Kind::constant, c});
  return v;
}

PotentialSpec PotentialSpec::power(double c, double s) {
  PotentialSpec v;
  v.terms_.push_back({Kind::power, c, s});
  return v;
}

PotentialSpec PotentialSpec::bump(double center, double radius, double height) {
  if (!(radius > 0.0)) throw ArgumentError("bump radius must be positive");
  PotentialSpec v;
  v.terms_.push_back({Kind::bump, center, radius, height});
  return v;
}

PotentialSpec PotentialSpec::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.empty()) throw ArgumentError("tabulated potential needs samples");
  std::sort(samples.begin(), samples.end());
  PotentialSpec v;
  Term t{Kind::tabulated};
  t.samples = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(samples));
  v.terms_.push_back(std::move(t));
  return v;
}

double PotentialSpec::operator()(double r) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    switch (t.kind) {
      case Kind::zero:
        break;
      case Kind::constant:
        sum += t.a;
        break;
      case Kind::power:
        if (t.a != 0.0) sum += t.a * std::pow(r, t.b);
        break;
      case Kind::bump: {
        const double z = (r - t.a) / t.b;
        if (std::abs(z) < 1.0) sum += t.c * std::exp(1.0 - 1.0 / (1.0 - z * z));
        break;
      }
      case Kind::tabulated: {
        const auto& s = *t.samples;
        if (r <= s.front().first) {
          sum += s.front().second;
        } else if (r >= s.back().first) {
          sum += s.back().second;
        } else {
          auto it = std::upper_bound(s.begin(), s.end(), r,
                                     [](double x, const auto& e) { return x < e.first; });
          const auto& [r1, v1] = *it;
          const auto& [r0, v0] = *(it - 1);
          sum += v0 + (v1 - v0) * (r - r0) / (r1 - r0);
        }
        break;
      }
    }
  }
  return sum;
}

PotentialSpec PotentialSpec::plus(const PotentialSpec& other, double factor) const {
  PotentialSpec out = *this;
  for (Term t : other.terms_) {
    switch (t.kind) {
      case Kind::zero:
        continue;
      case Kind::constant:
      case Kind::power:
        t.a *= factor;
        break;
      case Kind::bump:
        t.c *= factor;
        break;
      case Kind::tabulated: {
        auto s = *t.samples;
        for (auto& e : s) e.second *= factor;
        t.samples = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(s));
        break;
      }
    }
    out.terms_.push_back(std::move(t));
  }
  return out;
}

PotentialSpec PotentialSpec::scaled(double factor) const { return zero().plus(*this, factor); }

bool PotentialSpec::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
    switch (t.kind) {
      case Kind::zero:
        return true;
      case Kind::constant:
      case Kind::power:
        return t.a == 0.0;
      case Kind::bump:
        return t.c == 0.0;
      case Kind::tabulated:
        return std::all_of(t.samples->begin(), t.samples->end(),
                           [](const auto& e) { return e.second == 0.0; });
    }
    return false;
  });
}

PotentialSpec::Kind PotentialSpec::kind() const {
  return terms_.empty() ? Kind::zero : terms_.front().kind;
}

std::optional<Interval> PotentialSpec::support() const {
  std::optional<Interval> out;
  for (const auto& t : terms_) {
    if (t.kind == Kind::zero) continue;
    if (t.kind != Kind::bump) return std::nullopt;
    Interval s{t.a - t.b, t.a + t.b};
    out = out ? Interval{std::min(out->lo, s.lo), std::max(out->hi, s.hi)} : s;
  }
  return out;
}

std::string PotentialSpec::describe() const {
  if (terms_.empty()) return "zero";
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& t = terms_[k];
    if (k) os << " + ";
    switch (t.kind) {
      case Kind::zero: os << "zero"; break;
      case Kind::constant: os << "constant(" << t.a << ")"; break;
      case Kind::power: os << "power(" << t.a << ", " << t.b << ")"; break;
      case Kind::bump: os << "bump(" << t.a << ", " << t.b << ", " << t.c << ")"; break;
      case Kind::tabulated: os << "tabulated(" << t.samples->size() << " samples)"; break;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- problem

bool default_center(const Interval& domain, double d) { return domain.lo == 0.0 && d > 1.0; }

void RadialProblem::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("p must satisfy 1 < p < inf");
  if (!(d >= 1.0) || !std::isfinite(d)) throw ArgumentError("d must be >= 1");
  if (!(domain.lo >= 0.0) || !(domain.lo < domain.hi) || std::isnan(domain.hi))
    throw DomainError("domain must satisfy 0 <= r_lo < r_hi <= inf");
  if (center && domain.lo != 0.0) throw DomainError("a center requires r_lo = 0");
}

RadialProblem RadialProblem::with_potential(PotentialSpec v) const {
  RadialProblem out = *this;
  out.potential = std::move(v);
  return out;
}

// ---------------------------------------------------------------- grid

Grid::Grid(std::vector<double> coords, Coordinate coordinate, double p, double d, bool origin,
           Spacing spacing)
    : x_(std::move(coords)), coordinate_(coordinate), p_(p), d_(d), origin_(origin),
      spacing_(spacing) {
  if (x_.size() < 3) throw ArgumentError("a grid needs at least 3 nodes");
  for (std::size_t j = 0; j + 1 < x_.size(); ++j) {
    if (!(x_[j] < x_[j + 1])) throw ArgumentError("grid nodes must be strictly increasing");
  }
  if (spacing_.law == SpacingLaw::geometric && !(spacing_.ratio > 0.0))
    throw ArgumentError("geometric spacing needs a positive ratio");
  if (coordinate_ == Coordinate::radial && x_.front() < 0.0)
    throw DomainError("radial nodes must be nonnegative");
  if (origin_ && (coordinate_ != Coordinate::radial || x_.front() != 0.0))
    throw ArgumentError("origin grids start at r = 0");

  const std::size_t nc = cells();
  measure_.resize(nc);
  stiffness_.resize(nc);
  mass_.assign(x_.size(), 0.0);
  for (std::size_t i = 0; i < nc; ++i) {
    const double h = cell_length(i);
    if (coordinate_ == Coordinate::radial) {
      measure_[i] = power_integral(d_, x_[i], x_[i + 1]);
      stiffness_[i] = measure_[i] / std::pow(h, p_);
    } else {
      measure_[i] = exp_integral(d_, x_[i], x_[i + 1]);
      // r^(d-1) |du/dr|^p dr = e^{(d-p) s} |du/ds|^p ds
      stiffness_[i] = exp_integral(d_ - p_, x_[i], x_[i + 1]) / std::pow(h, p_);
    }
    // Log grids far from r = 1 may underflow to 0 or overflow to inf.
    const bool ok = coordinate_ == Coordinate::radial ? measure_[i] > 0.0 : measure_[i] >= 0.0;
    if (!ok || !(stiffness_[i] >= 0.0)) throw ArgumentError("invalid cell quadrature weight");
    mass_[i] += 0.5 * measure_[i];
    mass_[i + 1] += 0.5 * measure_[i];
  }
}

double Grid::radius(std::size_t j) const {
  return coordinate_ == Coordinate::radial ? x_[j] : std::exp(x_[j]);
}

double Grid::weight(std::size_t j) const {
  if (coordinate_ == Coordinate::radial) return std::pow(x_[j], d_ - 1.0);
  return std::exp((d_ - 1.0) * x_[j]);
}

double Grid::measure_between(double a, double b) const {
  if (coordinate_ == Coordinate::radial) return power_integral(d_, a, b);
  return exp_integral(d_, a, b);
}

double Grid::to_coord(double r) const {
  return coordinate_ == Coordinate::radial ? r : std::log(r);
}

std::size_t Grid::locate(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.begin()) return 0;
  const auto j = static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(j, cells() - 1);
}

double Grid::interpolate(std::span<const double> values, double x) const {
  const std::size_t i = locate(x);
  const double t = std::clamp((x - x_[i]) / cell_length(i), 0.0, 1.0);
  return values[i] + t * (values[i + 1] - values[i]);
}

Grid Grid::slice(std::size_t first, std::size_t last) const {
  if (last >= x_.size() || last < first + 2) throw ArgumentError("invalid grid slice");
  std::vector<double> sub(x_.begin() + static_cast<std::ptrdiff_t>(first),
                          x_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return Grid(std::move(sub), coordinate_, p_, d_, origin_ && first == 0, spacing_);
}

// ---------------------------------------------------------------- field

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ArgumentError("field without grid");
  if (values_.size() != grid_->size()) throw ArgumentError("field length differs from node count");
}

Field Field::constant(GridPtr grid, double c) {
  const std::size_t n = grid->size();
  return Field(std::move(grid), std::vector<double>(n, c));
}

bool Field::compactly_supported(double tol) const {
  const bool inner = grid_->has_origin() || std::abs(values_.front()) <= tol;
  return inner && std::abs(values_.back()) <= tol;
}

Field Field::scaled(double t) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= t;
  return Field(grid_, std::move(v));
}

// ---------------------------------------------------------------- exhaustion

Interval ExhaustionSchedule::level_radii(std::size_t n) const {
  const Interval& l = levels.at(n);
  if (coordinate == Coordinate::radial) return l;
  return {std::exp(l.lo), std::exp(l.hi)};
}

void ExhaustionSchedule::validate(const RadialProblem& problem) const {
  if (levels.empty()) throw ArgumentError("exhaustion needs at least one level");
  for (std::size_t n = 0; n < levels.size(); ++n) {
    const Interval r = level_radii(n);
    if (!(levels[n].lo < levels[n].hi)) throw ArgumentError("empty exhaustion level");
    if (!std::isfinite(levels[n].lo) || !std::isfinite(levels[n].hi))
      throw ArgumentError("exhaustion levels must be bounded");
    if (r.lo < problem.domain.lo || r.hi > problem.domain.hi)
      throw DomainError("exhaustion level outside the domain");
    if (n > 0) {
      const Interval& a = levels[n - 1];
      const Interval& b = levels[n];
      const bool lo_ok = b.lo < a.lo || (nearly_equal(a.lo, b.lo) &&
                                         nearly_equal(level_radii(n).lo, problem.domain.lo));
      const bool hi_ok = b.hi > a.hi || (nearly_equal(a.hi, b.hi) &&
                                         nearly_equal(level_radii(n).hi, problem.domain.hi));
      if (!lo_ok || !hi_ok) throw ArgumentError("exhaustion levels must be strictly nested");
    }
  }
  const Interval first = level_radii(0);
  if (!(first.lo <= x0 && x0 <= first.hi)) throw DomainError("x0 must lie in the first level");
  if (x1 && !(first.lo <= *x1 && *x1 <= first.hi))
    throw DomainError("x1 must lie in the first level");
}

bool CompactSetSpec::is_center_ball(const RadialProblem& problem) const {
  return problem.center && k.lo == 0.0;
}

void CompactSetSpec::validate(const RadialProblem& problem) const {
  if (!(k.lo <= k.hi)) throw ArgumentError("compact set with lo > hi");
  if (is_center_ball(problem)) {
    if (!(k.hi < problem.domain.hi)) throw DomainError("compact set touches the boundary");
    return;
  }
  if (!(problem.domain.lo < k.lo && k.hi < problem.domain.hi))
    throw DomainError("compact set must lie strictly inside the domain");
}

// ---------------------------------------------------------------- builders

namespace {

// Cell growth ratio q with first cell = target_fraction * length over n cells.
double geometric_ratio_for_first_cell(std::size_t n, double fraction) {
  if (1.0 / static_cast<double>(n) <= fraction) return 1.0;
  // first = (q - 1)/(q^n - 1) is decreasing in q
  double lo = 1.0, hi = 2.0;
  auto first = [n](double q) { return (q - 1.0) / (std::pow(q, static_cast<double>(n)) - 1.0); };
  while (first(hi) > fraction) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (first(mid) > fraction ? lo : hi) = mid;
  }
  return hi;
}

std::vector<double> fill_segment(double a, double b, std::size_t cells, bool log_spaced) {
  std::vector<double> x(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(cells);
    x[k] = log_spaced ? a * std::pow(b / a, t) : a + t * (b - a);
  }
  x.front() = a;
  x.back() = b;
  return x;
}

}  // namespace

Grid build_grid(const RadialProblem& problem, const Interval& level, std::size_t resolution,
                Spacing spacing) {
  problem.validate();
  if (resolution < 3) throw ArgumentError("resolution must be at least 3");
  if (!(level.lo < level.hi) || !std::isfinite(level.hi) || level.lo < problem.domain.lo ||
      level.hi > problem.domain.hi)
    throw DomainError("level outside the domain");

  const std::size_t n = resolution - 1;
  const double len = level.hi - level.lo;
  std::vector<double> x(resolution);
  if (spacing.law == SpacingLaw::uniform) {
    for (std::size_t k = 0; k <= n; ++k)
      x[k] = level.lo + len * static_cast<double>(k) / static_cast<double>(n);
    spacing.ratio = 1.0;
  } else {
    double q = spacing.ratio;
    if (q == 0.0) {
      // Prefer constant node ratios when the first cell is small enough.
      if (level.lo > 0.0) {
        const double qn = std::pow(level.hi / level.lo, 1.0 / static_cast<double>(n));
        q = level.lo * (qn - 1.0) <= 1e-3 * len ? qn : geometric_ratio_for_first_cell(n, 1e-3);
      } else {
        q = geometric_ratio_for_first_cell(n, 1e-3);
      }
    }
    if (!(q > 0.0)) throw ArgumentError("geometric spacing needs a positive ratio");
    spacing.ratio = q;
    const double total = std::abs(q - 1.0) < 1e-14 ? static_cast<double>(n)
                                                   : (std::pow(q, static_cast<double>(n)) - 1.0) / (q - 1.0);
    double h = len / total, acc = level.lo;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = acc;
      acc += h;
      h *= q;
    }
  }
  x.front() = level.lo;
  x.back() = level.hi;
  const bool origin = problem.center && level.lo == 0.0;
  return Grid(std::move(x), Coordinate::radial, problem.p, problem.d, origin, spacing);
}

Grid build_log_grid(const RadialProblem& problem, const Interval& log_level,
                    std::size_t resolution) {
  problem.validate();
  if (resolution < 3) throw ArgumentError("resolution must be at least 3");
  if (std::exp(log_level.lo) < problem.domain.lo || std::exp(log_level.hi) > problem.domain.hi)
    throw DomainError("level outside the domain");
  auto x = fill_segment(log_level.lo, log_level.hi, resolution - 1, false);
  return Grid(std::move(x), Coordinate::logarithmic, problem.p, problem.d, false,
              {SpacingLaw::uniform, 1.0});
}

Field embed(const Field& field, GridPtr target) {
  const Grid& src = field.grid();
  if (src.coordinate() != target->coordinate())
    throw ArgumentError("embed requires grids in the same coordinate");
  const Interval si = src.interval(), ti = target->interval();
  if (!ti.contains(si)) throw ArgumentError("embed target must contain the source interval");
  std::vector<double> out(target->size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double x = target->coord(j);
    if (si.contains(x)) out[j] = field.at_coord(x);
  }
  return Field(std::move(target), std::move(out));
}

NestedGrids build_nested_grids(const RadialProblem& problem, const ExhaustionSchedule& schedule,
                               std::size_t nodes_per_segment,
                               std::vector<double> extra_breakpoints) {
  schedule.validate(problem);
  if (nodes_per_segment < 2) throw ArgumentError("nodes_per_segment must be at least 2");
  std::vector<double> bps = std::move(extra_breakpoints);
  for (const auto& l : schedule.levels) {
    bps.push_back(l.lo);
    bps.push_back(l.hi);
  }
  std::sort(bps.begin(), bps.end());
  const Interval outer = schedule.levels.back();
  std::vector<double> pts;
  for (double b : bps) {
    if (b < outer.lo || b > outer.hi) continue;
    if (pts.empty() || b > pts.back() * (1.0 + 1e-14) + 1e-300) pts.push_back(b);
  }
  const bool radial = schedule.coordinate == Coordinate::radial;
  std::vector<double> x{pts.front()};
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const bool log_spaced = radial && pts[s] > 0.0;
    auto seg = fill_segment(pts[s], pts[s + 1], nodes_per_segment, log_spaced);
    x.insert(x.end(), seg.begin() + 1, seg.end());
  }
  const bool origin = radial && problem.center && x.front() == 0.0;
  auto global = std::make_shared<const Grid>(std::move(x), schedule.coordinate, problem.p,
                                             problem.d, origin);
  NestedGrids out;
  out.global = global;
  const auto xs = global->coords();
  auto index_of = [&](double v) {
    auto it = std::lower_bound(xs.begin(), xs.end(), v - 1e-12 * std::max(1.0, std::abs(v)));
    return static_cast<std::size_t>(it - xs.begin());
  };
  for (const auto& l : schedule.levels) {
    const std::size_t a = index_of(l.lo), b = index_of(l.hi);
    out.ranges.emplace_back(a, b);
    out.levels.push_back(std::make_shared<const Grid>(global->slice(a, b)));
  }
  return out;
}

ExhaustionSchedule ball_schedule(const RadialProblem& problem, std::size_t levels, double r1,
                                 double growth) {
  if (!(growth > 1.0)) throw ArgumentError("schedule growth must exceed 1");
  ExhaustionSchedule s;
  for (std::size_t n = 0; n < levels; ++n) {
    const double hi = std::min(r1 * std::pow(growth, static_cast<double>(n)), problem.domain.hi);
    if (!s.levels.empty() && hi <= s.levels.back().hi) break;
    s.levels.push_back({problem.domain.lo, hi});
  }
  s.x0 = 0.5 * s.levels.front().hi;
  return s;
}

ExhaustionSchedule punctured_schedule(const RadialProblem& problem, std::size_t levels,
                                      double rc) {
  ExhaustionSchedule s;
  for (std::size_t n = 1; n <= levels; ++n) {
    const double f = std::ldexp(1.0, static_cast<int>(n));
    s.levels.push_back({std::max(rc / f, problem.domain.lo), std::min(rc * f, problem.domain.hi)});
  }
  s.x0 = rc;
  return s;
}

ExhaustionSchedule half_line_schedule(const RadialProblem& problem, std::size_t levels) {
  ExhaustionSchedule s;
  const double a = problem.domain.lo;
  for (std::size_t n = 1; n <= levels; ++n) {
    const double hi = std::min(a + std::ldexp(1.0, static_cast<int>(n)), problem.domain.hi);
    if (!s.levels.empty() && hi <= s.levels.back().hi) break;
    s.levels.push_back({a, hi});
  }
  s.x0 = 0.5 * (s.levels.front().lo + s.levels.front().hi);
  return s;
}

ExhaustionSchedule log_punctured_schedule(const RadialProblem& problem, std::size_t levels,
                                          double rc) {
  ExhaustionSchedule s;
  s.coordinate = Coordinate::logarithmic;
  const double c = std::log(rc);
  const double lo_lim = problem.domain.lo > 0.0 ? std::log(problem.domain.lo) : -kInf;
  const double hi_lim = std::log(problem.domain.hi);
  for (std::size_t n = 0; n < levels; ++n) {
    const double half = std::ldexp(1.0, static_cast<int>(n));
    s.levels.push_back({std::max(c - half, lo_lim), std::min(c + half, hi_lim)});
  }
  s.x0 = rc;
  return s;
}

ExhaustionSchedule default_schedule(const RadialProblem& problem, std::size_t levels) {
  if (problem.center) {
    if (problem.d > 1.0 && std::abs(problem.d - problem.p) < 1e-12)
      return log_punctured_schedule(problem, levels);
    return ball_schedule(problem, levels);
  }
  return half_line_schedule(problem, levels);
}

// ---------------------------------------------------------------- csv

void write_csv(std::ostream& os, const Field& field) {
  const Grid& g = field.grid();
  os << (g.coordinate() == Coordinate::radial ? "r" : "log_r") << ",value\n";
  os << std::setprecision(17);
  for (std::size_t j = 0; j < field.size(); ++j) os << g.coord(j) << ',' << field[j] << '\n';
}

Field read_csv(std::istream& is, GridPtr grid) {
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("empty CSV");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ArgumentError("CSV row without comma: " + line);
    const double x = std::stod(line.substr(0, comma));
    const double v = std::stod(line.substr(comma + 1));
    const std::size_t j = values.size();
    if (j >= grid->size() || !nearly_equal(x, grid->coord(j)))
      throw ArgumentError("CSV nodes do not match the grid");
    values.push_back(v);
  }
  return Field(std::move(grid), std::move(values));
}

}  // namespace radcrit
