#pragma once

// Problem description and discretization carriers shared by every module.
//
// All computations are one-dimensional radial reductions: a function of
// |x| on an interval of radii, integrated against r^(d-1) dr. The angular
// surface constant is dropped. A grid may store its nodes either as radii
// or as log-radii; the latter keeps the d = p case representable on
// exhaustions whose outer radius exceeds the double range.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace radcrit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  /// Closed containment of `other` in this interval.
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

/// Potential V(r). A spec is a finite linear combination of elementary
/// terms so that shifted potentials such as V - tW stay first-class.
class PotentialSpec {
 public:
  enum class Kind { zero, constant, power, bump, tabulated };

  static PotentialSpec zero();
  static PotentialSpec constant(double c);
  /// c * r^s
  static PotentialSpec power(double c, double s);
  /// Smooth bump height * exp(1 - 1/(1 - z^2)), z = (r - center)/radius,
  /// supported on (center - radius, center + radius).
  static PotentialSpec bump(double center, double radius, double height);
  /// Piecewise-linear through (r, V) samples, constant beyond the ends.
  static PotentialSpec tabulated(std::vector<std::pair<double, double>> samples);

  double operator()(double r) const;

  /// this + factor * other
  PotentialSpec plus(const PotentialSpec& other, double factor = 1.0) const;
  PotentialSpec scaled(double factor) const;

  bool is_zero() const;
  /// Kind of a single-term spec; composite specs report their first term.
  Kind kind() const;
  /// Support interval of a nonnegative compactly supported spec (bumps only).
  std::optional<Interval> support() const;
  std::string describe() const;

 private:
  struct Term {
    Kind kind = Kind::zero;
    double a = 0.0, b = 0.0, c = 0.0;
    std::shared_ptr<const std::vector<std::pair<double, double>>> samples;
  };
  std::vector<Term> terms_;
};

/// Discretized instance of -div(|grad u|^{p-2} grad u) + V|u|^{p-2}u = 0
/// in radial form.
struct RadialProblem {
  double p = 2.0;
  double d = 1.0;
  Interval domain{0.0, 1.0};
  PotentialSpec potential = PotentialSpec::zero();
  /// r = 0 is the center of a ball (natural condition), not a boundary.
  /// Meaningful only when domain.lo == 0.
  bool center = false;

  /// Throws ArgumentError / DomainError on violated invariants.
  void validate() const;
  RadialProblem with_potential(PotentialSpec v) const;
};

/// Default for `center`: r = 0 is a center for d > 1, a boundary for d = 1.
bool default_center(const Interval& domain, double d);

enum class Coordinate { radial, logarithmic };

enum class SpacingLaw { uniform, geometric };

/// Node distribution. For geometric spacing `ratio` is the growth factor of
/// consecutive cell lengths; ratio == 0 selects it automatically.
struct Spacing {
  SpacingLaw law = SpacingLaw::uniform;
  double ratio = 0.0;
};

/// Strictly increasing node set on a level of a radial problem, with the
/// per-cell stiffness and per-node lumped mass of the P1 discretization.
///
/// Discrete energy: p*Q(u) = sum_i stiffness(i)*|u_{i+1}-u_i|^p
///                         + sum_j mass(j)*V(r_j)*|u_j|^p.
class Grid {
 public:
  Grid(std::vector<double> coords, Coordinate coordinate, double p, double d, bool origin,
       Spacing spacing = {});

  std::size_t size() const { return x_.size(); }
  std::size_t cells() const { return x_.size() - 1; }
  std::span<const double> coords() const { return x_; }
  double coord(std::size_t j) const { return x_[j]; }
  /// Physical radius of node j (may overflow to inf on log grids).
  double radius(std::size_t j) const;
  /// r^(d-1) at node j.
  double weight(std::size_t j) const;
  double cell_length(std::size_t i) const { return x_[i + 1] - x_[i]; }
  /// Integral of r^(d-1) dr over cell i.
  double cell_measure(std::size_t i) const { return measure_[i]; }
  /// Integral of r^(d-1) dr between coordinates a <= b.
  double measure_between(double a, double b) const;
  double stiffness(std::size_t i) const { return stiffness_[i]; }
  double mass(std::size_t j) const { return mass_[j]; }

  Coordinate coordinate() const { return coordinate_; }
  const Spacing& spacing() const { return spacing_; }
  double p() const { return p_; }
  double d() const { return d_; }
  double weight_exponent() const { return d_ - 1.0; }
  /// Node 0 is the center of a ball: it carries no boundary condition.
  bool has_origin() const { return origin_; }
  Interval interval() const { return {x_.front(), x_.back()}; }

  /// Coordinate of a physical radius in this grid's coordinate system.
  double to_coord(double r) const;
  /// Index of the cell containing coordinate x (clamped to the grid).
  std::size_t locate(double x) const;
  /// Linear interpolation of nodal values at coordinate x.
  double interpolate(std::span<const double> values, double x) const;
  /// Nodes that are free unknowns for zero-trace (Dirichlet) problems.
  std::size_t first_interior() const { return origin_ ? 0 : 1; }
  std::size_t last_interior() const { return x_.size() - 2; }

  /// Sub-grid on nodes [first, last]; origin flag kept only when first == 0.
  Grid slice(std::size_t first, std::size_t last) const;

 private:
  std::vector<double> x_;
  Coordinate coordinate_;
  double p_, d_;
  bool origin_;
  Spacing spacing_;
  std::vector<double> measure_, stiffness_, mass_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Nodal values of a piecewise-linear function on a grid.
class Field {
 public:
  Field(GridPtr grid, std::vector<double> values);

  static Field constant(GridPtr grid, double c);
  template <class F>
  static Field from_radius(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid->radius(j));
    return Field(std::move(grid), std::move(v));
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  double at_coord(double x) const { return grid_->interpolate(values_, x); }

  /// Zero at every boundary node that carries a Dirichlet condition.
  bool compactly_supported(double tol = 0.0) const;
  Field scaled(double t) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Increasing sequence of levels exhausting the problem domain. Levels are
/// expressed in `coordinate`; reference points are physical radii.
struct ExhaustionSchedule {
  Coordinate coordinate = Coordinate::radial;
  std::vector<Interval> levels;
  double x0 = 1.0;
  std::optional<double> x1;

  void validate(const RadialProblem& problem) const;
  Interval level_radii(std::size_t n) const;
};

/// Compact set K = [lo, hi] inside the domain, with the two boundary trace
/// values used when K carries Dirichlet data.
struct CompactSetSpec {
  Interval k;
  double trace_lo = 1.0;
  double trace_hi = 1.0;

  /// A ball around a center (lo == domain.lo == 0 with problem.center) is
  /// admitted; otherwise K must lie strictly inside the domain.
  void validate(const RadialProblem& problem) const;
  bool is_center_ball(const RadialProblem& problem) const;
};

/// Grid spanning exactly `level`; geometric spacing concentrates nodes
/// toward level.lo.
Grid build_grid(const RadialProblem& problem, const Interval& level, std::size_t resolution,
                Spacing spacing = {SpacingLaw::geometric, 0.0});

/// Grid with `resolution` nodes uniform in log r on [log_level.lo, log_level.hi].
Grid build_log_grid(const RadialProblem& problem, const Interval& log_level,
                    std::size_t resolution);

/// Piecewise-linear interpolation onto `target`; zero outside the source.
Field embed(const Field& field, GridPtr target);

/// All levels of a schedule as contiguous index ranges of one global grid,
/// so the discrete spaces are nested.
struct NestedGrids {
  GridPtr global;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::vector<GridPtr> levels;
};

/// Each gap between consecutive breakpoints (level endpoints plus `extra`,
/// given in the schedule's coordinate) receives `nodes_per_segment` cells,
/// log-spaced on radial segments away from 0 and uniform otherwise.
NestedGrids build_nested_grids(const RadialProblem& problem, const ExhaustionSchedule& schedule,
                               std::size_t nodes_per_segment,
                               std::vector<double> extra_breakpoints = {});

/// (0, r1 * g^(N-1)) intersected with the domain, N = 1..levels.
ExhaustionSchedule ball_schedule(const RadialProblem& problem, std::size_t levels,
                                 double r1 = 2.0, double growth = 2.0);
/// (rc / 2^N, rc * 2^N) intersected with the domain.
ExhaustionSchedule punctured_schedule(const RadialProblem& problem, std::size_t levels,
                                      double rc = 1.0);
/// (a, a + 2^N) intersected with the domain.
ExhaustionSchedule half_line_schedule(const RadialProblem& problem, std::size_t levels);
/// log r in (log rc - 2^(N-1), log rc + 2^(N-1)): doubly exponential in r.
ExhaustionSchedule log_punctured_schedule(const RadialProblem& problem, std::size_t levels,
                                          double rc = 1.0);
/// Ball schedule for centered problems (log-punctured when d == p > 1),
/// half-line schedule otherwise.
ExhaustionSchedule default_schedule(const RadialProblem& problem, std::size_t levels);

/// Two-column CSV: coordinate, value (header names the coordinate).
void write_csv(std::ostream& os, const Field& field);
Field read_csv(std::istream& is, GridPtr grid);

}  // namespace radcrit
