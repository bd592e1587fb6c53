#include "radcrit/energy.hpp"

#include <algorithm>
#include <cmath>

#include "radcrit/errors.hpp"

namespace radcrit {

namespace {

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid_ptr() != b.grid_ptr() &&
      !std::equal(a.grid().coords().begin(), a.grid().coords().end(), b.grid().coords().begin(),
                  b.grid().coords().end()))
    throw ArgumentError("fields live on different grids");
}

void require_positive(const Field& v) {
  for (double x : v.values())
    if (!(x > 0.0)) throw ArgumentError("v must be strictly positive at every node");
}

struct EnergyParts {
  double gradient = 0.0;
  double potential = 0.0;
};

EnergyParts energy_parts(const Grid& g, std::span<const double> u,
                         std::span<const double> potential) {
  const double p = g.p();
  EnergyParts e;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const double du = u[i + 1] - u[i];
    if (du != 0.0) e.gradient += g.stiffness(i) * std::pow(std::abs(du), p);
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (potential[j] != 0.0 && u[j] != 0.0)
      e.potential += g.mass(j) * potential[j] * std::pow(std::abs(u[j]), p);
  }
  return e;
}

}  // namespace

std::vector<double> sample_potential(const Grid& grid, const PotentialSpec& v) {
  std::vector<double> out(grid.size(), 0.0);
  if (v.is_zero()) return out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.radius(j);
    const double x = v(r);
    const bool boundary = (j == 0 && !grid.has_origin()) || j + 1 == grid.size();
    if (!std::isfinite(x)) {
      if (boundary) continue;
      throw EvaluationError("potential is not finite at r = " + std::to_string(r));
    }
    out[j] = x;
  }
  return out;
}

double energy_sum(const Grid& grid, std::span<const double> u,
                  std::span<const double> potential) {
  const auto e = energy_parts(grid, u, potential);
  return e.gradient + e.potential;
}

EnergyBreakdown energy_Q(const Field& u, const RadialProblem& problem, bool free_boundary) {
  double scale = 0.0;
  for (double x : u.values()) scale = std::max(scale, std::abs(x));
  if (!free_boundary && !u.compactly_supported(1e-12 * scale))
    throw ArgumentError("energy_Q expects a field vanishing on the Dirichlet boundary");
  const Grid& g = u.grid();
  const auto pot = sample_potential(g, problem.potential);
  const auto e = energy_parts(g, u.values(), pot);
  return {e.gradient, e.potential, (e.gradient + e.potential) / g.p()};
}

LagrangianField picone_density(const Field& u, const Field& v) {
  require_same_grid(u, v);
  require_positive(v);
  const Grid& g = u.grid();
  const double p = g.p();
  LagrangianField out;
  out.cell_values.resize(g.cells());
  auto quotient = [&](std::size_t j) { return std::pow(std::abs(u[j]), p) / std::pow(v[j], p - 1.0); };
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const double du = u[i + 1] - u[i];
    const double dv = v[i + 1] - v[i];
    double l = std::pow(std::abs(du), p);
    if (dv != 0.0) l -= std::copysign(std::pow(std::abs(dv), p - 1.0), dv) * (quotient(i + 1) - quotient(i));
    out.cell_values[i] = g.stiffness(i) * l / p;
    out.total += out.cell_values[i];
  }
  return out;
}

double picone_gap(const Field& u, const Field& v, const RadialProblem& problem) {
  const double q = energy_Q(u, problem).total;
  return q - picone_density(u, v).total;
}

SimplifiedEnergy simplified_energy(const Field& v, const Field& w) {
  require_same_grid(v, w);
  require_positive(v);
  const Grid& g = v.grid();
  const double p = g.p();
  SimplifiedEnergy out;
  double split = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const double dw = std::abs(w[i + 1] - w[i]);
    if (dw == 0.0) continue;
    const double dv = std::abs(v[i + 1] - v[i]);
    const double vm = 0.5 * (v[i] + v[i + 1]);
    const double wm = 0.5 * (w[i] + w[i + 1]);
    const double k = g.stiffness(i);
    out.universal += k * vm * vm * dw * dw * std::pow(wm * dv + vm * dw, p - 2.0);
    if (p >= 2.0) {
      double second = 0.0;
      if (p == 2.0) {
        second = vm * vm * dw * dw;
      } else if (dv != 0.0 && wm != 0.0) {
        second = vm * vm * std::pow(dv, p - 2.0) * std::pow(wm, p - 2.0) * dw * dw;
      }
      split += k * (std::pow(vm, p) * std::pow(dw, p) + second);
    }
  }
  if (p >= 2.0) out.split = split;
  return out;
}

namespace {

// (1 + x)^q - 1 - q x without cancellation for small |x|.
double second_order_remainder(double x, double q) {
  if (std::abs(x) <= 0.5) {
    double term = q * (q - 1.0) / 2.0 * x * x, sum = 0.0;
    for (int k = 2; k < 200 && term != 0.0; ++k) {
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      term *= (q - k) / (k + 1.0) * x;
    }
    return sum;
  }
  return std::expm1(q * std::log1p(x)) - q * x;
}

}  // namespace

VectorRatio vector_inequality_ratio(std::span<const double> a, std::span<const double> b,
                                    double p) {
  if (a.size() != b.size()) throw ArgumentError("vectors of different length");
  if (!(p > 1.0)) throw ArgumentError("p must exceed 1");
  double na2 = 0.0, nb2 = 0.0, dot = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    na2 += a[k] * a[k];
    nb2 += b[k] * b[k];
    dot += a[k] * b[k];
  }
  if (na2 == 0.0 && nb2 == 0.0) throw ArgumentError("a and b both vanish");
  if (nb2 == 0.0) return {1.0, true};
  const double na = std::sqrt(na2), nb = std::sqrt(nb2);
  const double rhs = nb2 * std::pow(na + nb, p - 2.0);
  if (na2 == 0.0) return {std::pow(nb, p) / rhs, false};
  // With x = (2 a.b + |b|^2)/|a|^2 the numerator is
  // |a|^p [(1+x)^{p/2} - 1 - (p/2) x] + (p/2) |a|^{p-2} |b|^2.
  const double x = std::max(-1.0, (2.0 * dot + nb2) / na2);
  const double rem = p == 2.0 ? 0.0 : second_order_remainder(x, 0.5 * p);
  const double lhs = std::pow(na, p) * rem + 0.5 * p * std::pow(na, p - 2.0) * nb2;
  return {lhs / rhs, false};
}

double mass_integral(const Field& f, const Field& g) {
  require_same_grid(f, g);
  const Grid& grid = f.grid();
  double s = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = f[j] * g[j];
    if (x != 0.0) s += grid.mass(j) * x;
  }
  return s;
}

double window_lp(const Field& u, const Interval& window, double p) {
  const Grid& g = u.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const double a = std::max(window.lo, g.coord(i));
    const double b = std::min(window.hi, g.coord(i + 1));
    if (!(a < b)) continue;
    const double ua = std::abs(u.at_coord(a)), ub = std::abs(u.at_coord(b));
    s += g.measure_between(a, b) * 0.5 * (std::pow(ua, p) + std::pow(ub, p));
  }
  return s;
}

double poincare_residual(const Field& u, const Field& v_ground, const PotentialSpec& w,
                         const Field& psi, double c, const RadialProblem& problem) {
  if (!(c > 0.0)) throw ArgumentError("C must be positive");
  require_same_grid(u, psi);
  if (mass_integral(psi, v_ground) == 0.0) throw ArgumentError("psi is orthogonal to v");
  const Grid& g = u.grid();
  const double q = energy_Q(u, problem).total;
  const double pairing = mass_integral(psi, u);
  const auto wv = sample_potential(g, w);
  double wint = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (wv[j] != 0.0 && u[j] != 0.0) wint += g.mass(j) * wv[j] * std::pow(std::abs(u[j]), g.p());
  }
  return q + c * std::pow(std::abs(pairing), g.p()) - wint / c;
}

}  // namespace radcrit
