#pragma once

// Energy functional, Picone Lagrangian, simplified energy, the elementary
// vector inequality and the Poincare-type residual.
//
// Conventions: Q(u) = (1/p) * [ int |u'|^p r^(d-1) dr + int V |u|^p r^(d-1) dr ].
// Gradient terms are exact cellwise for piecewise-linear fields (constant
// slopes); potential terms use the lumped trapezoid mass of Grid.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "radcrit/domain.hpp"

namespace radcrit {

struct EnergyBreakdown {
  double gradient_term = 0.0;   // int |u'|^p
  double potential_term = 0.0;  // int V |u|^p
  double total = 0.0;           // (gradient_term + potential_term) / p
};

struct LagrangianField {
  /// Integral of L(u, v) over each cell.
  std::vector<double> cell_values;
  double total = 0.0;
};

/// V sampled at the nodes of `grid`. Non-finite values are an
/// EvaluationError at nodes that carry an unknown; at Dirichlet boundary
/// nodes they are replaced by 0 (the field vanishes there).
std::vector<double> sample_potential(const Grid& grid, const PotentialSpec& v);

/// Requires u to vanish on Dirichlet boundary nodes unless `free_boundary`.
EnergyBreakdown energy_Q(const Field& u, const RadialProblem& problem, bool free_boundary = false);

/// p * Q from precomputed potential samples; the workhorse behind energy_Q.
double energy_sum(const Grid& grid, std::span<const double> u, std::span<const double> potential);

/// Cellwise Picone Lagrangian
///   (1/p) k_i [ |u_{i+1}-u_i|^p - phi_p(v_{i+1}-v_i) (|u|^p/v^{p-1} |_{i}^{i+1}) ],
/// the nodal form of (1/p)[|u'|^p + (p-1)(u/v)^p |v'|^p - p (u/v)^{p-1} u' |v'|^{p-2} v'].
/// Nonnegative on every cell; sums to Q(u) - (1/p) Q'(v)[|u|^p/v^{p-1}].
LagrangianField picone_density(const Field& u, const Field& v);

/// Q(u) - int L(u, v).
double picone_gap(const Field& u, const Field& v, const RadialProblem& problem);

struct SimplifiedEnergy {
  /// int v^2 |w'|^2 (w|v'| + v|w'|)^{p-2}
  double universal = 0.0;
  /// int (v^p |w'|^p + v^2 |v'|^{p-2} w^{p-2} |w'|^2); only for p >= 2.
  std::optional<double> split;
};

SimplifiedEnergy simplified_energy(const Field& v, const Field& w);

struct VectorRatio {
  double value = 1.0;
  /// b == 0: both sides vanish and `value` is 1 by convention.
  bool degenerate = false;
};

/// (|a+b|^p - |a|^p - p|a|^{p-2} a.b) / (|b|^2 (|a|+|b|)^{p-2}).
VectorRatio vector_inequality_ratio(std::span<const double> a, std::span<const double> b,
                                    double p);

/// Q(u) + C |int psi u|^p - C^{-1} int W |u|^p. `v_ground` is only used to
/// reject psi with int psi v = 0.
double poincare_residual(const Field& u, const Field& v_ground, const PotentialSpec& w,
                         const Field& psi, double c, const RadialProblem& problem);

/// int f g r^(d-1) dr with the lumped mass.
double mass_integral(const Field& f, const Field& g);
/// int |u|^p r^(d-1) dr restricted to the nodes inside [window.lo, window.hi]
/// (coordinates), with trapezoid weights clipped to the window.
double window_lp(const Field& u, const Interval& window, double p);

}  // namespace radcrit
