#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "radcrit/criticality.hpp"
#include "radcrit/energy.hpp"
#include "radcrit/errors.hpp"
#include "radcrit/validate.hpp"

using namespace radcrit;

namespace {

// Whole space R^d in radial form (d = 1: even functions on the line).
RadialProblem whole_space(double p, double d) {
  RadialProblem pr;
  pr.p = p;
  pr.d = d;
  pr.domain = {0.0, kInf};
  pr.center = true;
  return pr;
}

}  // namespace

TEST_CASE("thresholds are positive and strictly decreasing on the line") {
  const auto pr = whole_space(2, 1);
  const auto s = ball_schedule(pr, 8, 1.0, 2.0);
  const auto seq = null_sequence(pr, s, default_probe(s));
  REQUIRE(seq.size() == 8);
  for (std::size_t n = 0; n < seq.size(); ++n) {
    CHECK(seq[n].t > 0.0);
    CHECK(seq[n].converged);
    if (n > 0) CHECK(seq[n].t < seq[n - 1].t);
  }
}

TEST_CASE("threshold decreases to a positive limit for d = 3, p = 2") {
  const auto pr = whole_space(2, 3);
  const auto s = ball_schedule(pr, 14);
  const auto rep = criticality_verdict(pr, s, default_probe(s));
  for (std::size_t n = 1; n < rep.thresholds.size(); ++n)
    CHECK(rep.thresholds[n].second <= rep.thresholds[n - 1].second + 1e-9);
  CHECK(rep.thresholds.back().second > 1.0);
  CHECK(rep.verdict == Verdict::subcritical);
}

TEST_CASE("threshold rejects functionals that are negative on the level") {
  RadialProblem pr = whole_space(2, 1);
  pr.potential = PotentialSpec::constant(-1.0);
  const auto s = ball_schedule(pr, 6);
  const auto grids = criticality_grids(pr, s, default_probe(s), 40);
  CHECK_THROWS_AS(threshold_tN(pr, grids.levels.back(), default_probe(s)), PreconditionError);
}

TEST_CASE("verdict classification rules") {
  CHECK(classify_thresholds({1.0, 1e-3, 1e-5}, 1e-4) == Verdict::critical);
  CHECK(classify_thresholds({1.0, 1e-5, 1e-5}, 1e-4) == Verdict::undetermined);
  CHECK(classify_thresholds({2.0, 1.001, 1.0005, 1.0}, 1e-4) == Verdict::subcritical);
  CHECK(classify_thresholds({2.0, 1.5, 1.0}, 1e-4) == Verdict::undetermined);
}

TEST_CASE("critical functionals: V = 0, d <= p") {
  for (auto [d, p, levels] : {std::tuple{1.0, 2.0, 18}, {2.0, 2.0, 18}, {3.0, 3.0, 12}}) {
    CAPTURE(d);
    CAPTURE(p);
    const auto pr = whole_space(p, d);
    const auto s = default_schedule(pr, levels);
    const auto rep = criticality_verdict(pr, s, default_probe(s));
    CHECK(rep.verdict == Verdict::critical);
    REQUIRE(rep.ground_state);
    CHECK(rep.window_deviation < 0.02);
    // Normalization at x0 and null-sequence energy identity.
    const Field& g0 = *rep.ground_state;
    CHECK(g0.at_coord(g0.grid().to_coord(s.x0)) == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& e : rep.sequence) CHECK(e.identity_error <= 1e-8);
    CHECK(rep.sequence.back().energy < rep.sequence.front().energy);
    // Solution up to O(t_N) on the window; positive away from the level boundary.
    const Field gs = ground_state(rep);
    CHECK(classify_sign(gs, pr, 1e-4, rep.window) == SignClass::solution);
    for (std::size_t j = gs.grid().first_interior(); j <= gs.grid().last_interior(); ++j)
      CHECK(gs[j] > 0.0);
  }
}

TEST_CASE("subcritical functionals: V = 0, d > p") {
  for (auto [d, p, levels] : {std::tuple{3.0, 2.0, 16}, {4.0, 3.0, 20}}) {
    const auto pr = whole_space(p, d);
    const auto s = default_schedule(pr, levels);
    const auto rep = criticality_verdict(pr, s, default_probe(s));
    CHECK(rep.verdict == Verdict::subcritical);
    CHECK(rep.t_star_estimate > 0.0);
    CHECK_THROWS_AS(ground_state(rep), StateError);
  }
}

TEST_CASE("verdict and ground state do not depend on the probe") {
  const auto pr = whole_space(2, 1);
  const auto s = ball_schedule(pr, 18);
  const auto w1 = default_probe(s);
  const auto w2 = PotentialSpec::bump(0.3, 0.2, 5.0);
  const auto r1 = criticality_verdict(pr, s, w1);
  const auto r2 = criticality_verdict(pr, s, w2);
  CHECK(r1.verdict == r2.verdict);
  CHECK(std::abs(r1.sequence.back().t / r2.sequence.back().t - 1.0) > 0.1);
  REQUIRE(r1.ground_state);
  REQUIRE(r2.ground_state);
  const auto& g1 = *r1.ground_state;
  double m = 0.0;
  for (std::size_t j = 0; j < g1.size(); ++j) {
    const double x = g1.grid().coord(j);
    if (!r1.window.contains(x)) continue;
    m = std::max(m, std::abs(g1[j] - r2.ground_state->at_coord(x)));
  }
  CHECK(m < 0.02);
}

TEST_CASE("positivity weight") {
  const auto pr = whole_space(2, 3);
  const auto s = ball_schedule(pr, 14);
  const auto probe = default_probe(s);
  const auto rep = criticality_verdict(pr, s, probe);
  const auto w = positivity_weight(pr, s, probe, rep);
  CHECK(w.margin >= -1e-8);
  REQUIRE(w.lambdas.size() == s.levels.size());
  for (std::size_t n = 1; n < w.lambdas.size(); ++n) CHECK(w.lambdas[n] <= w.lambdas[n - 1] + 1e-9);

  // Gap inequality on random compactly supported u.
  Rng rng(5);
  const auto grids = criticality_grids(pr, s, probe, 60);
  const GridPtr& g = grids.levels[4];
  const auto ws = sample_potential(*g, w.weight);
  for (int k = 0; k < 500; ++k) {
    const Field u = random_compact_field(g, rng, 0.01);
    double rhs = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j) rhs += g->mass(j) * ws[j] * u[j] * u[j];
    CHECK(energy_Q(u, pr).total >= rhs / 2.0 - 1e-8);
  }

  const auto crit = whole_space(2, 1);
  const auto sc = ball_schedule(crit, 12);
  const auto rc = criticality_verdict(crit, sc, default_probe(sc));
  CHECK_THROWS_AS(positivity_weight(crit, sc, default_probe(sc), rc), StateError);
}

TEST_CASE("capacity of the unit ball in d = 3 against the radial capacitor") {
  const auto pr = whole_space(2, 3);
  const CompactSetSpec k{{0.0, 1.0}};
  for (double R : {2.0, 8.0, 64.0}) {
    const auto rep = q_capacity(pr, k, Interval{0.0, R}, 2000);
    CHECK(rep.converged);
    CHECK(rep.value == doctest::Approx(oracle::ball_capacity(2, 3, 1.0, R)).epsilon(1e-3));
    CHECK(rep.min_multiplier >= -1e-8);
    for (double v : rep.minimizer.values()) CHECK(v >= -1e-12);
  }
}

TEST_CASE("capacity in d = 1 vanishes as the level grows") {
  const auto pr = whole_space(2, 1);
  const CompactSetSpec k{{0.0, 1.0}};
  double prev = kInf;
  for (double R : {2.0, 4.0, 16.0, 256.0}) {
    const double c = q_capacity(pr, k, Interval{0.0, R}, 800).value;
    CHECK(c == doctest::Approx(oracle::ball_capacity(2, 1, 1.0, R)).epsilon(1e-3));
    CHECK(c < prev);
    prev = c;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("capacity is monotone in the level and in K") {
  RadialProblem pr = whole_space(3, 2);
  const auto a = q_capacity(pr, {{0.0, 1.0}}, Interval{0.0, 4.0}, 600).value;
  const auto b = q_capacity(pr, {{0.0, 1.0}}, Interval{0.0, 8.0}, 600).value;
  const auto c = q_capacity(pr, {{0.0, 1.5}}, Interval{0.0, 8.0}, 600).value;
  CHECK(b <= a + 1e-9);
  CHECK(c >= b - 1e-9);
  CHECK(b == doctest::Approx(oracle::ball_capacity(3, 2, 1.0, 8.0)).epsilon(5e-3));
}

TEST_CASE("capacity with K touching the level boundary is rejected") {
  RadialProblem pr;
  pr.p = 2;
  pr.d = 1;
  pr.domain = {0.0, 10.0};
  CHECK_THROWS_AS(q_capacity(pr, {{1.0, 2.0}}, Interval{1.0, 5.0}, 100), ArgumentError);
}

TEST_CASE("obstacle constraint becomes inactive where u would exceed 1") {
  // A shallow negative well inside K lifts the minimizer above 1 there, so
  // the equality solution has negative multipliers and must be released.
  RadialProblem pr;
  pr.p = 2;
  pr.d = 1;
  pr.domain = {0.0, 10.0};
  pr.potential = PotentialSpec::bump(5.0, 0.4, -0.05);
  const auto rep = q_capacity(pr, {{4.0, 6.0}}, Interval{0.0, 10.0}, 400);
  CHECK(rep.converged);
  CHECK(rep.min_multiplier >= -1e-8);
  std::size_t k_nodes = 0;
  for (std::size_t j = 0; j < rep.minimizer.size(); ++j) {
    const double r = rep.minimizer.grid().radius(j);
    k_nodes += (r >= 4.0 - 1e-12 && r <= 6.0 + 1e-12) ? 1 : 0;
  }
  CHECK(rep.active_set.size() < k_nodes);
  for (std::size_t j = 0; j < rep.minimizer.size(); ++j) {
    const double r = rep.minimizer.grid().radius(j);
    if (r >= 4.0 && r <= 6.0) CHECK(rep.minimizer[j] >= 1.0 - 1e-9);
  }
}
