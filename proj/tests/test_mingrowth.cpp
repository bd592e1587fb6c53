#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "radcrit/errors.hpp"
#include "radcrit/mingrowth.hpp"
#include "radcrit/validate.hpp"

using namespace radcrit;

namespace {

RadialProblem whole_space(double p, double d) {
  RadialProblem pr;
  pr.p = p;
  pr.d = d;
  pr.domain = {0.0, kInf};
  pr.center = true;
  return pr;
}

RadialProblem punctured(double p, double d, double hi = kInf) {
  RadialProblem pr;
  pr.p = p;
  pr.d = d;
  pr.domain = {0.0, hi};
  pr.center = false;
  return pr;
}

double window_error(const Field& u, Interval w, const std::function<double(double)>& ref) {
  double m = 0.0;
  for (double r = w.lo; r <= w.hi + 1e-12; r += w.length() / 200)
    m = std::max(m, std::abs(value_at_radius(u, r) / ref(r) - 1.0));
  return m;
}

GridPtr sample_grid(const RadialProblem& pr, Interval iv, std::size_t n) {
  return std::make_shared<const Grid>(build_log_grid(pr, {std::log(iv.lo), std::log(iv.hi)}, n));
}

}  // namespace

TEST_CASE("u^K for the unit ball in d = 3 tends to 1/r") {
  const auto pr = whole_space(2, 3);
  const CompactSetSpec k{{0.0, 1.0}};
  const auto run = uK_limit(pr, k, ball_schedule(pr, 18));
  REQUIRE(run.limit);
  CHECK(run.cauchy_met);
  for (double m : run.monotonicity_log) CHECK(m <= 1e-8);
  CHECK(window_error(*run.limit, {1.5, 3.0}, [](double r) { return 1.0 / r; }) <= 0.01);

  const auto run3 = uK_limit(pr, k, ball_schedule(pr, 12, 2.0, 3.0));
  REQUIRE(run3.limit);
  CHECK(window_error(*run3.limit, {1.5, 3.0}, [&](double r) { return value_at_radius(*run.limit, r); }) <= 0.01);

  // Dominated by the supersolution r^{-1/2}, which agrees on the boundary of K.
  const Field& u = *run.limit;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = u.grid().radius(j);
    if (r >= 1.0) CHECK(u[j] <= std::pow(r, -0.5) + 1e-8);
  }
}

TEST_CASE("u^K with unequal traces on an annulus") {
  RadialProblem pr = whole_space(2, 3);
  const CompactSetSpec k{{1.0, 2.0}, 3.0, 0.5};
  const auto run = uK_limit(pr, k, ball_schedule(pr, 16, 4.0));
  REQUIRE(run.limit);
  for (double m : run.monotonicity_log) CHECK(m <= 1e-8);
  // Outside K the limit is 0.5 * 2 / r; inside the hole it is the constant 3.
  CHECK(window_error(*run.limit, {3.0, 6.0}, [](double r) { return 1.0 / r; }) <= 0.01);
  CHECK(value_at_radius(*run.limit, 0.5) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("u^K for nested compact sets agree outside the larger one") {
  const auto pr = whole_space(2, 3);
  const auto s = ball_schedule(pr, 16, 4.0);
  const auto small = uK_limit(pr, {{0.0, 1.0}}, s);
  REQUIRE(small.limit);
  // Trace of the larger problem read from the smaller limit.
  const double trace = value_at_radius(*small.limit, 1.5);
  const auto large = uK_limit(pr, {{0.0, 1.5}, trace, trace}, s);
  REQUIRE(large.limit);
  CHECK(window_error(*large.limit, {2.0, 6.0}, [&](double r) { return value_at_radius(*small.limit, r); }) <=
        0.01);
}

TEST_CASE("u^K rejects nonpositive traces") {
  const auto pr = whole_space(2, 3);
  CHECK_THROWS_AS(uK_limit(pr, {{0.0, 1.0}, 0.0, 0.0}, ball_schedule(pr, 4)), ArgumentError);
}

TEST_CASE("singularity exponent of exact profiles") {
  const auto pr = punctured(2, 3);
  auto g = sample_grid(pr, {1e-4, 1.0}, 2001);
  const Field inv = Field::from_radius(g, [](double r) { return 1.0 / r; });
  CHECK(singularity_exponent(inv, 0.0, {1e-3, 1e-1}).slope == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(singularity_exponent(Field::constant(g, 2.0), 0.0, {1e-3, 1e-1}).slope) <= 1e-8);
  const Field lg = Field::from_radius(g, [](double r) { return -std::log(r); });
  CHECK(singularity_exponent(lg, 0.0, {1e-3, 1e-1}, ExponentMode::logarithmic).slope ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(singularity_exponent(inv.scaled(-1.0), 0.0, {1e-3, 1e-1}), ArgumentError);
  CHECK(alpha_exponent(4, 3) == doctest::Approx(-0.5));
}

TEST_CASE("point singularity solutions reproduce alpha(d, p)") {
  for (auto [d, p] : {std::pair{3.0, 2.0}, {4.0, 3.0}, {5.0, 2.0}, {3.0, 2.5}}) {
    CAPTURE(d);
    CAPTURE(p);
    const auto pr = punctured(p, d);
    const auto run = point_singularity_solution(pr, 1.0, punctured_schedule(pr, 20));
    REQUIRE(run.limit);
    CHECK(value_at_radius(*run.limit, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto fit = singularity_exponent(*run.limit, 0.0, {1e-3, 1e-1});
    const double a = oracle::alpha(d, p);
    CHECK(std::abs(fit.slope - a) <= 0.05 * std::abs(a));
    for (const auto& l : run.levels) CHECK(l.converged);
  }
}

TEST_CASE("point singularity for p = d follows -log r") {
  const auto pr = punctured(2, 2, 1.0);
  const auto run = point_singularity_solution(pr, 0.5, punctured_schedule(pr, 24));
  REQUIRE(run.limit);
  const auto fit = singularity_exponent(*run.limit, 0.0, {1e-5, 1e-2}, ExponentMode::logarithmic);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("point singularity in the critical case d = 1 is the constant ground state") {
  const auto pr = punctured(2, 1);
  const auto run = point_singularity_solution(pr, 1.0, punctured_schedule(pr, 20));
  REQUIRE(run.limit);
  CHECK(window_error(*run.limit, {0.5, 2.0}, [](double) { return 1.0; }) <= 0.02);
}

TEST_CASE("removability") {
  const auto pr3 = punctured(2, 3);
  auto g = sample_grid(pr3, {1e-6, 10.0}, 3001);
  CHECK(removability_test(pr3, Field::from_radius(g, [](double r) { return 1.0 / r; }), 0.0).verdict ==
        Removability::nonremovable_blowup);

  RadialProblem pr1;
  pr1.p = 2;
  pr1.d = 1;
  pr1.domain = {0.0, kInf};
  auto g1 = std::make_shared<const Grid>(build_grid(pr1, {0.0, 5.0}, 501, {SpacingLaw::uniform, 0.0}));
  const Field kink = Field::from_radius(g1, [](double r) { return std::min(r, 1.0); });
  const auto rk = removability_test(pr1, kink, 1.0);
  CHECK(rk.verdict == Removability::nonremovable_flux);
  CHECK(rk.flux_residual == doctest::Approx(1.0).epsilon(1e-9));

  const auto pc = whole_space(2, 1);
  auto gc = std::make_shared<const Grid>(build_grid(pc, {0.0, 5.0}, 501, {SpacingLaw::uniform, 0.0}));
  CHECK(removability_test(pc, Field::constant(gc, 1.0), 0.0).verdict == Removability::removable);
}

TEST_CASE("minimal growth certificate separates 1/r from constants") {
  const auto pr = whole_space(2, 3);
  auto g = sample_grid(pr, {2.0, 1e6}, 20001);
  const Field inv = Field::from_radius(g, [](double r) { return 1.0 / r; });
  const auto s = ball_schedule(pr, 16);
  const auto c1 = minimal_growth_certificate(pr, inv, {{0.0, 2.0}}, {3.0, 4.0}, s);
  const auto c2 = minimal_growth_certificate(pr, Field::constant(g, 1.0), {{0.0, 2.0}}, {3.0, 4.0}, s);
  REQUIRE(c1.levels.size() >= 4);
  CHECK(c1.verdict == CertificateVerdict::decaying_to_zero);
  CHECK(c1.levels.back().mu <= 1e-3 * c1.levels.front().mu);
  CHECK(c2.verdict == CertificateVerdict::bounded_away);
  CHECK(c2.levels.back().mu >= 0.1 * c2.levels.front().mu);
  for (const auto& l : c1.levels) {
    CHECK(l.mu >= 0.0);
    CHECK(l.normalization == doctest::Approx(1.0).epsilon(1e-10));
  }
  // Zero-homogeneity in u.
  const auto c3 = minimal_growth_certificate(pr, inv.scaled(2.0), {{0.0, 2.0}}, {3.0, 4.0}, s);
  for (std::size_t n = 0; n < c1.levels.size(); ++n)
    CHECK(std::abs(c3.levels[n].mu - c1.levels[n].mu) <= 1e-10 * c1.levels[n].mu);
}

TEST_CASE("certificate for p != 2 needs a nonvanishing gradient") {
  const auto pr = whole_space(3, 4);
  auto g = sample_grid(pr, {2.0, 1e4}, 4001);
  const auto s = ball_schedule(pr, 8);
  CHECK_THROWS_AS(minimal_growth_certificate(pr, Field::constant(g, 1.0), {{0.0, 2.0}}, {3.0, 4.0}, s),
                  PreconditionError);
  const Field u = Field::from_radius(g, [](double r) { return std::pow(r, -0.5); });
  const auto run = minimal_growth_certificate(pr, u, {{0.0, 2.0}}, {3.0, 4.0}, s);
  REQUIRE(run.levels.size() >= 3);
  for (std::size_t n = 1; n < run.levels.size(); ++n) CHECK(run.levels[n].mu <= run.levels[n - 1].mu);
}

TEST_CASE("certificate trend rule") {
  CHECK(certificate_trend({1.0, 0.5, 0.25, 0.12}) == CertificateVerdict::decaying_to_zero);
  CHECK(certificate_trend({1.0, 0.5, 0.45, 0.44}) == CertificateVerdict::bounded_away);
  CHECK(certificate_trend({1.0, 0.5}) == CertificateVerdict::bounded_away);
}

TEST_CASE("comparison with a certified subsolution") {
  const auto pr = whole_space(2, 3);
  auto g = sample_grid(pr, {2.0, 1e6}, 20001);
  const Field inv = Field::from_radius(g, [](double r) { return 1.0 / r; });
  const auto cert = minimal_growth_certificate(pr, inv, {{0.0, 2.0}}, {3.0, 4.0}, ball_schedule(pr, 16));
  const Field super1 = inv.scaled(1.5);
  CHECK(comparison_check(pr, inv, super1, {{0.0, 2.0}}, cert).holds);
  CHECK(comparison_check(pr, inv, Field::constant(g, 1.0), {{0.0, 2.0}}, cert).holds);
  // Boundary order violated.
  CHECK_THROWS_AS(comparison_check(pr, inv, Field::constant(g, 0.1), {{0.0, 2.0}}, cert),
                  PreconditionError);
  // Certificate not decaying.
  const auto bad = minimal_growth_certificate(pr, Field::constant(g, 1.0), {{0.0, 2.0}}, {3.0, 4.0},
                                              ball_schedule(pr, 16));
  CHECK_THROWS_AS(comparison_check(pr, inv, super1, {{0.0, 2.0}}, bad), PreconditionError);
}

TEST_CASE("property: randomized sub/supersolution pairs compare") {
  const auto pr = whole_space(2, 3);
  auto g = sample_grid(pr, {2.0, 1e6}, 8001);
  const Field inv = Field::from_radius(g, [](double r) { return 1.0 / r; });
  const auto cert = minimal_growth_certificate(pr, inv, {{0.0, 2.0}}, {3.0, 4.0}, ball_schedule(pr, 16));
  Rng rng(43);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double a = 0.1 + 2.0 * U(rng);
    // Nonnegative combination of supersolutions, at least a/r at r = 2.
    const double b = U(rng), c = U(rng), s = 0.1 + 0.8 * U(rng), e = U(rng);
    const double lift = std::max(0.0, a / 2.0 - (b / 2.0 + c * std::pow(2.0, -s) + e));
    const Field sub = inv.scaled(a);
    const Field sup = Field::from_radius(g, [&](double r) {
      return (b + 2.0 * lift) / r + c * std::pow(r, -s) + e;
    });
    const auto res = comparison_check(pr, sub, sup, {{0.0, 2.0}}, cert);
    CHECK(res.holds);
    CHECK(res.max_violation <= 1e-8);
  }
}
