#include <cmath>
#include <random>

#include "doctest.h"
#include "radcrit/energy.hpp"
#include "radcrit/errors.hpp"
#include "radcrit/solvers.hpp"
#include "radcrit/validate.hpp"

using namespace radcrit;

namespace {

RadialProblem problem(double p, double d, Interval dom, PotentialSpec v = PotentialSpec::zero()) {
  RadialProblem pr;
  pr.p = p;
  pr.d = d;
  pr.domain = dom;
  pr.potential = v;
  return pr;
}

GridPtr uniform(const RadialProblem& pr, Interval iv, std::size_t n) {
  return std::make_shared<const Grid>(build_grid(pr, iv, n, {SpacingLaw::uniform, 0.0}));
}

Field hat(const GridPtr& g) {
  return Field::from_radius(g, [](double r) { return 1.0 - std::abs(2.0 * r - 1.0); });
}

}  // namespace

TEST_CASE("hat function energy, p = 2, d = 1") {
  const auto pr = problem(2, 1, {0, 1});
  auto g = uniform(pr, pr.domain, 101);
  const auto e = energy_Q(hat(g), pr);
  CHECK(e.total == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(e.total == doctest::Approx((e.gradient_term + e.potential_term) / 2.0).epsilon(1e-14));
}

TEST_CASE("constant potential adds (c/2) int u^2") {
  const double c = 3.7;
  const auto pr0 = problem(2, 1, {0, 1});
  const auto prc = problem(2, 1, {0, 1}, PotentialSpec::constant(c));
  auto g = uniform(pr0, pr0.domain, 101);
  const Field u = hat(g);
  const double diff = energy_Q(u, prc).total - energy_Q(u, pr0).total;
  CHECK(diff == doctest::Approx(0.5 * c * mass_integral(u, u)).epsilon(1e-13));
}

TEST_CASE("p = 3, d = 2 hat energy against closed-form cell integrals") {
  // |u'| = 2 on both halves: (1/3) * 8 * int_0^1 r dr = 4/3.
  const auto pr = problem(3, 2, {0, 1});
  auto g = uniform(pr, pr.domain, 201);
  CHECK(energy_Q(hat(g), pr).total == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("energy_Q rejects fields that do not vanish at the boundary") {
  const auto pr = problem(2, 1, {0, 1});
  auto g = uniform(pr, pr.domain, 11);
  CHECK_THROWS_AS(energy_Q(Field::constant(g, 1.0), pr), ArgumentError);
  CHECK(energy_Q(Field::constant(g, 1.0), pr, true).total == 0.0);
}

TEST_CASE("non-finite potential is an evaluation error") {
  auto pr = problem(2, 1, {0, 1}, PotentialSpec::power(1.0, -1.0));
  pr.center = true;
  auto g = uniform(pr, {0.0, 1.0}, 11);
  std::vector<double> v(g->size(), 0.0);
  v[0] = 1.0;
  v[5] = 1.0;
  CHECK_THROWS_AS(energy_Q(Field(g, v), pr, true), EvaluationError);
}

TEST_CASE("property: energy scales with t^p") {
  Rng rng(11);
  std::uniform_real_distribution<double> P(1.1, 5.0), T(0.01, 50.0);
  for (int k = 0; k < 100; ++k) {
    const auto pr = problem(P(rng), 1 + k % 4, {0.5, 3.0}, PotentialSpec::constant(0.3));
    auto g = uniform(pr, pr.domain, 200);
    const Field u = random_compact_field(g, rng);
    const double t = T(rng);
    const double a = energy_Q(u.scaled(t), pr).total, b = std::pow(t, pr.p) * energy_Q(u, pr).total;
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
  }
}

TEST_CASE("Picone density vanishes on multiples of v") {
  Rng rng(3);
  const auto pr = problem(2.7, 2, {0.5, 3.0});
  auto g = uniform(pr, pr.domain, 300);
  Field v = random_compact_field(g, rng);
  for (double& x : v.mutable_values()) x += 0.2;
  for (double c : {0.0, 0.5, 3.0}) {
    const auto lag = picone_density(v.scaled(c), v);
    for (double x : lag.cell_values) CHECK(std::abs(x) <= 1e-12 * (1.0 + c * c * c));
  }
}

TEST_CASE("Picone density at p = 2 is (1/2) v0 v1 |jump of u/v|^2 cellwise") {
  Rng rng(5);
  const auto pr = problem(2, 3, {0.5, 3.0});
  auto g = uniform(pr, pr.domain, 300);
  for (int trial = 0; trial < 20; ++trial) {
    const Field u = random_compact_field(g, rng);
    Field v = random_compact_field(g, rng);
    for (double& x : v.mutable_values()) x += 0.1;
    const auto lag = picone_density(u, v);
    for (std::size_t i = 0; i < g->cells(); ++i) {
      const double v0 = v[i], v1 = v[i + 1];
      const double jump = u[i + 1] / v1 - u[i] / v0;
      const double ref = 0.5 * g->stiffness(i) * v0 * v1 * jump * jump;
      const double mag = g->stiffness(i) * (std::pow(u[i + 1] - u[i], 2) + std::pow(v1 - v0, 2));
      CHECK(std::abs(lag.cell_values[i] - ref) <= 1e-13 * (1.0 + mag));
    }
  }
}

TEST_CASE("property: Picone density is nonnegative for u >= 0, v > 0") {
  Rng rng(17);
  std::uniform_real_distribution<double> P(1.05, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pr = problem(trial == 0 ? 2.7 : P(rng), 1 + trial % 3, {0.5, 3.0});
    auto g = uniform(pr, pr.domain, 250);
    const Field u = random_compact_field(g, rng);
    Field v = random_compact_field(g, rng);
    for (double& x : v.mutable_values()) x += 0.01;
    const auto lag = picone_density(u, v);
    for (std::size_t i = 0; i < g->cells(); ++i) {
      const double mag = g->stiffness(i) * (std::pow(std::abs(u[i + 1] - u[i]), pr.p) +
                                            std::pow(std::abs(v[i + 1] - v[i]), pr.p));
      CHECK(lag.cell_values[i] >= -1e-12 * (mag + 1e-300));
    }
  }
}

TEST_CASE("Picone density rejects nonpositive v") {
  const auto pr = problem(2, 1, {0, 1});
  auto g = uniform(pr, pr.domain, 11);
  CHECK_THROWS_AS(picone_density(hat(g), hat(g)), ArgumentError);
}

TEST_CASE("Picone gap with constant v is zero") {
  Rng rng(2);
  const auto pr = problem(1.7, 2, {0.5, 3.0});
  auto g = uniform(pr, pr.domain, 400);
  const Field u = random_compact_field(g, rng);
  CHECK(std::abs(picone_gap(u, Field::constant(g, 2.0), pr)) <= 1e-14 * energy_Q(u, pr).total);
}

TEST_CASE("Picone gap vanishes for discrete solutions at every resolution") {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto pr = problem(p, 2, {1.0, 2.0});
    for (std::size_t n : {50, 500, 4000}) {
      auto g = uniform(pr, pr.domain, n);
      SolverOptions opt;
      opt.tol = 1e-13;
      const Field v = solve_dirichlet(pr, {1.0, 0.3}, Field::constant(g, 0.0), opt).solution;
      const Field u = Field::from_radius(g, [](double r) { return std::pow(std::sin(M_PI * (r - 1.0)), 2); });
      CHECK(std::abs(picone_gap(u, v, pr)) <= 1e-9 * (1.0 + energy_Q(u, pr).total));
    }
  }
}

TEST_CASE("Picone gap is one-sided for strict subsolutions") {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto pr = problem(p, 1, {1.0, 2.0});
    auto g = uniform(pr, pr.domain, 2000);
    const Field v = solve_dirichlet(pr, {2.0, 2.0}, Field::constant(g, -1.0)).solution;
    REQUIRE(classify_sign(v, pr, 1e-8) == SignClass::subsolution);
    Rng rng(9);
    for (int k = 0; k < 10; ++k) CHECK(picone_gap(random_compact_field(g, rng), v, pr) <= 1e-8);
  }
}

TEST_CASE("simplified energy equals 2 Q(vw) at p = 2 for solutions") {
  const auto pr = problem(2, 3, {1.0, 2.0});
  auto ratio = [&](std::size_t n) {
    auto g = uniform(pr, pr.domain, n);
    const Field v = Field::from_radius(g, [](double r) { return 2.0 / r - 0.5; });
    const Field w = Field::from_radius(g, [](double r) { return std::pow(std::sin(M_PI * (r - 1.0)), 2); });
    std::vector<double> vw(g->size());
    for (std::size_t j = 0; j < vw.size(); ++j) vw[j] = v[j] * w[j];
    const auto s = simplified_energy(v, w);
    REQUIRE(s.split);
    CHECK(*s.split == doctest::Approx(2.0 * s.universal).epsilon(1e-12));
    return 2.0 * energy_Q(Field(g, vw), pr).total / s.universal;
  };
  const double r1 = ratio(1001), r2 = ratio(2001), r3 = ratio(4001);
  CHECK(std::abs(r3 - 1.0) < 1e-6);
  CHECK(std::abs(r3 - 1.0) < 0.3 * std::abs(r2 - 1.0));
  // Second-order error: the extrapolated ratio is 1 to high accuracy.
  const double ext = (4.0 * r3 - r2) / 3.0;
  CHECK(std::abs(ext - 1.0) < 1e-10);
  (void)r1;
}

TEST_CASE("simplified energy ignores cells where w is flat") {
  const auto pr = problem(3, 1, {0.0, 1.0});
  auto g = uniform(pr, pr.domain, 11);
  std::vector<double> w(g->size(), 1.0);
  w.front() = w.back() = 0.0;
  const Field v = Field::from_radius(g, [](double r) { return 1.0 + r; });
  const auto s = simplified_energy(v, Field(g, w));
  // Only the two end cells contribute.
  double ref = 0.0;
  for (std::size_t i : {std::size_t{0}, g->cells() - 1}) {
    const double vm = 0.5 * (v[i] + v[i + 1]), wm = 0.5 * (w[i] + w[i + 1]);
    const double dv = std::abs(v[i + 1] - v[i]), dw = std::abs(w[i + 1] - w[i]);
    ref += g->stiffness(i) * vm * vm * dw * dw * (wm * dv + vm * dw);
  }
  CHECK(s.universal == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("vector inequality ratio") {
  const double a[] = {1.0, -2.0, 0.5}, b[] = {0.3, 0.1, -4.0}, z[] = {0.0, 0.0, 0.0};
  CHECK(vector_inequality_ratio(a, b, 2.0).value == 1.0);
  const auto deg = vector_inequality_ratio(a, z, 3.0);
  CHECK(deg.value == 1.0);
  CHECK(deg.degenerate);
  CHECK_THROWS_AS(vector_inequality_ratio(z, z, 3.0), ArgumentError);
  // a = -b: numerator (p-1)|a|^p over |a|^2 (2|a|)^{p-2}.
  const double na = std::sqrt(1.0 + 4.0 + 0.25);
  const double minus_a[] = {-1.0, 2.0, -0.5};
  CHECK(vector_inequality_ratio(a, minus_a, 3.0).value ==
        doctest::Approx(2.0 * std::pow(na, 3) / (na * na * 2.0 * na)).epsilon(1e-14));
}

TEST_CASE("property: vector inequality ratio is exactly 1 at p = 2 and bounded otherwise") {
  Rng rng(23);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> L(-6.0, 6.0);
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    double lo = INFINITY, hi = 0.0;
    for (int k = 0; k < 20000; ++k) {
      double a[3], b[3];
      const double sa = std::exp(L(rng)), sb = std::exp(L(rng));
      for (int i = 0; i < 3; ++i) a[i] = sa * N(rng), b[i] = sb * N(rng);
      const double r = vector_inequality_ratio(a, b, p).value;
      REQUIRE(std::isfinite(r));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      if (p == 2.0) REQUIRE(std::abs(r - 1.0) <= 1e-12);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 10.0);
  }
}

TEST_CASE("Poincare residual") {
  const auto pr = problem(2, 1, {0.0, 2.0});
  auto g = uniform(pr, pr.domain, 401);
  const Field v = Field::constant(g, 1.0);
  const auto W = PotentialSpec::constant(1.0);
  // psi odd about r = 1 and u even: int psi u = 0.
  const Field psi = Field::from_radius(g, [](double r) { return r - 1.0; });
  const Field u = Field::from_radius(g, [](double r) { return std::sin(M_PI * r / 2.0); });
  const double c = 2.0;
  const double expect = energy_Q(u, pr).total - mass_integral(u, u) / c;
  CHECK(poincare_residual(u, Field::constant(g, 1.0), W, Field::constant(g, 1.0), c, pr) >
        poincare_residual(u, v, W, psi, c, pr));
  CHECK(poincare_residual(u, v, W, psi, c, pr) == doctest::Approx(expect).epsilon(1e-10));
  CHECK_THROWS_AS(poincare_residual(u, v, W, psi.scaled(0.0), c, pr), ArgumentError);
}
