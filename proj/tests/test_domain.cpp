#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "radcrit/domain.hpp"
#include "radcrit/errors.hpp"

using namespace radcrit;

namespace {

RadialProblem problem(double p, double d, Interval dom) {
  RadialProblem pr;
  pr.p = p;
  pr.d = d;
  pr.domain = dom;
  return pr;
}

GridPtr share(Grid g) { return std::make_shared<const Grid>(std::move(g)); }

}  // namespace

TEST_CASE("uniform grid on three nodes") {
  const auto pr = problem(2, 1, {0.0, 2.0});
  const Grid g = build_grid(pr, {0.01, 1.0}, 3, {SpacingLaw::uniform, 0.0});
  REQUIRE(g.size() == 3);
  CHECK(g.coord(0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(g.coord(1) == doctest::Approx(0.505).epsilon(1e-15));
  CHECK(g.coord(2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("geometric grid has constant cell ratio") {
  const auto pr = problem(2, 1, {0.0, 2.0});
  const Grid g = build_grid(pr, {0.01, 1.0}, 201, {SpacingLaw::geometric, 0.0});
  REQUIRE(g.size() == 201);
  CHECK(g.coord(0) == 0.01);
  CHECK(g.coord(200) == 1.0);
  const double q = g.cell_length(1) / g.cell_length(0);
  CHECK(q > 1.0);
  for (std::size_t i = 1; i + 1 < g.cells(); ++i)
    CHECK(g.cell_length(i + 1) / g.cell_length(i) == doctest::Approx(q).epsilon(1e-9));
  // First cell resolves the inner end.
  CHECK(g.cell_length(0) <= 1e-3 * 0.99 + 1e-15);
}

TEST_CASE("weight is r^(d-1)") {
  const auto pr = problem(2, 3, {0.5, 4.0});
  const Grid g = build_grid(pr, {1.0, 2.0}, 101, {SpacingLaw::uniform, 0.0});
  for (std::size_t j = 0; j < g.size(); ++j)
    CHECK(g.weight(j) == doctest::Approx(g.radius(j) * g.radius(j)).epsilon(1e-14));
}

TEST_CASE("quadrature weights sum to the interval measure for d = 1") {
  const auto pr = problem(2, 1, {0.0, 10.0});
  for (auto law : {SpacingLaw::uniform, SpacingLaw::geometric}) {
    const Grid g = build_grid(pr, {0.3, 7.1}, 357, {law, 0.0});
    double cells = 0.0, nodes = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
      CHECK(g.cell_measure(i) > 0.0);
      cells += g.cell_measure(i);
    }
    for (std::size_t j = 0; j < g.size(); ++j) nodes += g.mass(j);
    CHECK(std::abs(cells - 6.8) <= 1e-12 * 6.8);
    CHECK(std::abs(nodes - 6.8) <= 1e-12 * 6.8);
  }
}

TEST_CASE("build_grid errors") {
  const auto pr = problem(2, 1, {0.0, 1.0});
  CHECK_THROWS_AS(build_grid(pr, {0.5, 2.0}, 10), DomainError);
  CHECK_THROWS_AS(build_grid(pr, {0.1, 0.9}, 2), ArgumentError);
}

TEST_CASE("problem invariants") {
  CHECK_THROWS(problem(1.0, 1, {0, 1}).validate());
  CHECK_THROWS(problem(2, 0.5, {0, 1}).validate());
  CHECK_THROWS(problem(2, 1, {1, 1}).validate());
  CHECK_NOTHROW(problem(2, 3, {0, kInf}).validate());
}

TEST_CASE("potential specs evaluate") {
  CHECK(PotentialSpec::zero()(3.0) == 0.0);
  CHECK(PotentialSpec::constant(2.5)(7.0) == 2.5);
  CHECK(PotentialSpec::power(-0.25, -2.0)(2.0) == doctest::Approx(-0.0625));
  const auto b = PotentialSpec::bump(1.0, 0.5, 3.0);
  CHECK(b(1.0) == doctest::Approx(3.0));
  CHECK(b(1.6) == 0.0);
  REQUIRE(b.support());
  CHECK(b.support()->lo == doctest::Approx(0.5));
  const auto t = PotentialSpec::tabulated({{0.0, 1.0}, {2.0, 3.0}});
  CHECK(t(1.0) == doctest::Approx(2.0));
  CHECK(t(5.0) == doctest::Approx(3.0));
  const auto sum = PotentialSpec::constant(1.0).plus(PotentialSpec::power(2.0, 1.0), -1.0);
  CHECK(sum(3.0) == doctest::Approx(-5.0));
  CHECK(sum.scaled(2.0)(3.0) == doctest::Approx(-10.0));
}

TEST_CASE("embed zero-extends a constant field") {
  const auto pr = problem(2, 1, {0.0, 4.0});
  auto src = share(build_grid(pr, {1.0, 2.0}, 11, {SpacingLaw::uniform, 0.0}));
  auto dst = share(build_grid(pr, {0.5, 3.0}, 26, {SpacingLaw::uniform, 0.0}));
  const Field one = Field::constant(src, 1.0);
  const Field e = embed(one, dst);
  for (std::size_t j = 0; j < dst->size(); ++j) {
    const double r = dst->coord(j);
    if (r >= 1.0 - 1e-12 && r <= 2.0 + 1e-12) CHECK(e[j] == doctest::Approx(1.0));
    else if (r < 0.9 - 1e-12 || r > 2.1 + 1e-12) CHECK(e[j] == 0.0);
  }
  // Transition cell (0.9, 1.0): linear, value at 0.95 is one half.
  CHECK(e.at_coord(0.95) == doctest::Approx(0.5));
}

TEST_CASE("embedded field agrees with the source at source nodes") {
  const auto pr = problem(2, 1, {0.0, 4.0});
  auto src = share(build_grid(pr, {1.0, 2.0}, 37, {SpacingLaw::geometric, 0.0}));
  std::vector<double> nodes(src->coords().begin(), src->coords().end());
  nodes.insert(nodes.begin(), 0.5);
  nodes.push_back(3.0);
  auto dst = share(Grid(nodes, Coordinate::radial, 2, 1, false));
  const Field u = Field::from_radius(src, [](double r) { return std::sin(3 * r); });
  const Field e = embed(u, dst);
  for (std::size_t j = 0; j < src->size(); ++j)
    CHECK(e.at_coord(src->coord(j)) == doctest::Approx(u[j]).epsilon(1e-14));
}

TEST_CASE("embed into a smaller grid is rejected") {
  const auto pr = problem(2, 1, {0.0, 4.0});
  auto big = share(build_grid(pr, {0.5, 3.0}, 11));
  auto small = share(build_grid(pr, {1.0, 2.0}, 11));
  CHECK_THROWS_AS(embed(Field::constant(big, 1.0), small), ArgumentError);
}

TEST_CASE("property: embed preserves sign, order and compact support") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto pr = problem(2, 2, {0.0, 10.0});
  for (int trial = 0; trial < 50; ++trial) {
    auto src = share(build_grid(pr, {1.0 + 0.2 * U(rng), 3.0 + 0.2 * U(rng)}, 40));
    auto dst = share(build_grid(pr, {0.5, 5.0}, 97, {SpacingLaw::uniform, 0.0}));
    std::vector<double> a(src->size()), b(src->size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      a[j] = std::abs(U(rng));
      b[j] = a[j] + std::abs(U(rng));
    }
    a.front() = a.back() = 0.0;
    const Field ea = embed(Field(src, a), dst), eb = embed(Field(src, b), dst);
    for (std::size_t j = 0; j < dst->size(); ++j) {
      CHECK(ea[j] >= 0.0);
      CHECK(ea[j] <= eb[j]);
    }
    CHECK(ea.compactly_supported());
  }
}

TEST_CASE("schedules are nested and contain the reference point") {
  const auto pr = problem(2, 3, {0.0, kInf});
  for (const auto& s : {ball_schedule(pr, 8), punctured_schedule(pr, 8), half_line_schedule(pr, 8),
                        log_punctured_schedule(pr, 8)}) {
    CHECK_NOTHROW(s.validate(pr));
    for (std::size_t n = 0; n + 1 < s.levels.size(); ++n) {
      CHECK(s.levels[n + 1].lo <= s.levels[n].lo);
      CHECK(s.levels[n + 1].hi > s.levels[n].hi);
    }
  }
  const auto b = ball_schedule(pr, 4, 2.0, 3.0);
  CHECK(b.levels[3].hi == doctest::Approx(54.0));
}

TEST_CASE("default schedules") {
  auto pr = problem(2, 2, {0.0, kInf});
  pr.center = true;
  CHECK(default_schedule(pr, 4).coordinate == Coordinate::logarithmic);
  pr.d = 3;
  CHECK(default_schedule(pr, 4).coordinate == Coordinate::radial);
  CHECK(default_schedule(pr, 4).levels[0].lo == 0.0);
  CHECK(default_center({0.0, kInf}, 1.0) == false);
  CHECK(default_center({0.0, kInf}, 3.0) == true);
}

TEST_CASE("nested grids share nodes across levels") {
  auto pr = problem(2, 3, {0.0, kInf});
  pr.center = true;
  const auto s = ball_schedule(pr, 6);
  const auto ng = build_nested_grids(pr, s, 20, {0.5});
  REQUIRE(ng.levels.size() == 6);
  for (std::size_t n = 0; n < 6; ++n) {
    const auto [a, b] = ng.ranges[n];
    CHECK(ng.global->coord(b) == doctest::Approx(s.levels[n].hi));
    CHECK(ng.levels[n]->size() == b - a + 1);
    for (std::size_t j = a; j <= b; ++j) CHECK(ng.levels[n]->coord(j - a) == ng.global->coord(j));
  }
  CHECK(ng.levels[0]->has_origin());
}

TEST_CASE("log grids stay finite on huge levels") {
  auto pr = problem(2, 2, {0.0, kInf});
  pr.center = true;
  const Grid g = build_log_grid(pr, {-300.0, 300.0}, 601);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    CHECK(std::isfinite(g.stiffness(i)));
    CHECK(g.cell_measure(i) >= 0.0);
  }
}

TEST_CASE("compact set validation") {
  auto pr = problem(2, 3, {0.0, kInf});
  pr.center = true;
  CHECK_NOTHROW(CompactSetSpec{{0.0, 1.0}}.validate(pr));
  CHECK(CompactSetSpec{{0.0, 1.0}}.is_center_ball(pr));
  auto pr1 = problem(2, 1, {0.0, 5.0});
  CHECK_THROWS(CompactSetSpec{{0.0, 1.0}}.validate(pr1));
  CHECK_NOTHROW(CompactSetSpec{{1.0, 1.0}}.validate(pr1));
}

TEST_CASE("CSV round trip") {
  const auto pr = problem(2, 1, {0.0, 1.0});
  auto g = share(build_grid(pr, pr.domain, 33, {SpacingLaw::uniform, 0.0}));
  const Field u = Field::from_radius(g, [](double r) { return std::exp(r) / 3.0; });
  std::stringstream ss;
  write_csv(ss, u);
  CHECK(ss.str().rfind("r,value\n", 0) == 0);
  const Field back = read_csv(ss, g);
  for (std::size_t j = 0; j < g->size(); ++j) CHECK(back[j] == u[j]);
}
