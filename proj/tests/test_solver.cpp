#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "twoboard/dpp_solver.hpp"
#include "twoboard/n_system.hpp"

using namespace twoboard;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double sup_diff(const ValuePair& a, const ValuePair& b) { return std::max(sup_diff(a.u, b.u), sup_diff(a.v, b.v)); }

ValuePair random_pair(const Lattice& lat, std::mt19937_64& gen, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  ValuePair p = constant_values(lat, 0.0, 0.0);
  for (NodeIndex n : lat.interior_nodes()) {
    p.u[n] = d(gen);
    p.v[n] = d(gen);
  }
  return p;
}

PayoffData wavy(int dim) {
  std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
  c[0] = 1.0;
  std::vector<double> center(static_cast<std::size_t>(dim), 0.2);
  return {ScalarFunction::linear(c, 0.1), ScalarFunction::norm(center, -0.5, 0.3), 1.0};
}

}  // namespace

TEST_CASE("dpp_update matches a brute-force sweep over the stencil lists") {
  std::mt19937_64 gen(11);
  struct Case {
    Domain domain;
    double h, eps, a, b, alpha1, alpha2;
  };
  const std::vector<Case> cases{
      {Domain::interval(0.0, 1.0), 0.0125, 0.1, 1.0, 1.0, 1.0, 0.0},
      {Domain::interval(-1.0, 2.0), 0.01, 0.08, 3.0, 0.5, 0.3, 0.8},
      {Domain::ball({0.0, 0.0}, 1.0), 0.025, 0.1, 1.0, 1.0, 1.0, 0.0},
      {Domain::annulus({0.0, 0.0}, 0.3, 1.0), 0.04, 0.2, 2.0, 1.0, 0.6, 0.2},
      {Domain::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), 0.1, 0.4, 1.0, 1.0, 1.0, 0.0},
  };
  for (const auto& c : cases) {
    const Lattice lat = build_lattice(c.domain, wavy(c.domain.dim()), c.h, c.eps);
    DppParams p;
    p.jump_coeff_1 = ScalarFunction::constant(c.a);
    p.jump_coeff_2 = ScalarFunction::constant(c.b);
    p.mix_alpha_1 = c.alpha1;
    p.mix_alpha_2 = c.alpha2;
    const ValuePair x = random_pair(lat, gen, -1.0, 1.0);
    const ValuePair y = dpp_update(x, lat, p);
    std::vector<double> bu, bv;
    oracle::sweep_brute(lat, x.u, x.v, c.a * c.eps * c.eps, c.b * c.eps * c.eps, c.alpha1, c.alpha2, bu, bv);
    CHECK(sup_diff(y.u, bu) < 1e-13);
    CHECK(sup_diff(y.v, bv) < 1e-13);
  }
}

TEST_CASE("spatially varying jump coefficients enter nodewise") {
  const Lattice lat = build_lattice(Domain::interval(0.0, 1.0), wavy(1), 0.025, 0.1);
  DppParams p;
  p.jump_coeff_1 = ScalarFunction::linear({2.0}, 1.0);  // a(x) = 1 + 2x
  std::mt19937_64 gen(3);
  const ValuePair x = random_pair(lat, gen, -1.0, 1.0);
  const ValuePair y = dpp_update(x, lat, p);
  for (NodeIndex n : lat.interior_nodes()) {
    const double w = (1.0 + 2.0 * lat.coord(n)[0]) * 0.01;
    double mx = -1e9, mn = 1e9;
    for (NodeIndex s : lat.stencil(n)) {
      mx = std::max(mx, x.u[s]);
      mn = std::min(mn, x.u[s]);
    }
    CHECK(y.u[n] == doctest::Approx(w * x.v[n] + (1 - w) * 0.5 * (mx + mn)).epsilon(1e-13));
  }
  p.jump_coeff_1 = ScalarFunction::constant(-1.0);
  CHECK_THROWS_AS(dpp_update(x, lat, p), std::invalid_argument);
  p.jump_coeff_1 = ScalarFunction::constant(101.0);
  CHECK_THROWS_AS(dpp_update(x, lat, p), std::invalid_argument);
}

TEST_CASE("exterior rows are pinned to the terminal data") {
  const Lattice lat = build_lattice(Domain::ball({0.0, 0.0}, 1.0), wavy(2), 0.05, 0.2);
  std::mt19937_64 gen(5);
  ValuePair x = random_pair(lat, gen, -1.0, 1.0);
  for (std::size_t n = 0; n < lat.size(); ++n) {
    if (!lat.is_interior(n)) x.u[n] = x.v[n] = 42.0;
  }
  const ValuePair y = dpp_update(x, lat, DppParams{});
  for (std::size_t n = 0; n < lat.size(); ++n) {
    if (lat.is_interior(n)) continue;
    CHECK(y.u[n] == lat.f_value(n));
    CHECK(y.v[n] == lat.g_value(n));
  }
}

TEST_CASE("constant data: one sweep from the constant is exact") {
  const double c = 0.37;
  const PayoffData pay{ScalarFunction::constant(c), ScalarFunction::constant(c), 0.0};
  const Lattice lat = build_lattice(Domain::ball({0.0, 0.0}, 1.0), pay, 0.025, 0.1);
  auto [sol, rep] = solve_fixed_point(lat, DppParams{}, Seed::from(constant_values(lat, c, c)));
  CHECK(rep.iterations == 1);
  CHECK(rep.converged);
  CHECK(rep.final_residual == 0.0);
  for (std::size_t n = 0; n < lat.size(); ++n) {
    CHECK(sol.u[n] == c);
    CHECK(sol.v[n] == c);
  }
  const BothSeeds both = solve_both_seeds(lat, DppParams{});
  CHECK(sup_diff(both.lower.u, std::vector<double>(lat.size(), c)) <= 1e-12);
  CHECK(sup_diff(both.upper.v, std::vector<double>(lat.size(), c)) <= 1e-12);
}

TEST_CASE("solve_fixed_point matches the Picard oracle on small 1D lattices") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> jump(0.5, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double s1 = coef(gen), o1 = coef(gen), s2 = coef(gen), o2 = coef(gen), c2 = coef(gen);
    const double a = jump(gen), b = jump(gen);
    const PayoffData pay{ScalarFunction::linear({s1}, o1), ScalarFunction::norm({c2}, s2, o2), 1.0};
    const double h = 0.1, eps = 0.4;
    const Lattice lat = build_lattice(Domain::interval(0.0, 1.0), pay, h, eps);
    REQUIRE(lat.size() <= 30);
    DppParams p;
    p.jump_coeff_1 = ScalarFunction::constant(a);
    p.jump_coeff_2 = ScalarFunction::constant(b);
    SolveOptions opt;
    opt.tol = 1e-13;
    auto [sol, rep] = solve_fixed_point(lat, p, Seed::lower(), opt);
    REQUIRE(rep.converged);

    const auto g = oracle::grid_1d(0.0, 1.0, h, eps);
    const auto w = oracle::picard_1d(
        g, {{1.0, {0.0, a}, [&](double x) { return s1 * x + o1; }}, {0.0, {b, 0.0}, [&](double x) {
                                                                       return s2 * std::abs(x - c2) + o2;
                                                                     }}},
        eps);
    REQUIRE(g.x.size() == lat.size());
    double d = 0.0;
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      const auto n = lat.nearest_node(Point{g.x[k]});
      REQUIRE(n.has_value());
      d = std::max({d, std::abs(sol.u[*n] - w[0][k]), std::abs(sol.v[*n] - w[1][k])});
    }
    CHECK(d <= 1e-10);
  }
}

TEST_CASE("iterates from the lower seed increase monotonically") {
  const Lattice lat = build_lattice(Domain::ball({0.0, 0.0}, 1.0), wavy(2), 0.05, 0.2);
  const double C = lat.payoff_bound();
  ValuePair x = constant_values(lat, -C, -C);
  for (int k = 0; k < 60; ++k) {
    const ValuePair y = dpp_update(x, lat, DppParams{});
    for (NodeIndex n : lat.interior_nodes()) {
      CHECK(y.u[n] >= x.u[n] - 1e-15);
      CHECK(y.v[n] >= x.v[n] - 1e-15);
    }
    x = y;
  }
}

TEST_CASE("comparison, range and nonexpansiveness properties") {
  const Lattice lat = build_lattice(Domain::ball({0.0, 0.0}, 1.0), wavy(2), 0.05, 0.2);
  const double C = lat.payoff_bound();
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> noise(0.0, 0.5);
  DppParams p;
  p.mix_alpha_1 = 0.9;
  p.mix_alpha_2 = 0.1;
  for (int t = 0; t < 20; ++t) {
    const ValuePair a = random_pair(lat, gen, -C, C);
    ValuePair b = a;
    for (NodeIndex n : lat.interior_nodes()) {
      b.u[n] += noise(gen);
      b.v[n] += noise(gen);
    }
    CHECK(comparison_check(a, b, lat, p));
    const ValuePair ta = dpp_update(a, lat, p);
    for (NodeIndex n : lat.interior_nodes()) {
      CHECK(std::abs(ta.u[n]) <= C + 1e-12);
      CHECK(std::abs(ta.v[n]) <= C + 1e-12);
    }
    const ValuePair c = random_pair(lat, gen, -C, C);
    const ValuePair tc = dpp_update(c, lat, p);
    CHECK(sup_diff(ta, tc) <= sup_diff(a, c) + 1e-12);
  }
  const ValuePair a = random_pair(lat, gen, -C, C);
  ValuePair b = a;
  b.u[lat.interior_nodes().front()] -= 1.0;
  CHECK_THROWS_AS(comparison_check(a, b, lat, p), std::invalid_argument);
}

TEST_CASE("comparison holds between a fixed point and its upward shift") {
  const Lattice lat = build_lattice(Domain::interval(0.0, 1.0), wavy(1), 0.0125, 0.1);
  auto [sol, rep] = solve_fixed_point(lat, DppParams{}, Seed::lower());
  ValuePair up = sol;
  for (NodeIndex n : lat.interior_nodes()) {
    up.u[n] += 1.0;
    up.v[n] += 1.0;
  }
  CHECK(comparison_check(sol, up, lat, DppParams{}));
  CHECK(residual(sol, lat, DppParams{}) == doctest::Approx(rep.final_residual).epsilon(1e-6));
}

TEST_CASE("pure operators: alpha = 0 on board 1 equals the mean board after swapping") {
  const PayoffData pay = wavy(2);
  const PayoffData swapped{pay.g_bar, pay.f_bar, 1.0};
  const Lattice lat = build_lattice(Domain::ball({0.0, 0.0}, 1.0), pay, 0.05, 0.2);
  const Lattice lat_s = build_lattice(Domain::ball({0.0, 0.0}, 1.0), swapped, 0.05, 0.2);
  std::mt19937_64 gen(8);
  const ValuePair x = random_pair(lat, gen, -1.0, 1.0);
  ValuePair xs{x.v, x.u, x.epsilon};
  for (std::size_t n = 0; n < lat.size(); ++n) {
    if (!lat.is_interior(n)) {
      xs.u[n] = lat_s.f_value(n);
      xs.v[n] = lat_s.g_value(n);
    }
  }
  DppParams mean_first;
  mean_first.mix_alpha_1 = 0.0;
  mean_first.mix_alpha_2 = 1.0;
  const ValuePair y = dpp_update(x, lat, mean_first);
  const ValuePair ys = dpp_update(xs, lat_s, DppParams{});
  CHECK(y.u == ys.v);
  CHECK(y.v == ys.u);
}

TEST_CASE("solver argument validation") {
  const Lattice lat = build_lattice(Domain::interval(0.0, 1.0), wavy(1), 0.025, 0.1);
  SolveOptions o;
  o.tol = 0.0;
  CHECK_THROWS_AS(solve_fixed_point(lat, DppParams{}, Seed::lower(), o), std::invalid_argument);
  o.tol = 1e-9;
  o.max_iter = 0;
  CHECK_THROWS_AS(solve_fixed_point(lat, DppParams{}, Seed::lower(), o), std::invalid_argument);
  o.max_iter = 3;
  auto [sol, rep] = solve_fixed_point(lat, DppParams{}, Seed::lower(), o);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 3);
  DppParams bad;
  bad.mix_alpha_1 = 1.5;
  CHECK_THROWS_AS(solve_fixed_point(lat, bad, Seed::lower()), std::invalid_argument);
}

TEST_CASE("n-system with two default components reproduces the base solver") {
  const PayoffData pay = wavy(2);
  const Lattice lat = build_lattice(Domain::ball({0.0, 0.0}, 1.0), pay, 0.05, 0.2);
  auto [base, rep] = solve_fixed_point(lat, DppParams{}, Seed::lower());
  const auto ns = solve_n_system(lat, {{BoardOperator::Infinity, 1.0, {0.0, 1.0}, pay.f_bar},
                                       {BoardOperator::Laplace, 0.0, {1.0, 0.0}, pay.g_bar}});
  CHECK(sup_diff(ns.fields[0], base.u) <= 1e-12);
  CHECK(sup_diff(ns.fields[1], base.v) <= 1e-12);
  CHECK(ns.report.iterations == rep.iterations);
}

TEST_CASE("n-system constants and validation") {
  const PayoffData pay{ScalarFunction::constant(0.4), ScalarFunction::constant(0.4), 0.0};
  const Lattice lat = build_lattice(Domain::interval(0.0, 1.0), pay, 0.025, 0.1);
  const auto c = ScalarFunction::constant(0.4);
  const auto ns = solve_n_system(lat, {{BoardOperator::Infinity, 1.0, {0, 1, 0}, c},
                                       {BoardOperator::Laplace, 0.0, {1, 0, 1}, c},
                                       {BoardOperator::Mix, 0.5, {0, 1, 0}, c}});
  for (const auto& f : ns.fields) CHECK(sup_diff(f, std::vector<double>(lat.size(), 0.4)) <= 1e-12);
  CHECK_THROWS_AS(solve_n_system(lat, {{BoardOperator::Infinity, 1.0, {0, -1}, c}, {BoardOperator::Laplace, 0, {1, 0}, c}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_n_system(lat, {{BoardOperator::Infinity, 1.0, {0, 200}, c}, {BoardOperator::Laplace, 0, {1, 0}, c}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_n_system(lat, {{BoardOperator::Infinity, 1.0, {1, 1}, c}, {BoardOperator::Laplace, 0, {1, 0}, c}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_n_system(lat, {{BoardOperator::Infinity, 1.0, {0}, c}, {BoardOperator::Laplace, 0, {1, 0}, c}}),
                  std::invalid_argument);
}

TEST_CASE("three-board chain matches the Picard oracle") {
  const double h = 0.1, eps = 0.4;
  const auto f1 = ScalarFunction::linear({1.0});
  const auto f2 = ScalarFunction::constant(0.0);
  const auto f3 = ScalarFunction::linear({-0.5}, 0.25);
  const Lattice lat = build_lattice(Domain::interval(0.0, 1.0), PayoffData{f1, f2, 1.0}, h, eps);
  SolveOptions o;
  o.tol = 1e-13;
  const auto ns = solve_n_system(lat,
                                 {{BoardOperator::Infinity, 1.0, {0, 1, 0}, f1},
                                  {BoardOperator::Laplace, 0.0, {1, 0, 1}, f2},
                                  {BoardOperator::Mix, 0.5, {0, 1, 0}, f3}},
                                 Seed::Kind::Upper, o);
  const auto g = oracle::grid_1d(0.0, 1.0, h, eps);
  const auto w = oracle::picard_1d(g,
                                   {{1.0, {0, 1, 0}, [](double x) { return x; }},
                                    {0.0, {1, 0, 1}, [](double) { return 0.0; }},
                                    {0.5, {0, 1, 0}, [](double x) { return -0.5 * x + 0.25; }}},
                                   eps);
  double d = 0.0;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    const auto n = lat.nearest_node(Point{g.x[k]});
    REQUIRE(n.has_value());
    for (int b = 0; b < 3; ++b) d = std::max(d, std::abs(ns.fields[b][*n] - w[b][k]));
  }
  CHECK(d <= 1e-10);
}
