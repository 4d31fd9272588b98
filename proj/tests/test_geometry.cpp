#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "twoboard/domain.hpp"
#include "twoboard/lattice.hpp"
#include "twoboard/scalar_function.hpp"

using namespace twoboard;

namespace {

PayoffData linear_payoff(int dim) {
  std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
  c[0] = 1.0;
  return {ScalarFunction::linear(c), ScalarFunction::constant(0.0), 1.0};
}

}  // namespace

TEST_CASE("scalar functions evaluate their closed forms") {
  const Point x{0.3, -0.4};
  CHECK(ScalarFunction::constant(2.5)(x) == 2.5);
  CHECK(ScalarFunction::linear({2.0, 1.0}, 0.5)(x) == doctest::Approx(0.7));
  CHECK(ScalarFunction::norm({0.0, 0.0}, 2.0, 1.0)(x) == doctest::Approx(2.0));
  CHECK(ScalarFunction::product(3.0)(x) == doctest::Approx(-0.36));
  const auto s = ScalarFunction::sum({{2.0, ScalarFunction::product()}, {1.0, ScalarFunction::constant(1.0)}}, 0.25);
  CHECK(s(x) == doctest::Approx(2.0 * -0.12 + 1.0 + 0.25));
  CHECK_THROWS_AS(ScalarFunction::linear({1.0})(x), std::invalid_argument);
}

TEST_CASE("domain membership treats the boundary as exterior") {
  const auto I = Domain::interval(0.0, 1.0);
  CHECK(I.contains(Point{0.5}));
  CHECK_FALSE(I.contains(Point{0.0}));
  CHECK_FALSE(I.contains(Point{1.0}));
  CHECK_FALSE(I.contains(Point{1.2}));

  const auto B = Domain::ball({0.0, 0.0}, 1.0);
  CHECK(B.contains(Point{0.0, 0.0}));
  CHECK_FALSE(B.contains(Point{1.0, 0.0}));
  CHECK_FALSE(B.contains(Point{0.8, 0.8}));
  CHECK(B.signed_distance(Point{2.0, 0.0}) == doctest::Approx(1.0));

  const auto A = Domain::annulus({0.0, 0.0}, 0.5, 1.0);
  CHECK_FALSE(A.contains(Point{0.1, 0.0}));
  CHECK(A.contains(Point{0.75, 0.0}));

  const auto box = Domain::box({0.0, 0.0}, {1.0, 2.0});
  CHECK(box.signed_distance(Point{0.5, 1.0}) == doctest::Approx(-0.5));
  CHECK(box.signed_distance(Point{2.0, 3.0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(box.diameter() == doctest::Approx(std::sqrt(5.0)));

  CHECK_THROWS_AS(B.contains(Point{0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Domain::annulus({0.0}, 0.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Domain::interval(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("eval_payoff reads the board-specific data outside the domain") {
  const auto I = Domain::interval(0.0, 1.0);
  const PayoffData p{ScalarFunction::linear({1.0}), ScalarFunction::constant(-1.0), 1.0};
  CHECK(eval_payoff(I, p, Point{1.05}, 1) == doctest::Approx(1.05));
  CHECK(eval_payoff(I, p, Point{1.05}, 2) == -1.0);
  CHECK_THROWS_AS(eval_payoff(I, p, Point{0.5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(eval_payoff(I, p, Point{1.5}, 3), std::invalid_argument);
}

TEST_CASE("1D lattice: node classes, stencil size and collar") {
  const auto I = Domain::interval(0.0, 1.0);
  const Lattice lat = build_lattice(I, linear_payoff(1), 0.025, 0.1);
  CHECK(lat.radius_cells() == 4);
  CHECK(lat.stencil_offsets().size() == 9);
  // Interior: 0.025 .. 0.975 (39 nodes); collar: [-0.1, 0] and [1, 1.1] (5 + 5).
  CHECK(lat.interior_nodes().size() == 39);
  CHECK(lat.size() == 49);
  for (std::size_t n = 0; n < lat.size(); ++n) {
    const double x = lat.coord(n)[0];
    CHECK(lat.is_interior(n) == (x > 1e-12 && x < 1.0 - 1e-12));
    CHECK(lat.f_value(n) == doctest::Approx(x));
  }
  CHECK(lat.payoff_bound() == doctest::Approx(1.1));
}

TEST_CASE("stencils contain exactly the stored nodes within eps") {
  const auto B = Domain::ball({0.0, 0.0}, 1.0);
  const Lattice lat = build_lattice(B, linear_payoff(2), 0.05, 0.2);
  const double eps = lat.epsilon();
  for (NodeIndex n : lat.interior_nodes()) {
    const Point x = lat.coord(n);
    std::set<NodeIndex> expect;
    for (std::size_t m = 0; m < lat.size(); ++m) {
      if (distance(lat.coord(m), x) <= eps * (1.0 + 1e-9)) expect.insert(static_cast<NodeIndex>(m));
    }
    const auto st = lat.stencil(n);
    CHECK(std::set<NodeIndex>(st.begin(), st.end()) == expect);
    CHECK(st.size() == lat.stencil_offsets().size());
  }
  // Every collar node lies outside the domain within eps of it.
  for (std::size_t m = 0; m < lat.size(); ++m) {
    if (lat.is_interior(m)) continue;
    const double sd = B.signed_distance(lat.coord(m));
    CHECK(sd >= -1e-12);
    CHECK(sd <= eps * (1.0 + 1e-9));
  }
}

TEST_CASE("nodes_within and nearest_node agree with brute force") {
  const auto B = Domain::ball({0.0, 0.0}, 1.0);
  const Lattice lat = build_lattice(B, linear_payoff(2), 0.05, 0.2);
  const Point x{0.313, -0.271};
  const auto got = lat.nodes_within(x, 0.2);
  std::vector<NodeIndex> expect;
  for (std::size_t m = 0; m < lat.size(); ++m) {
    if (distance(lat.coord(m), x) <= 0.2) expect.push_back(static_cast<NodeIndex>(m));
  }
  CHECK(got == expect);
  const auto nn = lat.nearest_node(Point{0.3, -0.25});
  REQUIRE(nn.has_value());
  CHECK(distance(lat.coord(*nn), Point{0.3, -0.25}) < 1e-12);
  CHECK_FALSE(lat.nearest_node(Point{5.0, 5.0}).has_value());
}

TEST_CASE("row groups reproduce the stencil offsets") {
  const auto B = Domain::ball({0.0, 0.0, 0.0}, 1.0);
  const Lattice lat = build_lattice(B, linear_payoff(3), 0.1, 0.4);
  const auto& g = lat.grid();
  std::size_t count = 0;
  for (const auto& rg : g.row_groups) count += static_cast<std::size_t>(2 * rg.half_width + 1);
  CHECK(count == lat.stencil_offsets().size());
}

TEST_CASE("build_lattice validates h and eps") {
  const auto I = Domain::interval(0.0, 1.0);
  CHECK_THROWS_AS(build_lattice(I, linear_payoff(1), 0.03, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_lattice(I, linear_payoff(1), 0.25, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_lattice(I, linear_payoff(1), -0.01, 0.1), std::invalid_argument);
}

TEST_CASE("lattice CSV has one row per node") {
  const auto I = Domain::interval(0.0, 1.0);
  const Lattice lat = build_lattice(I, linear_payoff(1), 0.1, 0.4);
  std::ostringstream ss;
  write_lattice_csv(lat, ss);
  const std::string s = ss.str();
  CHECK(s.rfind("node_id,x1,interior_flag,f_value,g_value\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == lat.size() + 1);
}
