#include <cmath>
#include <memory>
#include <sstream>

#include "doctest.h"
#include "twoboard/diagnostics.hpp"
#include "twoboard/dpp_solver.hpp"
#include "twoboard/game_engine.hpp"

using namespace twoboard;

namespace {

GameSetup interval_setup(double eps, GameMode mode = GameMode::Full) {
  return {Domain::interval(0.0, 1.0), {ScalarFunction::linear({1.0}), ScalarFunction::constant(0.0), 1.0}, eps, mode, 0};
}

GameSetup ball_setup(double eps, GameMode mode = GameMode::Full) {
  return {Domain::ball({0.0, 0.0}, 1.0),
          {ScalarFunction::linear({1.0, 0.0}), ScalarFunction::product(), 2.0},
          eps,
          mode,
          0};
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(5, 7), b(5, 7), c(5, 8), d(6, 7);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  CHECK(x != d.uniform());
  RngStream r(1, 0);
  double s = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const Point p = r.uniform_in_ball(3, 0.5);
    CHECK(p.norm() <= 0.5);
    s += p[2];
  }
  CHECK(std::abs(s / 20000) < 0.01);
}

TEST_CASE("pull strategy follows the displayed formula") {
  const Strategy s = pull_strategy(Point{0.0, 0.0});
  MoveContext ctx{Point{0.5, 0.0}, 0.1, 0, 0, nullptr};
  const Point m = s(ctx);
  CHECK(m[0] == doctest::Approx(0.401).epsilon(1e-14));
  CHECK(m[1] == 0.0);
  ctx.own_moves = 60;
  CHECK(distance(s(ctx), ctx.x) == doctest::Approx(0.1).epsilon(1e-12));
  ctx.x = Point{0.0, 0.0};
  CHECK(s(ctx) == ctx.x);
  // Overshoot near the target stays inside the closed ball.
  ctx.x = Point{0.02, 0.0};
  ctx.own_moves = 0;
  CHECK(distance(s(ctx), ctx.x) <= 0.1);
}

TEST_CASE("step: jump branch and uniform branch") {
  RngStream probe(3, 0);
  const double first = probe.uniform();
  const double eps = std::sqrt(first) * 1.01;
  RngStream rng(3, 0);
  EpisodeCounters counters;
  const Strategy any = stationary_random();
  const GameState s0{Point{0.5}, 1};
  const StepResult r = step(s0, any, any, rng, eps, GameMode::Full, counters);
  CHECK(r.event == StepEvent::Jump);
  CHECK(r.state.board == 2);
  CHECK(r.state.x == s0.x);

  RngStream rng2(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const StepResult q = step({Point{0.5}, 2}, any, any, rng2, 0.1, GameMode::RandomOnly, counters);
    CHECK(q.state.board == 2);
    CHECK(std::abs(q.state.x[0] - 0.5) <= 0.1);
  }
  CHECK_THROWS_AS(step({Point{0.5}, 2}, any, any, rng2, 0.1, GameMode::TowOnly, counters), std::logic_error);
}

TEST_CASE("strategies leaving the ball are rejected") {
  const Strategy cheat{"cheat", [](const MoveContext& c) { return c.x + Point{2.0 * c.epsilon}; }};
  RngStream rng(1, 0);
  const auto setup = interval_setup(0.1, GameMode::TowOnly);
  CHECK_THROWS_AS(play_episode(Point{0.5}, 1, cheat, cheat, rng, setup), std::runtime_error);
}

TEST_CASE("two pullers to 0 finish within three moves") {
  const auto setup = interval_setup(0.25, GameMode::TowOnly);
  const Strategy p = pull_strategy(Point{0.0});
  for (std::uint64_t e = 0; e < 20; ++e) {
    RngStream rng(17, e);
    const EpisodeTrace t = play_episode(Point{0.5}, 1, p, p, rng, setup);
    CHECK(t.tau <= 3);
    CHECK(t.exit_state.x[0] <= 0.0);
    CHECK(t.payoff == t.exit_state.x[0]);
  }
}

TEST_CASE("episodes are reproducible and respect the kernel support") {
  const auto setup = ball_setup(0.1);
  const Strategy s1 = pull_strategy(Point{1.0, 0.0});
  const Strategy s2 = stationary_random();
  const auto a = play_episodes(Point{0.2, 0.1}, 1, s1, s2, 50, setup, 9);
  const auto b = play_episodes(Point{0.2, 0.1}, 1, s1, s2, 50, setup, 9, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t e = 0; e < a.size(); ++e) {
    CHECK(a[e].states == b[e].states);
    CHECK(a[e].payoff == b[e].payoff);
    const auto& t = a[e];
    CHECK(t.states.size() == t.tau + 1);
    for (std::size_t k = 0; k + 1 < t.states.size(); ++k) {
      const auto& x = t.states[k];
      const auto& y = t.states[k + 1];
      if (t.events[k] == StepEvent::Jump) {
        CHECK(x.x == y.x);
        CHECK(x.board != y.board);
      } else {
        CHECK(x.board == y.board);
        CHECK(distance(x.x, y.x) <= 0.1 * (1 + 1e-9));
      }
      CHECK(setup.domain.contains(x.x));
    }
    CHECK_FALSE(setup.domain.contains(t.exit_state.x));
    CHECK(std::abs(t.payoff) <= 1.1 + 1e-12);
  }
}

TEST_CASE("constant payoff: every episode pays c and the error is zero") {
  GameSetup setup = ball_setup(0.1);
  setup.payoff = {ScalarFunction::constant(0.25), ScalarFunction::constant(0.25), 0.0};
  const auto est =
      estimate_value(Point{0.0, 0.3}, 2, stationary_random(), pull_strategy(Point{0.0, -1.0}), 500, setup, 3);
  CHECK(est.mean == 0.25);
  CHECK(est.std_error == 0.0);
  CHECK(est.capped_count == 0);
}

TEST_CASE("estimate_value does not depend on the thread count") {
  const auto setup = ball_setup(0.1);
  const Strategy s = stationary_random();
  const auto a = estimate_value(Point{0.3, 0.0}, 1, s, s, 400, setup, 77, 1);
  const auto b = estimate_value(Point{0.3, 0.0}, 1, s, s, 400, setup, 77, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean_tau == b.mean_tau);
  CHECK_THROWS_AS(estimate_value(Point{0.3, 0.0}, 1, s, s, 1, setup, 77), std::invalid_argument);
}

TEST_CASE("capped episodes are flagged and excluded") {
  GameSetup setup = ball_setup(0.1);
  setup.cap = 1;
  RngStream rng(2, 0);
  const Strategy s = stationary_random();
  const auto t = play_episode(Point{0.0, 0.0}, 1, s, s, rng, setup);
  CHECK(t.capped);
  CHECK(std::isnan(t.payoff));
  CHECK_THROWS_AS(estimate_value(Point{0.0, 0.0}, 1, s, s, 10, setup, 1), std::runtime_error);
}

TEST_CASE("greedy strategies pick the extreme node with lowest-index ties") {
  const PayoffData pay{ScalarFunction::constant(1.0), ScalarFunction::constant(1.0), 0.0};
  auto lat = std::make_shared<const Lattice>(build_lattice(Domain::interval(0.0, 1.0), pay, 0.025, 0.1));
  auto vals = std::make_shared<ValuePair>(constant_values(*lat, 1.0, 1.0));
  MoveContext ctx{Point{0.5}, 0.1, 0, 0, nullptr};
  const auto cands = lat->nodes_within(ctx.x, 0.1);
  // All equal: the first candidate wins for both.
  CHECK(greedy_max(lat, vals)(ctx) == lat->coord(cands.front()));
  CHECK(greedy_min(lat, vals)(ctx) == lat->coord(cands.front()));
  vals->u[cands[3]] = 2.0;
  vals->u[cands[5]] = -2.0;
  CHECK(greedy_max(lat, vals)(ctx) == lat->coord(cands[3]));
  CHECK(greedy_min(lat, vals)(ctx) == lat->coord(cands[5]));
}

TEST_CASE("diagnostics reject traces from the wrong mode") {
  const auto setup = ball_setup(0.1);
  const Strategy s = stationary_random();
  const auto traces = play_episodes(Point{0.5, 0.0}, 1, s, s, 5, setup, 1);
  CHECK_THROWS_AS(martingale_diagnostic(traces, 0.1, Point{1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(exit_time_stats(traces, 0.1, Point{0.5, 0.0}, Point{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("coupling: identical starts give zero gap, separations are preserved") {
  const auto setup = ball_setup(0.1);
  const Strategy p = pull_strategy(Point{1.0, 0.0});
  const Strategy r = stationary_random();
  const auto same = coupling_diagnostic(Point{0.3, 0.2}, Point{0.3, 0.2}, 1, p, r, 200, setup, 5);
  CHECK(same.payoff_gap.mean == 0.0);
  CHECK(same.max_gap == 0.0);
  const auto near = coupling_diagnostic(Point{0.3, 0.2}, Point{0.31, 0.2}, 1, p, r, 200, setup, 5);
  CHECK(near.max_separation_error < 1e-12);
  CHECK(near.payoff_gap.mean > 0.0);
}

TEST_CASE("trace CSV layout") {
  const auto setup = interval_setup(0.25, GameMode::TowOnly);
  const Strategy p = pull_strategy(Point{0.0});
  const auto traces = play_episodes(Point{0.5}, 1, p, p, 2, setup, 1);
  std::ostringstream ss;
  write_trace_csv(traces, ss);
  const std::string s = ss.str();
  CHECK(s.rfind("episode,step,x1,board,event\n0,0,0.5,1,start\n", 0) == 0);
}
