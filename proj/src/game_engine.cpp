#include "twoboard/game_engine.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "twoboard/parallel.hpp"

namespace twoboard {

namespace {

// Relative slack accepted on |move - x| <= eps.
constexpr double kMoveSlack = 1e-9;

void check_start(const Point& x0, int j0, const GameSetup& setup) {
  if (!setup.domain.contains(x0)) throw std::invalid_argument{"play_episode: x0 must lie in the domain"};
  if (j0 != 1 && j0 != 2) throw std::invalid_argument{"play_episode: board must be 1 or 2"};
  if (setup.mode == GameMode::TowOnly && j0 != 1) throw std::invalid_argument{"tow_only mode starts on board 1"};
  if (setup.mode == GameMode::RandomOnly && j0 != 2) throw std::invalid_argument{"random_only mode starts on board 2"};
  if (!(setup.epsilon > 0.0)) throw std::invalid_argument{"epsilon must be positive"};
}

}  // namespace

std::string to_string(GameMode mode) {
  switch (mode) {
    case GameMode::Full: return "full";
    case GameMode::TowOnly: return "tow_only";
    case GameMode::RandomOnly: return "random_only";
  }
  return "unknown";
}

GameMode game_mode_from_string(const std::string& name) {
  if (name == "full") return GameMode::Full;
  if (name == "tow_only" || name == "tow-only") return GameMode::TowOnly;
  if (name == "random_only" || name == "random-only") return GameMode::RandomOnly;
  throw std::invalid_argument{"unknown game mode '" + name + "'"};
}

std::string to_string(StepEvent event) {
  switch (event) {
    case StepEvent::Jump: return "jump";
    case StepEvent::PlayerOne: return "player1";
    case StepEvent::PlayerTwo: return "player2";
    case StepEvent::Random: return "random";
  }
  return "unknown";
}

std::size_t default_cap(const Domain& domain, double epsilon) {
  const double d = domain.diameter();
  return static_cast<std::size_t>(std::ceil(100.0 / (epsilon * epsilon)) * d * d);
}

StepResult step(const GameState& state, const Strategy& s1, const Strategy& s2, RngStream& rng, double epsilon,
                GameMode mode, EpisodeCounters& counters) {
  const int board = state.board;
  if ((mode == GameMode::TowOnly && board != 1) || (mode == GameMode::RandomOnly && board != 2)) {
    throw std::logic_error{"step: board is not available in mode " + to_string(mode)};
  }
  StepResult out{state, StepEvent::Random};
  ++counters.step;
  if (mode == GameMode::Full && rng.uniform() < epsilon * epsilon) {
    out.state.board = 3 - board;
    out.event = StepEvent::Jump;
    return out;
  }
  if (board == 2) {
    out.state.x = state.x + rng.uniform_in_ball(state.x.dim(), epsilon);
    return out;
  }
  const bool first = rng.uniform() < 0.5;
  MoveContext ctx{state.x, epsilon, counters.step - 1, first ? counters.moves_one : counters.moves_two, &rng};
  const Point next = first ? s1(ctx) : s2(ctx);
  (first ? counters.moves_one : counters.moves_two) += 1;
  require_same_dim(next, state.x.dim(), "strategy move");
  const double d = distance(next, state.x);
  if (!(d <= epsilon * (1.0 + kMoveSlack))) {
    throw std::runtime_error{fmt::format("strategy '{}' moved {} > eps = {}", (first ? s1 : s2).name(), d, epsilon)};
  }
  out.state.x = next;
  out.event = first ? StepEvent::PlayerOne : StepEvent::PlayerTwo;
  return out;
}

EpisodeTrace play_episode(const Point& x0, int j0, const Strategy& s1, const Strategy& s2, RngStream& rng,
                          const GameSetup& setup, bool record) {
  check_start(x0, j0, setup);
  const std::size_t cap = setup.cap != 0 ? setup.cap : default_cap(setup.domain, setup.epsilon);
  EpisodeTrace trace;
  trace.mode = setup.mode;
  GameState s{x0, j0};
  if (record) trace.states.push_back(s);
  EpisodeCounters counters;
  while (setup.domain.contains(s.x)) {
    if (trace.tau == cap) {
      trace.capped = true;
      break;
    }
    StepResult r = step(s, s1, s2, rng, setup.epsilon, setup.mode, counters);
    s = r.state;
    ++trace.tau;
    if (record) {
      trace.states.push_back(s);
      trace.events.push_back(r.event);
    }
  }
  trace.exit_state = s;
  trace.payoff = trace.capped ? std::numeric_limits<double>::quiet_NaN()
                              : eval_payoff(setup.domain, setup.payoff, s.x, s.board);
  return trace;
}

std::vector<EpisodeTrace> play_episodes(const Point& x0, int j0, const Strategy& s1, const Strategy& s2, std::size_t n,
                                        const GameSetup& setup, std::uint64_t master_seed, int threads) {
  check_start(x0, j0, setup);
  std::vector<EpisodeTrace> traces(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      RngStream rng(master_seed, e);
      traces[e] = play_episode(x0, j0, s1, s2, rng, setup, true);
    }
  });
  return traces;
}

ValueEstimate estimate_value(const Point& x0, int j0, const Strategy& s1, const Strategy& s2, std::size_t n,
                             const GameSetup& setup, std::uint64_t master_seed, int threads) {
  if (n < 2) throw std::invalid_argument{"estimate_value: need at least 2 episodes"};
  check_start(x0, j0, setup);
  std::vector<double> payoff(n);
  std::vector<std::size_t> tau(n);
  std::vector<std::uint8_t> capped(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      RngStream rng(master_seed, e);
      const EpisodeTrace t = play_episode(x0, j0, s1, s2, rng, setup, false);
      payoff[e] = t.payoff;
      tau[e] = t.tau;
      capped[e] = t.capped ? 1 : 0;
    }
  });
  // Ordered Welford reduction.
  ValueEstimate est;
  double mean = 0.0, m2 = 0.0, tau_sum = 0.0;
  std::size_t k = 0;
  for (std::size_t e = 0; e < n; ++e) {
    if (capped[e]) {
      ++est.capped_count;
      continue;
    }
    ++k;
    const double delta = payoff[e] - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (payoff[e] - mean);
    tau_sum += static_cast<double>(tau[e]);
  }
  if (k == 0) throw std::runtime_error{"estimate_value: every episode hit the step cap"};
  est.used = k;
  est.mean = mean;
  est.std_error = k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k)) : 0.0;
  est.mean_tau = tau_sum / static_cast<double>(k);
  return est;
}

void write_trace_csv(const std::vector<EpisodeTrace>& traces, std::ostream& out) {
  const int dim = traces.empty() || traces.front().states.empty() ? 1 : traces.front().states.front().x.dim();
  out << "episode,step";
  for (int i = 0; i < dim; ++i) out << ",x" << (i + 1);
  out << ",board,event\n";
  for (std::size_t e = 0; e < traces.size(); ++e) {
    const auto& t = traces[e];
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      out << e << ',' << k;
      for (int i = 0; i < dim; ++i) out << ',' << fmt::format("{:.17g}", t.states[k].x[i]);
      out << ',' << t.states[k].board << ',' << (k == 0 ? std::string{"start"} : to_string(t.events[k - 1])) << '\n';
    }
  }
}

}  // namespace twoboard
