#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "twoboard/domain.hpp"
#include "twoboard/point.hpp"
#include "twoboard/rng.hpp"
#include "twoboard/strategy.hpp"

namespace twoboard {

struct GameState {
  Point x;
  int board = 1;

  friend bool operator==(const GameState&, const GameState&) = default;
};

/// full: both boards with jumps. tow_only: board 1 without jumps.
/// random_only: board 2 without jumps.
enum class GameMode { Full, TowOnly, RandomOnly };
std::string to_string(GameMode mode);
GameMode game_mode_from_string(const std::string& name);

/// Kind of a single transition.
enum class StepEvent : std::uint8_t { Jump, PlayerOne, PlayerTwo, Random };
std::string to_string(StepEvent event);

struct GameSetup {
  Domain domain;
  PayoffData payoff;
  double epsilon = 0.1;
  GameMode mode = GameMode::Full;
  std::size_t cap = 0;  // 0 selects default_cap(domain, epsilon)
};

/// ceil(100 / eps^2) * diam^2.
std::size_t default_cap(const Domain& domain, double epsilon);

/// Per-episode bookkeeping that strategies are allowed to depend on.
struct EpisodeCounters {
  std::size_t step = 0;
  std::size_t moves_one = 0;
  std::size_t moves_two = 0;
};

struct StepResult {
  GameState state;
  StepEvent event;
};

/// One transition from a live state. The jump draw comes first (skipped in
/// the single-board modes), then the coin or the uniform draw. Throws
/// std::runtime_error when a strategy leaves the closed eps-ball.
StepResult step(const GameState& state, const Strategy& s1, const Strategy& s2, RngStream& rng, double epsilon,
                GameMode mode, EpisodeCounters& counters);

struct EpisodeTrace {
  std::vector<GameState> states;  // x_0 .. x_tau; empty unless recorded
  std::vector<StepEvent> events;  // one per transition; empty unless recorded
  GameState exit_state;
  double payoff = 0.0;  // NaN when capped
  std::size_t tau = 0;
  bool capped = false;
  GameMode mode = GameMode::Full;
};

EpisodeTrace play_episode(const Point& x0, int j0, const Strategy& s1, const Strategy& s2, RngStream& rng,
                          const GameSetup& setup, bool record = true);

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t capped_count = 0;
  std::size_t used = 0;
  double mean_tau = 0.0;
};

/// Plays episodes 0..n-1 of the master seed. Results do not depend on the
/// thread count. Throws when n < 2 or every episode is capped.
ValueEstimate estimate_value(const Point& x0, int j0, const Strategy& s1, const Strategy& s2, std::size_t n,
                             const GameSetup& setup, std::uint64_t master_seed, int threads = 1);

/// Full traces of episodes 0..n-1, for the diagnostics.
std::vector<EpisodeTrace> play_episodes(const Point& x0, int j0, const Strategy& s1, const Strategy& s2, std::size_t n,
                                        const GameSetup& setup, std::uint64_t master_seed, int threads = 1);

/// CSV rows: episode, step, x1..xN, board, event.
void write_trace_csv(const std::vector<EpisodeTrace>& traces, std::ostream& out);

}  // namespace twoboard
