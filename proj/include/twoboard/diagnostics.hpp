#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "twoboard/game_engine.hpp"

namespace twoboard {

/// Sample mean with its standard error.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};
/// Ordered Welford pass.
MeanSe mean_and_se(const std::vector<double>& samples);

struct DriftBin {
  double lo = 0.0, hi = 0.0;  // range of |x_k - y|
  MeanSe drift;
};

struct MartingaleReport {
  std::vector<DriftBin> bins;
  double max_drift = 0.0;     // largest bin mean among bins with enough samples
  double max_drift_se = 0.0;  // its standard error
  bool drift_ok = false;      // every populated bin has mean <= 3 SE
  MeanSe second_moment;       // pooled E[(N_{k+1} - N_k)^2]
  double second_moment_floor = 0.0;  // eps^2 / 3
  bool second_moment_ok = false;     // mean >= floor - 3 SE
};

/// Increments of N_k = |x_k - y| + eps^3 / 2^k along tow_only traces, binned
/// by |x_k - y|. Bins with fewer than min_count samples are reported but not
/// judged. Throws std::invalid_argument for traces of another mode or
/// without recorded states.
MartingaleReport martingale_diagnostic(const std::vector<EpisodeTrace>& traces, double epsilon, const Point& target,
                                       std::size_t bins = 10, std::size_t min_count = 100);

struct ExitTimeReport {
  MeanSe tau;
  MeanSe exit_sq_distance;  // |x_tau - y|^2
  double tau_bound = 0.0;   // 4 |x0 - y|^2 / eps^2
  double sq_distance_bound = 0.0;  // 2 |x0 - y|^2
  bool tau_ok = false;
  bool sq_distance_ok = false;
  std::size_t capped = 0;
  /// Fraction of exits with |x_tau - y| >= far_radius (when far_radius > 0).
  MeanSe far_exit_fraction;
};

/// Exit statistics of single-board traces against the bounds
/// E[tau] <= 4|x0 - y|^2 / eps^2 and E|x_tau - y|^2 <= 2|x0 - y|^2.
/// Capped traces are excluded and counted. Throws on full-mode traces.
ExitTimeReport exit_time_stats(const std::vector<EpisodeTrace>& traces, double epsilon, const Point& x0,
                               const Point& target, double far_radius = 0.0);

struct CouplingReport {
  MeanSe payoff_gap;  // |payoff_j(x_exit) - payoff_j(z_exit)| on the exit board
  double max_gap = 0.0;
  double max_separation_error = 0.0;  // max_k ||x_k - z_k| - |x0 - z0||
  double mean_steps = 0.0;
};

/// Runs n coupled pairs: the z token receives the same displacement as the
/// x token at every step and shares every jump and coin outcome. Each pair
/// stops as soon as either token leaves the domain; the gap is evaluated
/// with the terminal data of the current board at both positions.
CouplingReport coupling_diagnostic(const Point& x0, const Point& z0, int board, const Strategy& s1, const Strategy& s2,
                                   std::size_t n, const GameSetup& setup, std::uint64_t master_seed, int threads = 1);

struct KernelStats {
  std::size_t steps = 0;
  std::size_t jumps = 0;
  std::size_t player_one = 0;  // coin won by player I, over all steps
  std::size_t tosses = 0;      // steps that reached the coin
};

/// Repeats one transition from a fixed state `steps` times using a single
/// stream of the master seed.
KernelStats kernel_statistics(const GameState& state, const Strategy& s1, const Strategy& s2, double epsilon,
                              std::size_t steps, std::uint64_t master_seed);

}  // namespace twoboard
