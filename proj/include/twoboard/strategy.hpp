#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

#include "twoboard/dpp_solver.hpp"
#include "twoboard/lattice.hpp"
#include "twoboard/point.hpp"
#include "twoboard/rng.hpp"

namespace twoboard {

/// What a strategy may look at when its player wins the coin toss.
struct MoveContext {
  Point x;
  double epsilon = 0.0;
  std::size_t step = 0;        // transitions played so far in the episode
  std::size_t own_moves = 0;   // moves this player has made so far
  RngStream* rng = nullptr;    // episode stream, for randomized rules
};

/// A rule for choosing the next point in the closed ball of radius eps
/// around x. Strategies are immutable and may be shared across episodes and
/// threads; per-episode counters live in MoveContext.
class Strategy {
 public:
  using Rule = std::function<Point(const MoveContext&)>;

  Strategy(std::string name, Rule rule) : name_{std::move(name)}, rule_{std::move(rule)} {}

  const std::string& name() const noexcept { return name_; }
  Point operator()(const MoveContext& ctx) const { return rule_(ctx); }

 private:
  std::string name_;
  Rule rule_;
};

/// x + (eps^3 / 2^k - eps) (x - target) / |x - target|, k = own_moves.
/// Returns x unchanged when x == target.
Strategy pull_strategy(const Point& target);

/// Moves to the lattice node within distance eps of x that maximizes
/// (greedy_max) or minimizes (greedy_min) the board-1 values u. Ties go to
/// the lowest node index. Holds shared ownership of the lattice and values.
Strategy greedy_max(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const ValuePair> values);
Strategy greedy_min(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const ValuePair> values);

/// Uniform point in the ball of radius eps, drawn from the episode stream.
Strategy stationary_random();

}  // namespace twoboard
