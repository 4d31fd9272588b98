#pragma once

#include <cstdint>
#include <random>

#include "twoboard/point.hpp"

namespace twoboard {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Random stream of one episode, derived from (master_seed, episode_index)
/// alone. Two streams with the same pair produce identical draws.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t episode_index);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t episode_index() const noexcept { return episode_index_; }

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform in the open ball of the given radius around the origin.
  Point uniform_in_ball(int dim, double radius);

 private:
  std::uint64_t master_seed_;
  std::uint64_t episode_index_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace twoboard
