#include "twoboard/rng.hpp"

#include <cmath>

namespace twoboard {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t episode_index)
    : master_seed_{master_seed},
      episode_index_{episode_index},
      engine_{mix64(mix64(master_seed) ^ mix64(episode_index + 0x632be59bd9b4e019ULL))} {}

double RngStream::uniform() { return unit_(engine_); }

double RngStream::normal() { return gauss_(engine_); }

Point RngStream::uniform_in_ball(int dim, double radius) {
  Point d(dim);
  double s = 0.0;
  // A Gaussian vector of zero length has probability zero; redraw if it happens.
  while (s == 0.0) {
    s = 0.0;
    for (int i = 0; i < dim; ++i) {
      d[i] = normal();
      s += d[i] * d[i];
    }
  }
  const double r = radius * std::pow(uniform(), 1.0 / dim);
  return d * (r / std::sqrt(s));
}

}  // namespace twoboard
