#include "twoboard/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twoboard {

Strategy pull_strategy(const Point& target) {
  return Strategy{"pull_to", [target](const MoveContext& ctx) {
                    const Point d = ctx.x - target;
                    const double r = d.norm();
                    if (r == 0.0) return ctx.x;
                    const double e = ctx.epsilon;
                    const double step = e * e * e / std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(ctx.own_moves, 2000))) - e;
                    return ctx.x + d * (step / r);
                  }};
}

namespace {

Strategy greedy(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const ValuePair> values, bool maximize) {
  if (!lattice || !values) throw std::invalid_argument{"greedy strategy requires a lattice and solved values"};
  if (values->u.size() != lattice->size()) throw std::invalid_argument{"greedy strategy: values do not match the lattice"};
  std::string name = maximize ? "greedy_max" : "greedy_min";
  return Strategy{std::move(name), [lattice, values, maximize](const MoveContext& ctx) {
                    const auto candidates = lattice->nodes_within(ctx.x, ctx.epsilon);
                    if (candidates.empty()) throw std::runtime_error{"greedy strategy: no lattice node within reach"};
                    NodeIndex best = candidates.front();
                    for (NodeIndex n : candidates) {
                      const double a = values->u[n];
                      const double b = values->u[best];
                      if (maximize ? a > b : a < b) best = n;
                    }
                    return lattice->coord(best);
                  }};
}

}  // namespace

Strategy greedy_max(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const ValuePair> values) {
  return greedy(std::move(lattice), std::move(values), true);
}

Strategy greedy_min(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const ValuePair> values) {
  return greedy(std::move(lattice), std::move(values), false);
}

Strategy stationary_random() {
  return Strategy{"stationary_random", [](const MoveContext& ctx) {
                    if (ctx.rng == nullptr) throw std::invalid_argument{"stationary_random needs the episode stream"};
                    return ctx.x + ctx.rng->uniform_in_ball(ctx.x.dim(), ctx.epsilon);
                  }};
}

}  // namespace twoboard
