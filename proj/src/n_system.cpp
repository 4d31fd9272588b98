#include "twoboard/n_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "stencil_kernel.hpp"

namespace twoboard {

std::string to_string(BoardOperator op) {
  switch (op) {
    case BoardOperator::Infinity: return "infinity";
    case BoardOperator::Laplace: return "laplace";
    case BoardOperator::Mix: return "mix";
  }
  return "unknown";
}

BoardOperator board_operator_from_string(const std::string& name) {
  if (name == "infinity") return BoardOperator::Infinity;
  if (name == "laplace") return BoardOperator::Laplace;
  if (name == "mix") return BoardOperator::Mix;
  throw std::invalid_argument{"unknown board operator '" + name + "'"};
}

NSystemResult solve_n_system(const Lattice& lattice, const std::vector<ComponentSpec>& components, Seed::Kind seed,
                             const SolveOptions& options) {
  const std::size_t n = components.size();
  if (n == 0) throw std::invalid_argument{"solve_n_system: at least one component is required"};
  if (seed == Seed::Kind::Custom) throw std::invalid_argument{"solve_n_system: seed must be lower or upper"};
  const double eps2 = lattice.epsilon() * lattice.epsilon();
  const std::size_t ni = lattice.interior_nodes().size();

  std::vector<detail::BoardRule> rules(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ComponentSpec& c = components[i];
    if (c.coupling.size() != n) {
      throw std::invalid_argument{fmt::format("component {}: coupling row has {} entries, expected {}", i, c.coupling.size(), n)};
    }
    double b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = c.coupling[j];
      if (!(a >= 0.0)) throw std::invalid_argument{fmt::format("component {}: a_{}{} = {} is negative", i, i, j, a)};
      if (j == i) {
        if (a != 0.0) throw std::invalid_argument{fmt::format("component {}: diagonal coupling must be 0", i)};
        continue;
      }
      b += a;
      if (a > 0.0) rules[i].couplings.push_back({j, std::vector<double>(ni, a * eps2)});
    }
    if (b * eps2 > 1.0) {
      throw std::invalid_argument{fmt::format("component {}: b_i eps^2 = {} exceeds 1", i, b * eps2)};
    }
    switch (c.op) {
      case BoardOperator::Infinity: rules[i].alpha = 1.0; break;
      case BoardOperator::Laplace: rules[i].alpha = 0.0; break;
      case BoardOperator::Mix:
        if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw std::invalid_argument{"mix alpha must lie in [0, 1]"};
        rules[i].alpha = c.alpha;
        break;
    }
    rules[i].exterior.resize(lattice.size());
    for (std::size_t k = 0; k < lattice.size(); ++k) rules[i].exterior[k] = c.payoff(lattice.coord(k));
  }

  detail::CoupledDpp op(lattice, std::move(rules), options.threads);
  const auto [lo, hi] = op.exterior_range();
  auto start = op.constant_seed(seed == Seed::Kind::Lower ? lo : hi);
  auto [fields, report] = op.solve(std::move(start), options);
  return {std::move(fields), std::move(report)};
}

}  // namespace twoboard
