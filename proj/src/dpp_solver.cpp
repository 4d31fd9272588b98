#include "twoboard/dpp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stencil_kernel.hpp"

namespace twoboard {

namespace {

std::vector<detail::BoardRule> two_board_rules(const Lattice& lattice, const DppParams& params) {
  detail::BoardRule b1, b2;
  b1.alpha = params.mix_alpha_1;
  b2.alpha = params.mix_alpha_2;
  b1.couplings.push_back({1, detail::jump_weights(lattice, params.jump_coeff_1, "jump_coeff_1")});
  b2.couplings.push_back({0, detail::jump_weights(lattice, params.jump_coeff_2, "jump_coeff_2")});
  b1.exterior.assign(lattice.f_values().begin(), lattice.f_values().end());
  b2.exterior.assign(lattice.g_values().begin(), lattice.g_values().end());
  return {std::move(b1), std::move(b2)};
}

void check_shape(const ValuePair& values, const Lattice& lattice, const char* what) {
  if (values.u.size() != lattice.size() || values.v.size() != lattice.size()) {
    throw std::invalid_argument{std::string{what} + ": value arrays do not match the lattice"};
  }
}

detail::CoupledDpp::Fields to_fields(const ValuePair& p) { return {p.u, p.v}; }

ValuePair to_pair(detail::CoupledDpp::Fields f, double eps) {
  return ValuePair{std::move(f[0]), std::move(f[1]), eps};
}

}  // namespace

ValuePair constant_values(const Lattice& lattice, double cu, double cv) {
  ValuePair p{std::vector<double>(lattice.size(), cu), std::vector<double>(lattice.size(), cv), lattice.epsilon()};
  for (std::size_t n = 0; n < lattice.size(); ++n) {
    if (!lattice.is_interior(n)) {
      p.u[n] = lattice.f_value(n);
      p.v[n] = lattice.g_value(n);
    }
  }
  return p;
}

ValuePair dpp_update(const ValuePair& current, const Lattice& lattice, const DppParams& params) {
  check_shape(current, lattice, "dpp_update");
  detail::CoupledDpp op(lattice, two_board_rules(lattice, params), 1);
  detail::CoupledDpp::Fields out;
  op.apply(to_fields(current), out);
  return to_pair(std::move(out), lattice.epsilon());
}

double residual(const ValuePair& values, const Lattice& lattice, const DppParams& params) {
  check_shape(values, lattice, "residual");
  detail::CoupledDpp op(lattice, two_board_rules(lattice, params), 1);
  detail::CoupledDpp::Fields out;
  return op.apply(to_fields(values), out);
}

std::pair<ValuePair, SolveReport> solve_fixed_point(const Lattice& lattice, const DppParams& params, const Seed& seed,
                                                    const SolveOptions& options) {
  detail::CoupledDpp op(lattice, two_board_rules(lattice, params), options.threads);
  detail::CoupledDpp::Fields start;
  switch (seed.kind) {
    case Seed::Kind::Lower: start = op.constant_seed(op.exterior_range().first); break;
    case Seed::Kind::Upper: start = op.constant_seed(op.exterior_range().second); break;
    case Seed::Kind::Custom:
      check_shape(seed.custom, lattice, "solve_fixed_point seed");
      start = to_fields(seed.custom);
      break;
  }
  auto [fields, report] = op.solve(std::move(start), options);
  return {to_pair(std::move(fields), lattice.epsilon()), std::move(report)};
}

BothSeeds solve_both_seeds(const Lattice& lattice, const DppParams& params, const SolveOptions& options) {
  BothSeeds out;
  std::tie(out.lower, out.lower_report) = solve_fixed_point(lattice, params, Seed::lower(), options);
  std::tie(out.upper, out.upper_report) = solve_fixed_point(lattice, params, Seed::upper(), options);
  double gap = 0.0;
  for (std::size_t n = 0; n < lattice.size(); ++n) {
    gap = std::max({gap, std::abs(out.upper.u[n] - out.lower.u[n]), std::abs(out.upper.v[n] - out.lower.v[n])});
  }
  out.gap = gap;
  out.lower_report.gap_up_down = gap;
  out.upper_report.gap_up_down = gap;
  return out;
}

bool comparison_check(const ValuePair& lower, const ValuePair& upper, const Lattice& lattice, const DppParams& params,
                      double slack) {
  check_shape(lower, lattice, "comparison_check");
  check_shape(upper, lattice, "comparison_check");
  for (std::size_t n = 0; n < lattice.size(); ++n) {
    if (lower.u[n] > upper.u[n] || lower.v[n] > upper.v[n]) {
      throw std::invalid_argument{"comparison_check: inputs are not ordered"};
    }
  }
  const ValuePair tl = dpp_update(lower, lattice, params);
  const ValuePair tu = dpp_update(upper, lattice, params);
  for (std::size_t n = 0; n < lattice.size(); ++n) {
    if (tl.u[n] > tu.u[n] + slack || tl.v[n] > tu.v[n] + slack) return false;
  }
  return true;
}

}  // namespace twoboard
