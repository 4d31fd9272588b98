#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "twoboard/lattice.hpp"
#include "twoboard/scalar_function.hpp"

namespace twoboard {

/// Nodal values of the two boards. Exterior rows hold the terminal data.
struct ValuePair {
  std::vector<double> u;
  std::vector<double> v;
  double epsilon = 0.0;
};

/// Coefficients of the two-board dynamic programming principle.
///   jump_coeff_1 = a(x), jump_coeff_2 = b(x): the jump probabilities are a eps^2, b eps^2.
///   mix_alpha_k: weight of the midrange operator on board k, 1 - alpha on the mean.
/// The default is tug-of-war on board 1 and random walk on board 2.
struct DppParams {
  ScalarFunction jump_coeff_1 = ScalarFunction::constant(1.0);
  ScalarFunction jump_coeff_2 = ScalarFunction::constant(1.0);
  double mix_alpha_1 = 1.0;
  double mix_alpha_2 = 0.0;

  friend bool operator==(const DppParams&, const DppParams&) = default;
};

struct SolveOptions {
  double tol = 1e-9;
  std::size_t max_iter = 1'000'000;
  int threads = 1;

  friend bool operator==(const SolveOptions&, const SolveOptions&) = default;
};

struct SolveReport {
  std::size_t iterations = 0;
  /// Sup-norm change of every sweep, in order.
  std::vector<double> residual_history;
  /// Sup-norm change of one further sweep applied to the returned iterate.
  double final_residual = 0.0;
  /// Largest observed ratio of successive changes over the trailing window.
  double contraction_estimate = 0.0;
  bool converged = false;
  /// max |upper - lower| over nodes; only set by solve_both_seeds.
  double gap_up_down = std::numeric_limits<double>::quiet_NaN();
};

/// Starting iterate of the fixed-point iteration. lower/upper fill the
/// interior with the smallest/largest terminal value, which lie inside
/// [-C, C] with C = lattice.payoff_bound() and are a sub- and a supersolution.
/// Constant data is therefore reproduced by the first sweep. custom takes the
/// given interior values (exterior rows are overwritten with terminal data).
struct Seed {
  enum class Kind { Lower, Upper, Custom };
  Kind kind = Kind::Lower;
  ValuePair custom;

  static Seed lower() { return {Kind::Lower, {}}; }
  static Seed upper() { return {Kind::Upper, {}}; }
  static Seed from(ValuePair values) { return {Kind::Custom, std::move(values)}; }
};

/// One Jacobi sweep of the two-board operator.
ValuePair dpp_update(const ValuePair& current, const Lattice& lattice, const DppParams& params);

/// Iterates the sweep from `seed` until the estimated distance to the fixed
/// point drops below options.tol. The estimate is change * rho / (1 - rho),
/// with rho the contraction ratio observed over recent sweeps; a zero change
/// stops immediately.
std::pair<ValuePair, SolveReport> solve_fixed_point(const Lattice& lattice, const DppParams& params, const Seed& seed,
                                                    const SolveOptions& options = {});

struct BothSeeds {
  ValuePair lower, upper;
  SolveReport lower_report, upper_report;
  double gap = 0.0;
};

/// Solves from both seeds and reports the sup gap between the two limits.
BothSeeds solve_both_seeds(const Lattice& lattice, const DppParams& params, const SolveOptions& options = {});

/// Sup over interior nodes and both boards of |T(values) - values|.
double residual(const ValuePair& values, const Lattice& lattice, const DppParams& params);

/// True when lower <= upper implies T(lower) <= T(upper) + slack pointwise.
/// Throws std::invalid_argument when the inputs are not ordered.
bool comparison_check(const ValuePair& lower, const ValuePair& upper, const Lattice& lattice, const DppParams& params,
                      double slack = 1e-12);

/// Interior rows set to (cu, cv), exterior rows to terminal data.
ValuePair constant_values(const Lattice& lattice, double cu, double cv);

}  // namespace twoboard
