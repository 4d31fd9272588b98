#pragma once

#include <string>
#include <vector>

#include "twoboard/dpp_solver.hpp"
#include "twoboard/lattice.hpp"
#include "twoboard/scalar_function.hpp"

namespace twoboard {

enum class BoardOperator { Infinity, Laplace, Mix };
std::string to_string(BoardOperator op);
BoardOperator board_operator_from_string(const std::string& name);

/// One component of an n-board system.
struct ComponentSpec {
  BoardOperator op = BoardOperator::Infinity;
  double alpha = 1.0;           // used only by Mix
  std::vector<double> coupling;  // a_ij for j = 0..n-1; the diagonal entry must be 0
  ScalarFunction payoff;         // terminal data on this board

  friend bool operator==(const ComponentSpec&, const ComponentSpec&) = default;
};

struct NSystemResult {
  std::vector<std::vector<double>> fields;
  SolveReport report;
};

/// Fixed point of
///   u_i = eps^2 sum_{j != i} a_ij u_j + (1 - b_i eps^2) S_i u_i,   b_i = sum_j a_ij,
/// with S_i the one-board operator of component i and u_i = payoff_i outside
/// the domain. Requires a_ij >= 0 and b_i eps^2 <= 1; throws
/// std::invalid_argument otherwise. The two-component system with operators
/// (Infinity, Laplace) and unit couplings coincides with solve_fixed_point.
NSystemResult solve_n_system(const Lattice& lattice, const std::vector<ComponentSpec>& components,
                             Seed::Kind seed = Seed::Kind::Lower, const SolveOptions& options = {});

}  // namespace twoboard
