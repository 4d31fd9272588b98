#pragma once

// Internal machinery shared by the two-board solver and the n-board system.

#include <cstddef>
#include <span>
#include <vector>

#include "twoboard/dpp_solver.hpp"
#include "twoboard/lattice.hpp"

namespace twoboard::detail {

/// Evaluates ball aggregates (max, min, mean over each interior stencil) for a
/// nodal field. The ball is decomposed into rows along the last grid axis;
/// row maxima/minima come from sparse tables and row sums from per-row
/// prefix sums. Owns scratch buffers: one instance per thread of control.
class StencilAggregator {
 public:
  explicit StencilAggregator(const Lattice& lattice);

  /// out[r] = 1/2 max + 1/2 min over the stencil of interior node r.
  void tug_of_war(std::span<const double> field, std::span<double> out, int threads);
  /// out[r] = unweighted stencil average for interior node r.
  void mean(std::span<const double> field, std::span<double> out, int threads);

 private:
  void scatter(std::span<const double> field);

  const Lattice& lattice_;
  int levels_ = 1;
  std::vector<int> group_level_;
  std::vector<double> dense_;
  std::vector<std::vector<double>> max_table_, min_table_;
  std::vector<double> prefix_;
};

/// One board of a coupled DPP system.
struct BoardRule {
  double alpha = 1.0;  // weight of the tug-of-war operator, 1 - alpha on the mean
  struct Coupling {
    std::size_t source = 0;
    std::vector<double> weight;  // a(x) eps^2 per interior rank
  };
  std::vector<Coupling> couplings;
  std::vector<double> exterior;  // frozen terminal data per node
};

/// Jacobi sweep operator for
///   w_i(x) = sum_j c_ij(x) w_j(x) + (1 - sum_j c_ij(x)) [alpha_i T w_i + (1 - alpha_i) M w_i](x)
/// with T the midrange and M the average over the stencil, and exterior
/// rows pinned to terminal data.
class CoupledDpp {
 public:
  CoupledDpp(const Lattice& lattice, std::vector<BoardRule> boards, int threads);

  std::size_t boards() const noexcept { return rules_.size(); }
  const Lattice& lattice() const noexcept { return lattice_; }

  using Fields = std::vector<std::vector<double>>;

  /// out = T(in). Returns sup over interior nodes and boards of |out - in|.
  double apply(const Fields& in, Fields& out);

  /// Constant interior value with exterior rows set to terminal data.
  Fields constant_seed(double value) const;
  /// Copies terminal data into the exterior rows of `fields`.
  void pin_exterior(Fields& fields) const;
  /// Smallest and largest terminal value over all boards and exterior nodes.
  std::pair<double, double> exterior_range() const;

  std::pair<Fields, SolveReport> solve(Fields seed, const SolveOptions& options);

 private:
  const Lattice& lattice_;
  std::vector<BoardRule> rules_;
  int threads_;
  StencilAggregator agg_;
  std::vector<double> tow_, mean_;
};

/// Per-interior-rank weights a(x) eps^2, validated to lie in [0, 1].
std::vector<double> jump_weights(const Lattice& lattice, const ScalarFunction& coeff, const char* name);

}  // namespace twoboard::detail
