#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "twoboard/domain.hpp"
#include "twoboard/point.hpp"

namespace twoboard {

using NodeIndex = std::uint32_t;

/// A contiguous run of stencil offsets along the last grid axis:
/// offsets (lead, t) for t in [-half_width, half_width].
struct RowGroup {
  std::int64_t lead_offset = 0;  // dense linear offset of (lead, 0)
  int half_width = 0;
};

/// Axis-aligned dense index space backing a lattice. Positions that are not
/// lattice nodes map to -1.
struct DenseGrid {
  int dim = 1;
  std::array<std::int64_t, kMaxDim> extent{};
  std::array<std::int64_t, kMaxDim> stride{};
  std::array<double, kMaxDim> origin{};  // coordinate of dense index 0 (approximate)
  std::array<double, kMaxDim> anchor{};  // bounding-box corner; x_i = anchor_i + (k_i - pad) h
  int pad = 0;
  std::vector<std::int32_t> node_of;
  std::vector<std::int64_t> dense_of_node;
  std::vector<RowGroup> row_groups;

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(node_of.size()); }
};

/// Regular grid of spacing h covering the closure of Omega plus the exterior
/// collar {x not in Omega : dist(x, Omega) <= eps}. Interior nodes carry the
/// list of nodes within closed distance eps; collar nodes are terminal and
/// carry frozen payoff values. Immutable after construction.
class Lattice {
 public:
  int dim() const noexcept { return grid_.dim; }
  double h() const noexcept { return h_; }
  double epsilon() const noexcept { return eps_; }
  /// Stencil radius in grid cells.
  int radius_cells() const noexcept { return radius_cells_; }

  std::size_t size() const noexcept { return interior_flag_.size(); }
  Point coord(std::size_t node) const;
  bool is_interior(std::size_t node) const { return interior_flag_[node] != 0; }

  std::span<const NodeIndex> interior_nodes() const noexcept { return interior_; }
  /// Position of an interior node within interior_nodes(); -1 for collar nodes.
  std::int32_t interior_rank(std::size_t node) const { return interior_rank_[node]; }

  /// Nodes y with |y - x| <= eps for interior x, in stencil_offsets() order.
  /// Empty for collar nodes.
  std::span<const NodeIndex> stencil(std::size_t node) const;
  /// Integer grid offsets shared by every stencil.
  std::span<const std::array<int, kMaxDim>> stencil_offsets() const noexcept { return offsets_; }

  double f_value(std::size_t node) const { return f_values_[node]; }
  double g_value(std::size_t node) const { return g_values_[node]; }
  std::span<const double> f_values() const noexcept { return f_values_; }
  std::span<const double> g_values() const noexcept { return g_values_; }

  /// max(sup|f_bar|, sup|g_bar|) over collar nodes.
  double payoff_bound() const noexcept { return payoff_bound_; }

  std::optional<NodeIndex> nearest_node(const Point& x) const;
  /// All lattice nodes within closed distance `radius` of an arbitrary point.
  std::vector<NodeIndex> nodes_within(const Point& x, double radius) const;

  const DenseGrid& grid() const noexcept { return grid_; }
  const Domain& domain() const noexcept { return domain_; }
  const PayoffData& payoff() const noexcept { return payoff_; }

 private:
  friend Lattice build_lattice(const Domain&, const PayoffData&, double, double);
  Lattice(Domain domain, PayoffData payoff) : domain_{std::move(domain)}, payoff_{std::move(payoff)} {}

  Domain domain_;
  PayoffData payoff_;
  double h_ = 0.0;
  double eps_ = 0.0;
  int radius_cells_ = 0;
  DenseGrid grid_;
  std::vector<std::uint8_t> interior_flag_;
  std::vector<NodeIndex> interior_;
  std::vector<std::int32_t> interior_rank_;
  std::vector<std::array<int, kMaxDim>> offsets_;
  std::vector<NodeIndex> stencil_nodes_;  // interior_.size() * offsets_.size()
  std::vector<double> f_values_, g_values_;
  double payoff_bound_ = 0.0;
};

/// Requires 0 < h <= eps/4 and eps < diam(Omega); throws std::invalid_argument
/// otherwise or when the lattice has no interior node.
Lattice build_lattice(const Domain& domain, const PayoffData& payoff, double h, double eps);

/// CSV: node_id, x1..xN, interior_flag, f_value, g_value.
void write_lattice_csv(const Lattice& lattice, std::ostream& out);

}  // namespace twoboard
