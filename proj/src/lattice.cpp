#include "twoboard/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace twoboard {

namespace {

// Relative slack for "within distance eps" tests on grid geometry.
constexpr double kRadiusSlack = 1e-9;

std::vector<std::array<int, kMaxDim>> ball_offsets(int dim, int m, double r2) {
  std::vector<std::array<int, kMaxDim>> out;
  std::array<int, kMaxDim> o{};
  // Lexicographic enumeration of [-m, m]^dim, first axis slowest.
  for (int i = 0; i < dim; ++i) o[i] = -m;
  while (true) {
    long s = 0;
    for (int i = 0; i < dim; ++i) s += static_cast<long>(o[i]) * o[i];
    if (static_cast<double>(s) <= r2) out.push_back(o);
    int axis = dim - 1;
    while (axis >= 0 && o[axis] == m) {
      o[axis] = -m;
      --axis;
    }
    if (axis < 0) break;
    ++o[axis];
  }
  return out;
}

}  // namespace

Point Lattice::coord(std::size_t node) const {
  Point p(grid_.dim);
  std::int64_t rem = grid_.dense_of_node[node];
  for (int i = 0; i < grid_.dim; ++i) {
    const std::int64_t k = rem / grid_.stride[i];
    rem -= k * grid_.stride[i];
    p[i] = grid_.anchor[i] + static_cast<double>(k - grid_.pad) * h_;
  }
  return p;
}

std::span<const NodeIndex> Lattice::stencil(std::size_t node) const {
  const std::int32_t r = interior_rank_[node];
  if (r < 0) return {};
  const std::size_t len = offsets_.size();
  return {stencil_nodes_.data() + static_cast<std::size_t>(r) * len, len};
}

std::optional<NodeIndex> Lattice::nearest_node(const Point& x) const {
  require_same_dim(x, grid_.dim, "Lattice::nearest_node");
  std::int64_t lin = 0;
  for (int i = 0; i < grid_.dim; ++i) {
    const auto k = static_cast<std::int64_t>(std::llround((x[i] - grid_.origin[i]) / h_));
    if (k < 0 || k >= grid_.extent[i]) return std::nullopt;
    lin += k * grid_.stride[i];
  }
  const std::int32_t n = grid_.node_of[lin];
  if (n < 0) return std::nullopt;
  return static_cast<NodeIndex>(n);
}

std::vector<NodeIndex> Lattice::nodes_within(const Point& x, double radius) const {
  require_same_dim(x, grid_.dim, "Lattice::nodes_within");
  std::array<std::int64_t, kMaxDim> lo{}, hi{}, k{};
  for (int i = 0; i < grid_.dim; ++i) {
    lo[i] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((x[i] - radius - grid_.origin[i]) / h_)));
    hi[i] = std::min<std::int64_t>(grid_.extent[i] - 1,
                                   static_cast<std::int64_t>(std::ceil((x[i] + radius - grid_.origin[i]) / h_)));
    if (lo[i] > hi[i]) return {};
    k[i] = lo[i];
  }
  const double r2 = radius * radius * (1.0 + kRadiusSlack);
  std::vector<NodeIndex> out;
  while (true) {
    std::int64_t lin = 0;
    double d2 = 0.0;
    for (int i = 0; i < grid_.dim; ++i) {
      lin += k[i] * grid_.stride[i];
      const double d = grid_.anchor[i] + static_cast<double>(k[i] - grid_.pad) * h_ - x[i];
      d2 += d * d;
    }
    if (d2 <= r2 && grid_.node_of[lin] >= 0) out.push_back(static_cast<NodeIndex>(grid_.node_of[lin]));
    int axis = grid_.dim - 1;
    while (axis >= 0 && k[axis] == hi[axis]) {
      k[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
    ++k[axis];
  }
  std::sort(out.begin(), out.end());
  return out;
}

Lattice build_lattice(const Domain& domain, const PayoffData& payoff, double h, double eps) {
  if (!(h > 0.0) || !(eps > 0.0)) throw std::invalid_argument{"build_lattice: h and eps must be positive"};
  if (h > eps / 4.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument{fmt::format("build_lattice: h = {} exceeds eps/4 = {}", h, eps / 4.0)};
  }
  if (!(eps < domain.diameter())) {
    throw std::invalid_argument{fmt::format("build_lattice: eps = {} must be below diam = {}", eps, domain.diameter())};
  }

  Lattice lat(domain, payoff);
  lat.h_ = h;
  lat.eps_ = eps;
  const int dim = domain.dim();
  const double ratio = eps / h;
  const int m = static_cast<int>(std::floor(ratio * (1.0 + kRadiusSlack)));
  lat.radius_cells_ = m;
  const double r2 = ratio * ratio * (1.0 + kRadiusSlack);

  DenseGrid& g = lat.grid_;
  g.dim = dim;
  const auto blo = domain.bbox_lo();
  const auto bhi = domain.bbox_hi();
  const int pad = m + 1;
  for (int i = 0; i < dim; ++i) {
    const auto cells = static_cast<std::int64_t>(std::ceil((bhi[i] - blo[i]) / h - 1e-9));
    g.extent[i] = cells + 2 * pad + 1;
    g.origin[i] = blo[i] - pad * h;
  }
  std::int64_t total = 1;
  for (int i = dim - 1; i >= 0; --i) {
    g.stride[i] = total;
    total *= g.extent[i];
  }

  lat.offsets_ = ball_offsets(dim, m, r2);
  std::vector<std::int64_t> lin_offsets;
  lin_offsets.reserve(lat.offsets_.size());
  for (const auto& o : lat.offsets_) {
    std::int64_t s = 0;
    for (int i = 0; i < dim; ++i) s += o[i] * g.stride[i];
    lin_offsets.push_back(s);
  }

  // Coordinates are anchored at the bounding-box corner: x_i = lo_i + (k_i - pad) h.
  auto coord_of = [&](std::int64_t lin) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) {
      const std::int64_t k = lin / g.stride[i];
      lin -= k * g.stride[i];
      p[i] = blo[i] + static_cast<double>(k - pad) * h;
    }
    return p;
  };
  g.pad = pad;
  for (int i = 0; i < dim; ++i) g.anchor[i] = blo[i];

  const double geom_tol = 1e-9 * h;
  std::vector<std::uint8_t> state(static_cast<std::size_t>(total), 0);  // 0 none, 1 collar, 2 interior
  for (std::int64_t lin = 0; lin < total; ++lin) {
    const double sd = domain.signed_distance(coord_of(lin));
    if (sd < -geom_tol) {
      state[lin] = 2;
    } else if (sd <= eps * (1.0 + kRadiusSlack)) {
      state[lin] = 1;
    }
  }
  // Every point reachable in one move from an interior node must be stored.
  for (std::int64_t lin = 0; lin < total; ++lin) {
    if (state[lin] != 2) continue;
    for (std::int64_t off : lin_offsets) {
      const std::int64_t q = lin + off;
      if (q < 0 || q >= total) throw std::logic_error{"build_lattice: stencil escapes the dense grid"};
      if (state[q] == 0) state[q] = 1;
    }
  }

  g.node_of.assign(static_cast<std::size_t>(total), -1);
  for (std::int64_t lin = 0; lin < total; ++lin) {
    if (state[lin] == 0) continue;
    const auto id = static_cast<std::int32_t>(g.dense_of_node.size());
    g.node_of[lin] = id;
    g.dense_of_node.push_back(lin);
    lat.interior_flag_.push_back(state[lin] == 2 ? 1 : 0);
  }
  const std::size_t n = g.dense_of_node.size();
  lat.interior_rank_.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (lat.interior_flag_[i]) {
      lat.interior_rank_[i] = static_cast<std::int32_t>(lat.interior_.size());
      lat.interior_.push_back(static_cast<NodeIndex>(i));
    }
  }
  if (lat.interior_.empty()) throw std::invalid_argument{"build_lattice: lattice has no interior node"};

  lat.stencil_nodes_.reserve(lat.interior_.size() * lin_offsets.size());
  for (NodeIndex node : lat.interior_) {
    const std::int64_t lin = g.dense_of_node[node];
    for (std::int64_t off : lin_offsets) {
      lat.stencil_nodes_.push_back(static_cast<NodeIndex>(g.node_of[lin + off]));
    }
  }

  // Row decomposition of the ball stencil along the last axis.
  {
    std::array<int, kMaxDim> prev{};
    bool have = false;
    for (const auto& o : lat.offsets_) {
      bool same = have;
      for (int i = 0; i + 1 < dim && same; ++i) same = (o[i] == prev[i]);
      if (!same) {
        RowGroup rg;
        for (int i = 0; i + 1 < dim; ++i) rg.lead_offset += o[i] * g.stride[i];
        rg.half_width = -o[dim - 1];
        g.row_groups.push_back(rg);
        prev = o;
        have = true;
      }
    }
  }

  lat.f_values_.resize(n);
  lat.g_values_.resize(n);
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = coord_of(g.dense_of_node[i]);
    lat.f_values_[i] = payoff.f_bar(x);
    lat.g_values_[i] = payoff.g_bar(x);
    if (!lat.interior_flag_[i]) {
      bound = std::max({bound, std::abs(lat.f_values_[i]), std::abs(lat.g_values_[i])});
    }
  }
  lat.payoff_bound_ = bound;
  return lat;
}

void write_lattice_csv(const Lattice& lattice, std::ostream& out) {
  out << "node_id";
  for (int i = 0; i < lattice.dim(); ++i) out << ",x" << (i + 1);
  out << ",interior_flag,f_value,g_value\n";
  for (std::size_t n = 0; n < lattice.size(); ++n) {
    const Point x = lattice.coord(n);
    out << n;
    for (int i = 0; i < lattice.dim(); ++i) out << ',' << fmt::format("{:.17g}", x[i]);
    out << ',' << (lattice.is_interior(n) ? 1 : 0) << ',' << fmt::format("{:.17g}", lattice.f_value(n)) << ','
        << fmt::format("{:.17g}", lattice.g_value(n)) << '\n';
  }
}

}  // namespace twoboard
