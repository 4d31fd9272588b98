#include "stencil_kernel.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "twoboard/parallel.hpp"

namespace twoboard::detail {

namespace {

int floor_log2(std::uint64_t x) { return std::bit_width(x) - 1; }

// Recent sweeps used to estimate the contraction ratio.
constexpr std::size_t kRatioWindow = 10;

}  // namespace

StencilAggregator::StencilAggregator(const Lattice& lattice) : lattice_{lattice} {
  const DenseGrid& g = lattice.grid();
  int widest = 0;
  for (const RowGroup& rg : g.row_groups) {
    widest = std::max(widest, 2 * rg.half_width + 1);
    group_level_.push_back(floor_log2(static_cast<std::uint64_t>(2 * rg.half_width + 1)));
  }
  levels_ = floor_log2(static_cast<std::uint64_t>(widest)) + 1;
  const auto total = static_cast<std::size_t>(g.size());
  dense_.assign(total, 0.0);
  prefix_.assign(total, 0.0);
  max_table_.assign(static_cast<std::size_t>(levels_ - 1), std::vector<double>(total, 0.0));
  min_table_.assign(static_cast<std::size_t>(levels_ - 1), std::vector<double>(total, 0.0));
}

void StencilAggregator::scatter(std::span<const double> field) {
  if (field.size() != lattice_.size()) throw std::invalid_argument{"StencilAggregator: field size mismatch"};
  const auto& dense_of = lattice_.grid().dense_of_node;
  for (std::size_t n = 0; n < field.size(); ++n) dense_[static_cast<std::size_t>(dense_of[n])] = field[n];
}

void StencilAggregator::tug_of_war(std::span<const double> field, std::span<double> out, int threads) {
  scatter(field);
  const std::size_t total = dense_.size();
  // Level k covers windows of length 2^k; level 0 is the dense field itself.
  for (int k = 1; k < levels_; ++k) {
    const std::size_t half = std::size_t{1} << (k - 1);
    const std::size_t len = std::size_t{1} << k;
    const std::vector<double>& pmax = k == 1 ? dense_ : max_table_[k - 2];
    const std::vector<double>& pmin = k == 1 ? dense_ : min_table_[k - 2];
    std::vector<double>& cmax = max_table_[k - 1];
    std::vector<double>& cmin = min_table_[k - 1];
    for (std::size_t i = 0; i + len <= total; ++i) {
      cmax[i] = std::max(pmax[i], pmax[i + half]);
      cmin[i] = std::min(pmin[i], pmin[i + half]);
    }
  }

  const DenseGrid& g = lattice_.grid();
  const auto interior = lattice_.interior_nodes();
  parallel_for(interior.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const std::int64_t q = g.dense_of_node[interior[r]];
      double mx = -INFINITY;
      double mn = INFINITY;
      for (std::size_t grp = 0; grp < g.row_groups.size(); ++grp) {
        const RowGroup& rg = g.row_groups[grp];
        const auto lo = static_cast<std::size_t>(q + rg.lead_offset - rg.half_width);
        const auto hi = static_cast<std::size_t>(q + rg.lead_offset + rg.half_width);
        const int k = group_level_[grp];
        const std::size_t second = hi + 1 - (std::size_t{1} << k);
        const std::vector<double>& tmax = k == 0 ? dense_ : max_table_[k - 1];
        const std::vector<double>& tmin = k == 0 ? dense_ : min_table_[k - 1];
        mx = std::max({mx, tmax[lo], tmax[second]});
        mn = std::min({mn, tmin[lo], tmin[second]});
      }
      out[r] = 0.5 * mx + 0.5 * mn;
    }
  });
}

void StencilAggregator::mean(std::span<const double> field, std::span<double> out, int threads) {
  scatter(field);
  const DenseGrid& g = lattice_.grid();
  const auto interior = lattice_.interior_nodes();
  // Sums are taken relative to one reference value so a constant field
  // averages to itself exactly.
  const double ref = field[interior.front()];
  const auto row = static_cast<std::size_t>(g.extent[g.dim - 1]);
  for (std::size_t i = 0; i < dense_.size(); ++i) {
    const double d = g.node_of[i] >= 0 ? dense_[i] - ref : 0.0;
    prefix_[i] = (i % row == 0) ? d : prefix_[i - 1] + d;
  }
  const auto count = static_cast<double>(lattice_.stencil_offsets().size());
  parallel_for(interior.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const std::int64_t q = g.dense_of_node[interior[r]];
      double s = 0.0;
      for (const RowGroup& rg : g.row_groups) {
        // The collar padding keeps every window clear of the row start.
        const auto lo = static_cast<std::size_t>(q + rg.lead_offset - rg.half_width);
        const auto hi = static_cast<std::size_t>(q + rg.lead_offset + rg.half_width);
        s += prefix_[hi] - prefix_[lo - 1];
      }
      out[r] = ref + s / count;
    }
  });
}

std::vector<double> jump_weights(const Lattice& lattice, const ScalarFunction& coeff, const char* name) {
  const double eps2 = lattice.epsilon() * lattice.epsilon();
  std::vector<double> w;
  w.reserve(lattice.interior_nodes().size());
  for (NodeIndex n : lattice.interior_nodes()) {
    const double a = coeff(lattice.coord(n));
    const double p = a * eps2;
    if (!(a >= 0.0) || !(p <= 1.0)) {
      throw std::invalid_argument{
          fmt::format("{}: jump probability {} * eps^2 = {} at node {} is outside [0, 1]", name, a, p, n)};
    }
    w.push_back(p);
  }
  return w;
}

CoupledDpp::CoupledDpp(const Lattice& lattice, std::vector<BoardRule> boards, int threads)
    : lattice_{lattice}, rules_{std::move(boards)}, threads_{threads}, agg_{lattice} {
  const std::size_t ni = lattice.interior_nodes().size();
  for (const BoardRule& b : rules_) {
    if (!(b.alpha >= 0.0 && b.alpha <= 1.0)) throw std::invalid_argument{"mixing weight alpha must lie in [0, 1]"};
    if (b.exterior.size() != lattice.size()) throw std::invalid_argument{"terminal data size mismatch"};
    for (const auto& c : b.couplings) {
      if (c.source >= rules_.size() || c.weight.size() != ni) throw std::invalid_argument{"malformed board coupling"};
    }
  }
  for (std::size_t r = 0; r < ni; ++r) {
    for (const BoardRule& b : rules_) {
      double total = 0.0;
      for (const auto& c : b.couplings) total += c.weight[r];
      if (total > 1.0 + 1e-15) throw std::invalid_argument{"total jump probability exceeds 1"};
    }
  }
  tow_.resize(ni);
  mean_.resize(ni);
}

double CoupledDpp::apply(const Fields& in, Fields& out) {
  const auto interior = lattice_.interior_nodes();
  out.resize(rules_.size());
  double change = 0.0;
  for (std::size_t b = 0; b < rules_.size(); ++b) {
    const BoardRule& rule = rules_[b];
    if (rule.alpha > 0.0) agg_.tug_of_war(in[b], tow_, threads_);
    if (rule.alpha < 1.0) agg_.mean(in[b], mean_, threads_);
    std::vector<double>& dst = out[b];
    dst.resize(lattice_.size());
    for (std::size_t n = 0; n < dst.size(); ++n) {
      if (!lattice_.is_interior(n)) dst[n] = rule.exterior[n];
    }
    for (std::size_t r = 0; r < interior.size(); ++r) {
      const NodeIndex n = interior[r];
      double op;
      if (rule.alpha == 1.0) {
        op = tow_[r];
      } else if (rule.alpha == 0.0) {
        op = mean_[r];
      } else {
        op = mean_[r] + rule.alpha * (tow_[r] - mean_[r]);
      }
      // op + sum_j c_j (w_j - op), which fixes constants exactly.
      double value = op;
      for (const auto& c : rule.couplings) value += c.weight[r] * (in[c.source][n] - op);
      dst[n] = value;
      change = std::max(change, std::abs(value - in[b][n]));
    }
  }
  return change;
}

void CoupledDpp::pin_exterior(Fields& fields) const {
  fields.resize(rules_.size());
  for (std::size_t b = 0; b < rules_.size(); ++b) {
    fields[b].resize(lattice_.size());
    for (std::size_t n = 0; n < lattice_.size(); ++n) {
      if (!lattice_.is_interior(n)) fields[b][n] = rules_[b].exterior[n];
    }
  }
}

std::pair<double, double> CoupledDpp::exterior_range() const {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const BoardRule& b : rules_) {
    for (std::size_t n = 0; n < lattice_.size(); ++n) {
      if (lattice_.is_interior(n)) continue;
      lo = std::min(lo, b.exterior[n]);
      hi = std::max(hi, b.exterior[n]);
    }
  }
  return {lo, hi};
}

CoupledDpp::Fields CoupledDpp::constant_seed(double value) const {
  Fields f(rules_.size(), std::vector<double>(lattice_.size(), value));
  pin_exterior(f);
  return f;
}

std::pair<CoupledDpp::Fields, SolveReport> CoupledDpp::solve(Fields current, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument{"solver tolerance must be positive"};
  if (options.max_iter == 0) throw std::invalid_argument{"max_iter must be positive"};
  pin_exterior(current);
  double scale = 1.0;
  for (const auto& f : current) {
    for (double x : f) scale = std::max(scale, std::abs(x));
  }
  // Changes at this level are rounding noise, not progress.
  const double noise_floor = 1024.0 * DBL_EPSILON * scale;

  SolveReport report;
  Fields next;
  for (std::size_t k = 1; k <= options.max_iter; ++k) {
    const double change = apply(current, next);
    std::swap(current, next);
    report.residual_history.push_back(change);
    report.iterations = k;
    if (change <= noise_floor) {
      report.converged = true;
      break;
    }
    const auto& hist = report.residual_history;
    if (hist.size() >= 4) {
      const std::size_t first = hist.size() > kRatioWindow ? hist.size() - kRatioWindow : 1;
      double rho = 0.0;
      for (std::size_t j = first; j < hist.size(); ++j) {
        rho = std::max(rho, hist[j - 1] > 0.0 ? hist[j] / hist[j - 1] : 1.0);
      }
      report.contraction_estimate = rho;
      if (rho < 1.0 && change * rho / (1.0 - rho) < options.tol) {
        report.converged = true;
        break;
      }
    }
  }
  report.final_residual = apply(current, next);
  return {std::move(current), std::move(report)};
}

}  // namespace twoboard::detail
