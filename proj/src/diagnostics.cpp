#include "twoboard/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twoboard/parallel.hpp"

namespace twoboard {

MeanSe mean_and_se(const std::vector<double>& samples) {
  MeanSe out;
  double mean = 0.0, m2 = 0.0;
  for (double s : samples) {
    ++out.count;
    const double d = s - mean;
    mean += d / static_cast<double>(out.count);
    m2 += d * (s - mean);
  }
  out.mean = mean;
  if (out.count > 1) out.se = std::sqrt(m2 / static_cast<double>(out.count - 1) / static_cast<double>(out.count));
  return out;
}

MartingaleReport martingale_diagnostic(const std::vector<EpisodeTrace>& traces, double epsilon, const Point& target,
                                       std::size_t bins, std::size_t min_count) {
  if (bins == 0) throw std::invalid_argument{"martingale_diagnostic: bins must be positive"};
  const double e3 = epsilon * epsilon * epsilon;
  std::vector<double> dist, incr;
  for (const auto& t : traces) {
    if (t.mode != GameMode::TowOnly) throw std::invalid_argument{"martingale_diagnostic: traces must be tow_only"};
    if (t.states.size() != t.tau + 1) throw std::invalid_argument{"martingale_diagnostic: traces lack states"};
    for (std::size_t k = 0; k + 1 < t.states.size(); ++k) {
      const double r0 = distance(t.states[k].x, target);
      const double r1 = distance(t.states[k + 1].x, target);
      const double n0 = r0 + std::ldexp(e3, -static_cast<int>(std::min<std::size_t>(k, 2000)));
      const double n1 = r1 + std::ldexp(e3, -static_cast<int>(std::min<std::size_t>(k + 1, 2000)));
      dist.push_back(r0);
      incr.push_back(n1 - n0);
    }
  }
  MartingaleReport rep;
  rep.second_moment_floor = epsilon * epsilon / 3.0;
  if (incr.empty()) return rep;

  const double top = *std::max_element(dist.begin(), dist.end());
  const double width = top > 0.0 ? top / static_cast<double>(bins) : 1.0;
  std::vector<std::vector<double>> per_bin(bins);
  std::vector<double> squares;
  squares.reserve(incr.size());
  for (std::size_t i = 0; i < incr.size(); ++i) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(dist[i] / width));
    per_bin[b].push_back(incr[i]);
    squares.push_back(incr[i] * incr[i]);
  }
  rep.drift_ok = true;
  bool any = false;
  for (std::size_t b = 0; b < bins; ++b) {
    DriftBin bin{width * static_cast<double>(b), width * static_cast<double>(b + 1), mean_and_se(per_bin[b])};
    if (bin.drift.count >= min_count) {
      if (!any || bin.drift.mean > rep.max_drift) {
        rep.max_drift = bin.drift.mean;
        rep.max_drift_se = bin.drift.se;
      }
      any = true;
      if (bin.drift.mean > 3.0 * bin.drift.se) rep.drift_ok = false;
    }
    rep.bins.push_back(bin);
  }
  rep.second_moment = mean_and_se(squares);
  rep.second_moment_ok = rep.second_moment.mean >= rep.second_moment_floor - 3.0 * rep.second_moment.se;
  return rep;
}

ExitTimeReport exit_time_stats(const std::vector<EpisodeTrace>& traces, double epsilon, const Point& x0,
                               const Point& target, double far_radius) {
  ExitTimeReport rep;
  std::vector<double> taus, sq, far;
  for (const auto& t : traces) {
    if (t.mode == GameMode::Full) throw std::invalid_argument{"exit_time_stats: traces must come from a single-board mode"};
    if (t.capped) {
      ++rep.capped;
      continue;
    }
    const double d = distance(t.exit_state.x, target);
    taus.push_back(static_cast<double>(t.tau));
    sq.push_back(d * d);
    if (far_radius > 0.0) far.push_back(d >= far_radius ? 1.0 : 0.0);
  }
  const double r2 = (x0 - target).squared_norm();
  rep.tau_bound = 4.0 * r2 / (epsilon * epsilon);
  rep.sq_distance_bound = 2.0 * r2;
  rep.tau = mean_and_se(taus);
  rep.exit_sq_distance = mean_and_se(sq);
  rep.far_exit_fraction = mean_and_se(far);
  rep.tau_ok = rep.tau.count > 0 && rep.tau.mean <= rep.tau_bound + 3.0 * rep.tau.se;
  rep.sq_distance_ok = rep.exit_sq_distance.count > 0 &&
                       rep.exit_sq_distance.mean <= rep.sq_distance_bound + 3.0 * rep.exit_sq_distance.se;
  return rep;
}

CouplingReport coupling_diagnostic(const Point& x0, const Point& z0, int board, const Strategy& s1, const Strategy& s2,
                                   std::size_t n, const GameSetup& setup, std::uint64_t master_seed, int threads) {
  if (!setup.domain.contains(x0) || !setup.domain.contains(z0)) {
    throw std::invalid_argument{"coupling_diagnostic: both starting points must lie in the domain"};
  }
  const std::size_t cap = setup.cap != 0 ? setup.cap : default_cap(setup.domain, setup.epsilon);
  const double sep0 = distance(x0, z0);
  std::vector<double> gap(n, 0.0), sep_err(n, 0.0), steps(n, 0.0);
  std::vector<std::uint8_t> done(n, 0);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      RngStream rng(master_seed, e);
      GameState x{x0, board}, z{z0, board};
      EpisodeCounters counters;
      std::size_t k = 0;
      while (setup.domain.contains(x.x) && setup.domain.contains(z.x) && k < cap) {
        const StepResult r = step(x, s1, s2, rng, setup.epsilon, setup.mode, counters);
        z.x += r.state.x - x.x;
        z.board = r.state.board;
        x = r.state;
        ++k;
        sep_err[e] = std::max(sep_err[e], std::abs(distance(x.x, z.x) - sep0));
      }
      steps[e] = static_cast<double>(k);
      if (k == cap && setup.domain.contains(x.x) && setup.domain.contains(z.x)) continue;
      const ScalarFunction& pay = x.board == 1 ? setup.payoff.f_bar : setup.payoff.g_bar;
      gap[e] = std::abs(pay(x.x) - pay(z.x));
      done[e] = 1;
    }
  });
  CouplingReport rep;
  std::vector<double> used;
  for (std::size_t e = 0; e < n; ++e) {
    rep.max_separation_error = std::max(rep.max_separation_error, sep_err[e]);
    rep.mean_steps += steps[e] / static_cast<double>(n);
    if (!done[e]) continue;
    used.push_back(gap[e]);
    rep.max_gap = std::max(rep.max_gap, gap[e]);
  }
  rep.payoff_gap = mean_and_se(used);
  return rep;
}

KernelStats kernel_statistics(const GameState& state, const Strategy& s1, const Strategy& s2, double epsilon,
                              std::size_t steps, std::uint64_t master_seed) {
  RngStream rng(master_seed, 0);
  KernelStats ks;
  for (std::size_t i = 0; i < steps; ++i) {
    EpisodeCounters counters;
    const StepResult r = step(state, s1, s2, rng, epsilon, GameMode::Full, counters);
    ++ks.steps;
    if (r.event == StepEvent::Jump) {
      ++ks.jumps;
    } else if (r.event == StepEvent::PlayerOne || r.event == StepEvent::PlayerTwo) {
      ++ks.tosses;
      if (r.event == StepEvent::PlayerOne) ++ks.player_one;
    }
  }
  return ks;
}

}  // namespace twoboard
