#pragma once

// Test-only reference implementations. They share no code with the library
// beyond the value types, and favour plain loops over speed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "twoboard/lattice.hpp"

namespace oracle {

/// A board of a coupled one-dimensional DPP.
struct Board {
  double alpha = 1.0;                     // midrange weight
  std::vector<double> coupling;           // a_ij (diagonal ignored)
  std::function<double(double)> payoff;   // terminal data
};

/// Plain 1D lattice on [lo, hi]: nodes lo + k h for every k whose point is
/// inside or within eps of the interval.
struct Grid1D {
  std::vector<double> x;
  std::vector<bool> interior;
  std::vector<std::vector<std::size_t>> stencil;
};

inline Grid1D grid_1d(double lo, double hi, double h, double eps) {
  Grid1D g;
  const long kmin = static_cast<long>(std::floor(-eps / h - 1e-9));
  const long kmax = static_cast<long>(std::ceil((hi - lo + eps) / h + 1e-9));
  for (long k = kmin; k <= kmax; ++k) {
    const double x = lo + static_cast<double>(k) * h;
    const double tol = 1e-9 * h;
    const bool in = x > lo + tol && x < hi - tol;
    const double dist = in ? 0.0 : std::max(lo - x, x - hi);
    if (in || dist <= eps * (1.0 + 1e-9)) {
      g.x.push_back(x);
      g.interior.push_back(in);
    }
  }
  g.stencil.resize(g.x.size());
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    if (!g.interior[i]) continue;
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      if (std::abs(g.x[j] - g.x[i]) <= eps * (1.0 + 1e-9)) g.stencil[i].push_back(j);
    }
  }
  return g;
}

/// Picard iteration of the textbook update
///   w_i <- sum_j eps^2 a_ij w_j + (1 - eps^2 sum_j a_ij) (alpha_i T w_i + (1 - alpha_i) M w_i)
/// started from zero until a sweep changes nothing by more than 1e-15.
inline std::vector<std::vector<double>> picard_1d(const Grid1D& g, const std::vector<Board>& boards, double eps,
                                                  std::size_t max_sweeps = 2'000'000) {
  const std::size_t n = boards.size();
  const double e2 = eps * eps;
  std::vector<std::vector<double>> w(n, std::vector<double>(g.x.size(), 0.0));
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      if (!g.interior[k]) w[b][k] = boards[b].payoff(g.x[k]);
    }
  }
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    auto next = w;
    double change = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t k = 0; k < g.x.size(); ++k) {
        if (!g.interior[k]) continue;
        double mx = -1e300, mn = 1e300, sum = 0.0;
        for (std::size_t j : g.stencil[k]) {
          mx = std::max(mx, w[b][j]);
          mn = std::min(mn, w[b][j]);
          sum += w[b][j];
        }
        const double op = boards[b].alpha * (0.5 * (mx + mn)) +
                          (1.0 - boards[b].alpha) * (sum / static_cast<double>(g.stencil[k].size()));
        double jump = 0.0, total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == b) continue;
          jump += e2 * boards[b].coupling[j] * w[j][k];
          total += e2 * boards[b].coupling[j];
        }
        next[b][k] = jump + (1.0 - total) * op;
        change = std::max(change, std::abs(next[b][k] - w[b][k]));
      }
    }
    w.swap(next);
    if (change < 1e-15) break;
  }
  return w;
}

/// One sweep of the two-board update computed directly from the stencil
/// lists of a library lattice (no row decomposition, no prefix sums).
inline void sweep_brute(const twoboard::Lattice& lat, const std::vector<double>& u, const std::vector<double>& v,
                        double a_eps2, double b_eps2, double alpha1, double alpha2, std::vector<double>& u_out,
                        std::vector<double>& v_out) {
  u_out.assign(lat.f_values().begin(), lat.f_values().end());
  v_out.assign(lat.g_values().begin(), lat.g_values().end());
  for (twoboard::NodeIndex n : lat.interior_nodes()) {
    double umx = -1e300, umn = 1e300, usum = 0.0, vmx = -1e300, vmn = 1e300, vsum = 0.0;
    const auto st = lat.stencil(n);
    for (twoboard::NodeIndex y : st) {
      umx = std::max(umx, u[y]);
      umn = std::min(umn, u[y]);
      usum += u[y];
      vmx = std::max(vmx, v[y]);
      vmn = std::min(vmn, v[y]);
      vsum += v[y];
    }
    const double cnt = static_cast<double>(st.size());
    const double opu = alpha1 * 0.5 * (umx + umn) + (1.0 - alpha1) * usum / cnt;
    const double opv = alpha2 * 0.5 * (vmx + vmn) + (1.0 - alpha2) * vsum / cnt;
    u_out[n] = a_eps2 * v[n] + (1.0 - a_eps2) * opu;
    v_out[n] = b_eps2 * u[n] + (1.0 - b_eps2) * opv;
  }
}

/// Linear limit system -A u'' + a (u - v) = 0, -B v'' + b (v - u) = 0 on
/// [0, 1] by shooting: RK4 for the base solution and the two unit-slope
/// solutions, then a 2x2 solve for the initial slopes. Returns (u, v) at xs.
inline std::vector<std::array<double, 2>> shooting_1d(double f0, double f1, double g0, double g1, double A, double B,
                                                      double a, double b, const std::vector<double>& xs,
                                                      int steps = 20000) {
  using State = std::array<double, 4>;  // u, v, u', v'
  auto rhs = [&](const State& s) {
    return State{s[2], s[3], a / A * (s[0] - s[1]), b / B * (s[1] - s[0])};
  };
  auto integrate = [&](State s, std::vector<State>* samples) {
    const double h = 1.0 / steps;
    std::size_t next = 0;
    for (int i = 0; i <= steps; ++i) {
      const double x = i * h;
      while (samples && next < xs.size() && std::abs(xs[next] - x) < 0.5 * h) {
        (*samples)[next++] = s;
      }
      if (i == steps) break;
      const State k1 = rhs(s);
      State t;
      for (int j = 0; j < 4; ++j) t[j] = s[j] + 0.5 * h * k1[j];
      const State k2 = rhs(t);
      for (int j = 0; j < 4; ++j) t[j] = s[j] + 0.5 * h * k2[j];
      const State k3 = rhs(t);
      for (int j = 0; j < 4; ++j) t[j] = s[j] + h * k3[j];
      const State k4 = rhs(t);
      for (int j = 0; j < 4; ++j) s[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    return s;
  };
  const State base = integrate({f0, g0, 0, 0}, nullptr);
  const State e1 = integrate({0, 0, 1, 0}, nullptr);
  const State e2 = integrate({0, 0, 0, 1}, nullptr);
  // [e1.u e2.u; e1.v e2.v] [s; t] = [f1 - base.u; g1 - base.v]
  const double det = e1[0] * e2[1] - e2[0] * e1[1];
  const double s = ((f1 - base[0]) * e2[1] - e2[0] * (g1 - base[1])) / det;
  const double t = (e1[0] * (g1 - base[1]) - (f1 - base[0]) * e1[1]) / det;
  std::vector<State> samples(xs.size());
  integrate({f0, g0, s, t}, &samples);
  std::vector<std::array<double, 2>> out;
  for (const auto& st : samples) out.push_back({st[0], st[1]});
  return out;
}

/// Rejection-sampling estimate of the mean of z_1^2 over the unit ball.
inline double kappa_rejection(int dim, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double s = 0.0;
  std::size_t accepted = 0;
  while (accepted < samples) {
    double r2 = 0.0, z1 = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double z = u(gen);
      if (i == 0) z1 = z;
      r2 += z * z;
    }
    if (r2 > 1.0) continue;
    s += z1 * z1;
    ++accepted;
  }
  return s / static_cast<double>(samples);
}

}  // namespace oracle
