#include "twoboard/pde_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <lapacke.h>

#include "twoboard/parallel.hpp"
#include "twoboard/rng.hpp"

namespace twoboard {

namespace {

constexpr double kGradientFloor = 1e-8;

std::array<double, kMaxDim> padded(const std::vector<double>& v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument{std::string{what} + ": dimension mismatch"};
  std::array<double, kMaxDim> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

double quad_form(const Hessian& m, const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) s += a[i] * m[i][j] * b[j];
  }
  return s;
}

double interp(const std::vector<double>& grid, const std::vector<double>& y, double x) {
  if (x <= grid.front()) return y.front();
  if (x >= grid.back()) return y.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return y[i - 1] + t * (y[i] - y[i - 1]);
}

}  // namespace

double kappa(int dim) {
  if (dim < 1) throw std::invalid_argument{"kappa: dimension must be at least 1"};
  return 1.0 / static_cast<double>(dim + 2);
}

double kappa_monte_carlo(int dim, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument{"kappa_monte_carlo: need at least one sample"};
  RngStream rng(seed, 0);
  double s = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double z = rng.uniform_in_ball(dim, 1.0)[0];
    s += z * z;
  }
  return s / static_cast<double>(samples);
}

double stencil_kappa(const Lattice& lattice, std::size_t node, int axis) {
  if (!lattice.is_interior(node)) throw std::invalid_argument{"stencil_kappa: node is not interior"};
  if (axis < 0 || axis >= lattice.dim()) throw std::invalid_argument{"stencil_kappa: axis out of range"};
  const double scale = lattice.h() / lattice.epsilon();
  double s = 0.0;
  const auto offsets = lattice.stencil_offsets();
  for (const auto& o : offsets) {
    const double t = o[axis] * scale;
    s += t * t;
  }
  return s / static_cast<double>(offsets.size());
}

double stencil_kappa(const Lattice& lattice, std::size_t node) { return stencil_kappa(lattice, node, 0); }

TestFunction TestFunction::affine(std::vector<double> b, double c) {
  TestFunction f;
  f.family_ = Family::Affine;
  f.dim_ = static_cast<int>(b.size());
  Point(f.dim_);  // validates the dimension
  f.b_ = padded(b, f.dim_, "affine");
  f.c_ = c;
  return f;
}

TestFunction TestFunction::quadratic(std::vector<std::vector<double>> q, std::vector<double> b, double c) {
  TestFunction f;
  f.family_ = Family::Quadratic;
  f.dim_ = static_cast<int>(b.size());
  Point(f.dim_);
  f.b_ = padded(b, f.dim_, "quadratic");
  if (static_cast<int>(q.size()) != f.dim_) throw std::invalid_argument{"quadratic: Q has the wrong size"};
  for (int i = 0; i < f.dim_; ++i) {
    const auto row = padded(q[i], f.dim_, "quadratic");
    for (int j = 0; j < f.dim_; ++j) f.q_[i][j] = row[j];
  }
  for (int i = 0; i < f.dim_; ++i) {
    for (int j = 0; j < i; ++j) {
      if (f.q_[i][j] != f.q_[j][i]) throw std::invalid_argument{"quadratic: Q must be symmetric"};
    }
  }
  f.c_ = c;
  return f;
}

TestFunction TestFunction::norm_power(int dim, double p) {
  TestFunction f;
  f.family_ = Family::NormPower;
  f.dim_ = Point(dim).dim();
  f.p_ = p;
  return f;
}

TestFunction TestFunction::coordinate_product(int dim) {
  TestFunction f;
  f.family_ = Family::CoordinateProduct;
  f.dim_ = Point(dim).dim();
  return f;
}

double TestFunction::value(const Point& x) const {
  require_same_dim(x, dim_, "TestFunction");
  switch (family_) {
    case Family::Affine: {
      double s = c_;
      for (int i = 0; i < dim_; ++i) s += b_[i] * x[i];
      return s;
    }
    case Family::Quadratic: {
      double s = c_ + 0.5 * quad_form(q_, x, x);
      for (int i = 0; i < dim_; ++i) s += b_[i] * x[i];
      return s;
    }
    case Family::NormPower: return std::pow(x.norm(), p_);
    case Family::CoordinateProduct: {
      double s = 1.0;
      for (int i = 0; i < dim_; ++i) s *= x[i];
      return s;
    }
  }
  return 0.0;
}

Point TestFunction::gradient(const Point& x) const {
  require_same_dim(x, dim_, "TestFunction");
  Point g(dim_);
  switch (family_) {
    case Family::Affine:
      for (int i = 0; i < dim_; ++i) g[i] = b_[i];
      break;
    case Family::Quadratic:
      for (int i = 0; i < dim_; ++i) {
        g[i] = b_[i];
        for (int j = 0; j < dim_; ++j) g[i] += q_[i][j] * x[j];
      }
      break;
    case Family::NormPower: {
      const double r = x.norm();
      if (r == 0.0) {
        if (p_ <= 1.0) throw std::domain_error{"norm_power: gradient undefined at the origin"};
        break;
      }
      g = x * (p_ * std::pow(r, p_ - 2.0));
      break;
    }
    case Family::CoordinateProduct:
      for (int i = 0; i < dim_; ++i) {
        double s = 1.0;
        for (int j = 0; j < dim_; ++j) {
          if (j != i) s *= x[j];
        }
        g[i] = s;
      }
      break;
  }
  return g;
}

Hessian TestFunction::hessian(const Point& x) const {
  require_same_dim(x, dim_, "TestFunction");
  Hessian m{};
  switch (family_) {
    case Family::Affine: break;
    case Family::Quadratic: m = q_; break;
    case Family::NormPower: {
      const double r = x.norm();
      if (r == 0.0) {
        if (p_ < 2.0) throw std::domain_error{"norm_power: Hessian undefined at the origin"};
        if (p_ == 2.0) {
          for (int i = 0; i < dim_; ++i) m[i][i] = 2.0;
        }
        break;
      }
      const double a = p_ * std::pow(r, p_ - 2.0);
      for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) m[i][j] = a * ((i == j ? 1.0 : 0.0) + (p_ - 2.0) * x[i] * x[j] / (r * r));
      }
      break;
    }
    case Family::CoordinateProduct:
      for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
          if (i == j) continue;
          double s = 1.0;
          for (int k = 0; k < dim_; ++k) {
            if (k != i && k != j) s *= x[k];
          }
          m[i][j] = s;
        }
      }
      break;
  }
  return m;
}

double infinity_laplacian(const TestFunction& phi, const Point& x) {
  const Point g = phi.gradient(x);
  const double n2 = g.squared_norm();
  if (std::sqrt(n2) < kGradientFloor) throw std::domain_error{"infinity_laplacian: gradient vanishes at the probe"};
  return quad_form(phi.hessian(x), g, g) / n2;
}

double laplacian(const TestFunction& psi, const Point& x) {
  const Hessian m = psi.hessian(x);
  double s = 0.0;
  for (int i = 0; i < psi.dim(); ++i) s += m[i][i];
  return s;
}

std::vector<double> symmetric_eigenvalues(const Hessian& m, int dim) {
  std::vector<double> a(static_cast<std::size_t>(dim * dim));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a[static_cast<std::size_t>(i * dim + j)] = m[i][j];
  }
  std::vector<double> w(static_cast<std::size_t>(dim));
  const lapack_int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', dim, a.data(), dim, w.data());
  if (info != 0) throw std::runtime_error{fmt::format("symmetric_eigenvalues: dsyev failed with info = {}", info)};
  return w;
}

double f1_upper_envelope(const Point& xi, const Hessian& m) {
  const double n2 = xi.squared_norm();
  if (n2 > 0.0) return -quad_form(m, xi, xi) / n2;
  return std::max(-symmetric_eigenvalues(m, xi.dim()).front(), 0.0);
}

double f1_lower_envelope(const Point& xi, const Hessian& m) {
  const double n2 = xi.squared_norm();
  if (n2 > 0.0) return -quad_form(m, xi, xi) / n2;
  return std::min(-symmetric_eigenvalues(m, xi.dim()).back(), 0.0);
}

ConsistencyResidual consistency_residual(const TestFunction& phi, const TestFunction& psi, const Point& x,
                                         const Lattice& lattice) {
  const auto node = lattice.nearest_node(x);
  if (!node || !lattice.is_interior(*node) || distance(lattice.coord(*node), x) > 1e-9 * lattice.h()) {
    throw std::invalid_argument{"consistency_residual: probe must be an interior lattice node"};
  }
  const Point xn = lattice.coord(*node);
  const double eps2 = lattice.epsilon() * lattice.epsilon();
  const double lap_inf = infinity_laplacian(phi, xn);

  double mx = -INFINITY, mn = INFINITY, sum = 0.0;
  const double psi0 = psi.value(xn);
  const auto st = lattice.stencil(*node);
  for (NodeIndex y : st) {
    const Point p = lattice.coord(y);
    const double a = phi.value(p);
    mx = std::max(mx, a);
    mn = std::min(mn, a);
    sum += psi.value(p) - psi0;
  }
  const double tow = 0.5 * mx + 0.5 * mn - phi.value(xn);
  const double mean = sum / static_cast<double>(st.size());
  const double ks = stencil_kappa(lattice, *node);
  ConsistencyResidual r;
  r.r1 = std::abs((1.0 - eps2) * tow / eps2 - 0.5 * lap_inf);
  r.r2 = std::abs((1.0 - eps2) * mean / eps2 - 0.5 * ks * laplacian(psi, xn));
  return r;
}

double ReferenceSolution1D::u_at(double x) const { return interp(grid, u, x); }
double ReferenceSolution1D::v_at(double x) const { return interp(grid, v, x); }

ReferenceSolution1D solve_reference_1d(const BoundaryPair& f, const BoundaryPair& g, std::size_t mesh_n,
                                       const ReferenceCoefficients& c) {
  if (mesh_n < 100) throw std::invalid_argument{"solve_reference_1d: mesh_n must be at least 100"};
  if (!(c.lo < c.hi)) throw std::invalid_argument{"solve_reference_1d: empty interval"};
  if (!(c.diff_u > 0.0 && c.diff_v > 0.0 && c.couple_u >= 0.0 && c.couple_v >= 0.0)) {
    throw std::invalid_argument{"solve_reference_1d: diffusions must be positive and couplings nonnegative"};
  }
  const double h = (c.hi - c.lo) / static_cast<double>(mesh_n);
  const double h2 = h * h;
  const auto m = static_cast<lapack_int>(2 * (mesh_n - 1));  // unknowns u_1, v_1, ..., u_{n-1}, v_{n-1}
  const lapack_int kl = 2, ku = 2, ldab = 2 * kl + ku + 1;
  // Column-major band storage with kl extra rows for the LU fill-in.
  std::vector<double> ab(static_cast<std::size_t>(ldab * m), 0.0);
  auto at = [&](lapack_int row, lapack_int col) -> double& {
    return ab[static_cast<std::size_t>(col * ldab + (kl + ku + row - col))];
  };
  std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);

  // Unknowns are deviations from the linear interpolants of the boundary
  // data, so the second differences of the lift vanish and data that is
  // already a solution yields a zero right-hand side. Equations are scaled
  // by h^2:
  //   -D (w_{i-1} - 2 w_i + w_{i+1}) + c h^2 (w_i - w_other) = -c h^2 (lift_w - lift_other).
  auto lift = [&](const BoundaryPair& bc, std::size_t i) {
    const double t = static_cast<double>(i) / static_cast<double>(mesh_n);
    return bc.left + (bc.right - bc.left) * t;
  };
  auto assemble = [&](auto&& add) {
    for (std::size_t i = 1; i < mesh_n; ++i) {
      for (int comp = 0; comp < 2; ++comp) {
        const double d = comp == 0 ? c.diff_u : c.diff_v;
        const double k = comp == 0 ? c.couple_u : c.couple_v;
        const auto row = static_cast<lapack_int>(2 * (i - 1) + comp);
        add(row, row, 2.0 * d + k * h2);
        add(row, row + (comp == 0 ? 1 : -1), -k * h2);
        if (i > 1) add(row, row - 2, -d);
        if (i + 1 < mesh_n) add(row, row + 2, -d);
      }
    }
  };
  assemble([&](lapack_int r, lapack_int col, double val) { at(r, col) += val; });
  for (std::size_t i = 1; i < mesh_n; ++i) {
    const double gap = lift(f, i) - lift(g, i);
    rhs[2 * (i - 1)] = gap == 0.0 ? 0.0 : -c.couple_u * h2 * gap;
    rhs[2 * (i - 1) + 1] = gap == 0.0 ? 0.0 : c.couple_v * h2 * gap;
  }
  const std::vector<double> b0 = rhs;

  std::vector<lapack_int> ipiv(static_cast<std::size_t>(m));
  const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, m, kl, ku, 1, ab.data(), ldab, ipiv.data(), rhs.data(), m);
  if (info != 0) throw std::runtime_error{fmt::format("solve_reference_1d: banded solve failed, info = {}", info)};

  ReferenceSolution1D out;
  out.grid.resize(mesh_n + 1);
  out.u.resize(mesh_n + 1);
  out.v.resize(mesh_n + 1);
  for (std::size_t i = 0; i <= mesh_n; ++i) out.grid[i] = c.lo + static_cast<double>(i) * h;
  out.grid.back() = c.hi;
  out.u.front() = f.left;
  out.u.back() = f.right;
  out.v.front() = g.left;
  out.v.back() = g.right;
  for (std::size_t i = 1; i < mesh_n; ++i) {
    out.u[i] = lift(f, i) + rhs[2 * (i - 1)];
    out.v[i] = lift(g, i) + rhs[2 * (i - 1) + 1];
  }

  // Residual of the scaled system at the computed deviations.
  std::vector<double> ax(static_cast<std::size_t>(m), 0.0);
  assemble([&](lapack_int row, lapack_int col, double val) { ax[row] += val * rhs[col]; });
  double res = 0.0;
  for (lapack_int i = 0; i < m; ++i) res = std::max(res, std::abs(ax[i] - b0[i]));
  out.residual = res;
  return out;
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceInput& in) {
  if (in.epsilons.empty()) throw std::invalid_argument{"convergence_study: empty epsilon list"};
  const bool one_d = in.domain.dim() == 1;
  const std::size_t levels = in.epsilons.size();
  std::vector<std::unique_ptr<Lattice>> lattices(levels);
  std::vector<ValuePair> sols(levels);
  std::vector<ConvergenceRow> rows(levels);

  SolveOptions per = in.options;
  const int outer = std::max(1, std::min<int>(in.options.threads, static_cast<int>(levels)));
  per.threads = std::max(1, in.options.threads / outer);
  parallel_for(levels, outer, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double eps = in.epsilons[k];
      lattices[k] = std::make_unique<Lattice>(build_lattice(in.domain, in.payoff, in.h_ratio * eps, eps));
      auto [sol, rep] = solve_fixed_point(*lattices[k], in.params, Seed::lower(), per);
      sols[k] = std::move(sol);
      rows[k].epsilon = eps;
      rows[k].h = lattices[k]->h();
      rows[k].iterations = rep.iterations;
      rows[k].stencil_kappa = stencil_kappa(*lattices[k], lattices[k]->interior_nodes().front());
    }
  });

  if (one_d) {
    if (!in.params.jump_coeff_1.is_constant() || !in.params.jump_coeff_2.is_constant()) {
      throw std::invalid_argument{"convergence_study: the 1D reference needs constant jump coefficients"};
    }
    const double lo = in.domain.lo()[0], hi = in.domain.hi()[0];
    const BoundaryPair f{in.payoff.f_bar(Point{lo}), in.payoff.f_bar(Point{hi})};
    const BoundaryPair g{in.payoff.g_bar(Point{lo}), in.payoff.g_bar(Point{hi})};
    auto coefficients = [&](double k) {
      ReferenceCoefficients c;
      c.lo = lo;
      c.hi = hi;
      c.diff_u = 0.5 * in.params.mix_alpha_1 + 0.5 * k * (1.0 - in.params.mix_alpha_1);
      c.diff_v = 0.5 * in.params.mix_alpha_2 + 0.5 * k * (1.0 - in.params.mix_alpha_2);
      c.couple_u = in.params.jump_coeff_1.value();
      c.couple_v = in.params.jump_coeff_2.value();
      return c;
    };
    const auto exact = solve_reference_1d(f, g, in.reference_mesh, coefficients(kappa(1)));
    for (std::size_t k = 0; k < levels; ++k) {
      const auto ref = solve_reference_1d(f, g, in.reference_mesh, coefficients(rows[k].stencil_kappa));
      double d = 0.0, de = 0.0;
      for (NodeIndex n : lattices[k]->interior_nodes()) {
        const double x = lattices[k]->coord(n)[0];
        d = std::max({d, std::abs(sols[k].u[n] - ref.u_at(x)), std::abs(sols[k].v[n] - ref.v_at(x))});
        de = std::max({de, std::abs(sols[k].u[n] - exact.u_at(x)), std::abs(sols[k].v[n] - exact.v_at(x))});
      }
      rows[k].distance = d;
      rows[k].distance_exact_kappa = de;
    }
    return rows;
  }

  for (std::size_t k = 0; k < levels; ++k) {
    rows[k].distance_exact_kappa = std::numeric_limits<double>::quiet_NaN();
    if (k + 1 == levels) {
      rows[k].distance = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const Lattice& coarse = *lattices[k];
    const Lattice& fine = *lattices[k + 1];
    double d = 0.0;
    std::size_t matched = 0;
    for (NodeIndex n : coarse.interior_nodes()) {
      const Point x = coarse.coord(n);
      const auto m = fine.nearest_node(x);
      if (!m || distance(fine.coord(*m), x) > 1e-6 * fine.h()) continue;
      ++matched;
      d = std::max({d, std::abs(sols[k].u[n] - sols[k + 1].u[*m]), std::abs(sols[k].v[n] - sols[k + 1].v[*m])});
    }
    if (matched == 0) throw std::invalid_argument{"convergence_study: successive lattices share no nodes"};
    rows[k].distance = d;
  }
  return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
  out << "epsilon,h,iterations,stencil_kappa,distance,distance_exact_kappa\n";
  for (const auto& r : rows) {
    out << fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", r.epsilon, r.h, r.iterations, r.stencil_kappa,
                       r.distance, r.distance_exact_kappa);
  }
}

}  // namespace twoboard
