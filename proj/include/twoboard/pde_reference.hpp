#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "twoboard/dpp_solver.hpp"
#include "twoboard/lattice.hpp"
#include "twoboard/point.hpp"

namespace twoboard {

/// kappa(N) = (1/|B_1|) int_{B_1} z_1^2 dz = 1/(N+2). Throws for N < 1.
double kappa(int dim);

/// Monte Carlo estimate of the defining integral of kappa from `samples`
/// uniform points of the unit ball (stream of the given seed).
double kappa_monte_carlo(int dim, std::size_t samples, std::uint64_t seed);

/// Mean over the stencil of node of ((y - x)_1 / eps)^2, the effective kappa
/// of the discrete mean operator. Throws for collar nodes.
double stencil_kappa(const Lattice& lattice, std::size_t node);
/// Same quantity along coordinate axis `axis`.
double stencil_kappa(const Lattice& lattice, std::size_t node, int axis);

using Hessian = std::array<std::array<double, kMaxDim>, kMaxDim>;

/// Smooth test function with closed-form derivatives.
///   affine      <b, x> + c
///   quadratic   1/2 x^T Q x + <b, x> + c
///   norm_power  |x|^p
///   coordinate_product  x_1 * ... * x_N
class TestFunction {
 public:
  enum class Family { Affine, Quadratic, NormPower, CoordinateProduct };

  static TestFunction affine(std::vector<double> b, double c);
  static TestFunction quadratic(std::vector<std::vector<double>> q, std::vector<double> b, double c);
  static TestFunction norm_power(int dim, double p);
  static TestFunction coordinate_product(int dim);

  Family family() const noexcept { return family_; }
  int dim() const noexcept { return dim_; }
  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  Hessian hessian(const Point& x) const;

 private:
  TestFunction() = default;
  Family family_ = Family::Affine;
  int dim_ = 1;
  Hessian q_{};
  std::array<double, kMaxDim> b_{};
  double c_ = 0.0;
  double p_ = 2.0;
};

/// <D^2 phi g, g> / |g|^2 with g the gradient; throws when |g| < 1e-8.
double infinity_laplacian(const TestFunction& phi, const Point& x);
double laplacian(const TestFunction& psi, const Point& x);

/// Upper and lower semicontinuous envelopes of F_1(xi, M) = -<M xi, xi>/|xi|^2
/// (F_1(0, M) = 0). At xi = 0 they equal max(-lambda_min, 0) and
/// min(-lambda_max, 0).
double f1_upper_envelope(const Point& xi, const Hessian& m);
double f1_lower_envelope(const Point& xi, const Hessian& m);
/// Eigenvalues of the leading dim x dim block, ascending.
std::vector<double> symmetric_eigenvalues(const Hessian& m, int dim);

struct ConsistencyResidual {
  double r1 = 0.0;  // midrange operator against 1/2 Delta_inf phi
  double r2 = 0.0;  // mean operator against (kappa_stencil / 2) Delta psi
};

/// Defects of the rescaled one-board operators at a lattice node x:
///   r1 = |(1 - eps^2)(1/2 max phi + 1/2 min phi - phi(x)) / eps^2 - 1/2 Delta_inf phi(x)|
///   r2 = |(1 - eps^2)(mean psi - psi(x)) / eps^2 - kappa_s/2 Delta psi(x)|
/// Both go to zero as eps -> 0 with h/eps fixed. x must coincide with an
/// interior node; the gradient of phi at x must not vanish.
ConsistencyResidual consistency_residual(const TestFunction& phi, const TestFunction& psi, const Point& x,
                                         const Lattice& lattice);

/// Dirichlet data at the two ends of an interval.
struct BoundaryPair {
  double left = 0.0;
  double right = 0.0;
};

/// Coefficients of the linear limit system on [lo, hi]
///   -diff_u u'' + couple_u (u - v) = 0,   -diff_v v'' + couple_v (v - u) = 0.
/// Defaults: diff_u = 1/2, diff_v = kappa(1)/2, unit couplings.
struct ReferenceCoefficients {
  double lo = 0.0;
  double hi = 1.0;
  double diff_u = 0.5;
  double diff_v = 1.0 / 6.0;
  double couple_u = 1.0;
  double couple_v = 1.0;
};

struct ReferenceSolution1D {
  std::vector<double> grid;
  std::vector<double> u, v;
  /// Sup norm of the residual of the h^2-scaled linear system.
  double residual = 0.0;

  /// Piecewise linear interpolation; clamps outside the mesh.
  double u_at(double x) const;
  double v_at(double x) const;
};

/// Second-order central differences on mesh_n uniform cells, solved as one
/// banded system with interleaved unknowns. Requires mesh_n >= 100.
ReferenceSolution1D solve_reference_1d(const BoundaryPair& f, const BoundaryPair& g, std::size_t mesh_n,
                                       const ReferenceCoefficients& coeffs = {});

struct ConvergenceRow {
  double epsilon = 0.0;
  double h = 0.0;
  std::size_t iterations = 0;
  double stencil_kappa = 0.0;
  /// 1D: sup distance to the reference built with the stencil kappa.
  /// Trend mode: sup distance to the next finer epsilon (NaN on the last row).
  double distance = 0.0;
  /// 1D only: sup distance to the reference built with kappa(1).
  double distance_exact_kappa = 0.0;
};

struct ConvergenceInput {
  Domain domain;
  PayoffData payoff;
  std::vector<double> epsilons;
  double h_ratio = 0.125;  // h = h_ratio * eps
  DppParams params;
  SolveOptions options;
  std::size_t reference_mesh = 4000;
};

/// 1D domains compare against the reference solution of the limit system;
/// other domains run in trend mode. Rows follow the order of `epsilons`.
std::vector<ConvergenceRow> convergence_study(const ConvergenceInput& input);

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out);

}  // namespace twoboard
