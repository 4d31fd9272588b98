#pragma once

#include <string>
#include <vector>

#include "twoboard/point.hpp"
#include "twoboard/scalar_function.hpp"

namespace twoboard {

enum class Shape { Interval, Box, Ball, Annulus };

std::string to_string(Shape shape);
Shape shape_from_string(const std::string& name);

/// Bounded open region Omega. Every supported shape has the uniform exterior
/// ball property.
class Domain {
 public:
  static Domain interval(double a, double b);
  static Domain box(std::vector<double> lo, std::vector<double> hi);
  static Domain ball(std::vector<double> center, double radius);
  static Domain annulus(std::vector<double> center, double r_in, double r_out);

  Shape shape() const noexcept { return shape_; }
  int dim() const noexcept { return dim_; }

  // Shape parameters (meaning depends on shape).
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }
  const std::vector<double>& center() const noexcept { return center_; }
  double radius() const noexcept { return r_out_; }
  double inner_radius() const noexcept { return r_in_; }

  /// Open-set membership; boundary points are outside.
  bool contains(const Point& x) const;

  /// Negative inside, zero on the boundary, positive outside. Outside the
  /// domain this equals dist(x, Omega).
  double signed_distance(const Point& x) const;

  double diameter() const;

  /// Axis-aligned bounding box of the closure.
  std::vector<double> bbox_lo() const;
  std::vector<double> bbox_hi() const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Domain() = default;

  Shape shape_ = Shape::Interval;
  int dim_ = 1;
  std::vector<double> lo_, hi_, center_;
  double r_in_ = 0.0;
  double r_out_ = 0.0;
};

/// Terminal payoffs: f_bar on board 1, g_bar on board 2.
struct PayoffData {
  ScalarFunction f_bar;
  ScalarFunction g_bar;
  double lipschitz_bound = 0.0;

  friend bool operator==(const PayoffData&, const PayoffData&) = default;
};

/// Terminal payoff of the game when the token leaves Omega at x on `board`.
/// Throws if x lies in Omega or board is not 1 or 2.
double eval_payoff(const Domain& domain, const PayoffData& payoff, const Point& x, int board);

}  // namespace twoboard
