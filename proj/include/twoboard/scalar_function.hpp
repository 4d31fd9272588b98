#pragma once

#include <string>
#include <vector>

#include "twoboard/point.hpp"

namespace twoboard {

/// Built-in scalar field families used for terminal payoffs and spatially
/// varying jump coefficients.
///
///   constant  c
///   linear    <coeffs, x> + offset
///   norm      scale * |x - center| + offset
///   product   scale * x_1 * ... * x_N
///   sum       sum_k weight_k * term_k(x) + offset
///
/// Functions are total: they can be evaluated anywhere in R^N.
class ScalarFunction {
 public:
  enum class Kind { Constant, Linear, Norm, Product, Sum };

  struct Term;

  static ScalarFunction constant(double value);
  static ScalarFunction linear(std::vector<double> coeffs, double offset = 0.0);
  static ScalarFunction norm(std::vector<double> center, double scale = 1.0, double offset = 0.0);
  static ScalarFunction product(double scale = 1.0);
  static ScalarFunction sum(std::vector<Term> terms, double offset = 0.0);

  ScalarFunction();

  double operator()(const Point& x) const;

  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }
  double offset() const noexcept { return offset_; }
  double scale() const noexcept { return scale_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  const std::vector<double>& center() const noexcept { return center_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  bool is_constant() const noexcept { return kind_ == Kind::Constant; }

  friend bool operator==(const ScalarFunction& a, const ScalarFunction& b);

 private:
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  double offset_ = 0.0;
  double scale_ = 1.0;
  std::vector<double> coeffs_;
  std::vector<double> center_;
  std::vector<Term> terms_;
};

struct ScalarFunction::Term {
  double weight = 1.0;
  ScalarFunction fn;
  friend bool operator==(const Term&, const Term&) = default;
};

std::string to_string(ScalarFunction::Kind kind);
ScalarFunction::Kind kind_from_string(const std::string& name);

}  // namespace twoboard
