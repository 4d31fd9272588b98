#include "twoboard/scalar_function.hpp"

#include <stdexcept>

namespace twoboard {

ScalarFunction::ScalarFunction() = default;

ScalarFunction ScalarFunction::constant(double value) {
  ScalarFunction f;
  f.kind_ = Kind::Constant;
  f.value_ = value;
  return f;
}

ScalarFunction ScalarFunction::linear(std::vector<double> coeffs, double offset) {
  if (coeffs.empty()) throw std::invalid_argument{"linear function needs at least one coefficient"};
  ScalarFunction f;
  f.kind_ = Kind::Linear;
  f.coeffs_ = std::move(coeffs);
  f.offset_ = offset;
  return f;
}

ScalarFunction ScalarFunction::norm(std::vector<double> center, double scale, double offset) {
  if (center.empty()) throw std::invalid_argument{"norm function needs a center"};
  ScalarFunction f;
  f.kind_ = Kind::Norm;
  f.center_ = std::move(center);
  f.scale_ = scale;
  f.offset_ = offset;
  return f;
}

ScalarFunction ScalarFunction::product(double scale) {
  ScalarFunction f;
  f.kind_ = Kind::Product;
  f.scale_ = scale;
  return f;
}

ScalarFunction ScalarFunction::sum(std::vector<Term> terms, double offset) {
  ScalarFunction f;
  f.kind_ = Kind::Sum;
  f.terms_ = std::move(terms);
  f.offset_ = offset;
  return f;
}

double ScalarFunction::operator()(const Point& x) const {
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::Linear: {
      require_same_dim(x, static_cast<int>(coeffs_.size()), "linear function");
      double s = offset_;
      for (int i = 0; i < x.dim(); ++i) s += coeffs_[i] * x[i];
      return s;
    }
    case Kind::Norm: {
      require_same_dim(x, static_cast<int>(center_.size()), "norm function");
      double s = 0.0;
      for (int i = 0; i < x.dim(); ++i) {
        const double d = x[i] - center_[i];
        s += d * d;
      }
      return scale_ * std::sqrt(s) + offset_;
    }
    case Kind::Product: {
      double p = scale_;
      for (int i = 0; i < x.dim(); ++i) p *= x[i];
      return p;
    }
    case Kind::Sum: {
      double s = offset_;
      for (const auto& t : terms_) s += t.weight * t.fn(x);
      return s;
    }
  }
  return 0.0;
}

bool operator==(const ScalarFunction& a, const ScalarFunction& b) {
  return a.kind_ == b.kind_ && a.value_ == b.value_ && a.offset_ == b.offset_ && a.scale_ == b.scale_ &&
         a.coeffs_ == b.coeffs_ && a.center_ == b.center_ && a.terms_ == b.terms_;
}

std::string to_string(ScalarFunction::Kind kind) {
  switch (kind) {
    case ScalarFunction::Kind::Constant: return "constant";
    case ScalarFunction::Kind::Linear: return "linear";
    case ScalarFunction::Kind::Norm: return "norm";
    case ScalarFunction::Kind::Product: return "product";
    case ScalarFunction::Kind::Sum: return "sum";
  }
  return "unknown";
}

ScalarFunction::Kind kind_from_string(const std::string& name) {
  if (name == "constant") return ScalarFunction::Kind::Constant;
  if (name == "linear") return ScalarFunction::Kind::Linear;
  if (name == "norm") return ScalarFunction::Kind::Norm;
  if (name == "product") return ScalarFunction::Kind::Product;
  if (name == "sum") return ScalarFunction::Kind::Sum;
  throw std::invalid_argument{"unknown function family '" + name + "'"};
}

}  // namespace twoboard
