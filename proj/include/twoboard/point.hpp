#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace twoboard {

// Spatial dimensions supported by lattices and the game simulator.
inline constexpr int kMaxDim = 3;

/// Fixed-capacity point in R^N (N <= kMaxDim). Value type, no allocation.
class Point {
 public:
  Point() = default;

  explicit Point(int dim) : dim_{dim} {
    if (dim < 1 || dim > kMaxDim) {
      throw std::invalid_argument{"Point dimension must be in [1, " + std::to_string(kMaxDim) + "]"};
    }
  }

  Point(std::initializer_list<double> coords) : Point(static_cast<int>(coords.size())) {
    int i = 0;
    for (double c : coords) c_[i++] = c;
  }

  static Point zeros(int dim) { return Point(dim); }

  int dim() const noexcept { return dim_; }
  double& operator[](int i) noexcept { return c_[i]; }
  double operator[](int i) const noexcept { return c_[i]; }

  const double* begin() const noexcept { return c_.data(); }
  const double* end() const noexcept { return c_.data() + dim_; }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i) {
      if (a.c_[i] != b.c_[i]) return false;
    }
    return true;
  }

  double squared_norm() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
    return s;
  }
  double norm() const noexcept { return std::sqrt(squared_norm()); }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline void require_same_dim(const Point& x, int dim, const char* what) {
  if (x.dim() != dim) {
    throw std::invalid_argument{std::string{what} + ": point has dimension " + std::to_string(x.dim()) +
                                ", expected " + std::to_string(dim)};
  }
}

}  // namespace twoboard
