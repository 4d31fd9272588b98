#include "twoboard/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twoboard {

namespace {

int checked_dim(std::size_t n) {
  if (n < 1 || n > static_cast<std::size_t>(kMaxDim)) {
    throw std::invalid_argument{"domain dimension must be in [1, " + std::to_string(kMaxDim) + "]"};
  }
  return static_cast<int>(n);
}

double radial(const Point& x, const std::vector<double>& center) {
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    const double d = x[i] - center[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::Interval: return "interval";
    case Shape::Box: return "box";
    case Shape::Ball: return "ball";
    case Shape::Annulus: return "annulus";
  }
  return "unknown";
}

Shape shape_from_string(const std::string& name) {
  if (name == "interval") return Shape::Interval;
  if (name == "box") return Shape::Box;
  if (name == "ball") return Shape::Ball;
  if (name == "annulus") return Shape::Annulus;
  throw std::invalid_argument{"unknown domain shape '" + name + "'"};
}

Domain Domain::interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument{"interval requires a < b"};
  Domain d;
  d.shape_ = Shape::Interval;
  d.dim_ = 1;
  d.lo_ = {a};
  d.hi_ = {b};
  return d;
}

Domain Domain::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument{"box corners differ in dimension"};
  Domain d;
  d.shape_ = Shape::Box;
  d.dim_ = checked_dim(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument{"box requires lo < hi on every axis"};
  }
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  return d;
}

Domain Domain::ball(std::vector<double> center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument{"ball radius must be positive"};
  Domain d;
  d.shape_ = Shape::Ball;
  d.dim_ = checked_dim(center.size());
  d.center_ = std::move(center);
  d.r_out_ = radius;
  return d;
}

Domain Domain::annulus(std::vector<double> center, double r_in, double r_out) {
  if (!(r_in > 0.0 && r_in < r_out)) throw std::invalid_argument{"annulus requires 0 < r_in < r_out"};
  Domain d;
  d.shape_ = Shape::Annulus;
  d.dim_ = checked_dim(center.size());
  if (d.dim_ < 2) throw std::invalid_argument{"annulus requires dimension >= 2"};
  d.center_ = std::move(center);
  d.r_in_ = r_in;
  d.r_out_ = r_out;
  return d;
}

bool Domain::contains(const Point& x) const { return signed_distance(x) < 0.0; }

double Domain::signed_distance(const Point& x) const {
  require_same_dim(x, dim_, "Domain");
  switch (shape_) {
    case Shape::Interval:
    case Shape::Box: {
      // Exact signed distance to an axis-aligned box.
      double outside = 0.0;
      double inside = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim_; ++i) {
        const double q = std::max(lo_[i] - x[i], x[i] - hi_[i]);
        outside += q > 0.0 ? q * q : 0.0;
        inside = std::max(inside, q);
      }
      return outside > 0.0 ? std::sqrt(outside) : inside;
    }
    case Shape::Ball:
      return radial(x, center_) - r_out_;
    case Shape::Annulus: {
      const double r = radial(x, center_);
      return std::max(r_in_ - r, r - r_out_);
    }
  }
  return 0.0;
}

double Domain::diameter() const {
  switch (shape_) {
    case Shape::Interval:
    case Shape::Box: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
      return std::sqrt(s);
    }
    case Shape::Ball:
    case Shape::Annulus:
      return 2.0 * r_out_;
  }
  return 0.0;
}

std::vector<double> Domain::bbox_lo() const {
  if (shape_ == Shape::Interval || shape_ == Shape::Box) return lo_;
  std::vector<double> lo(center_);
  for (auto& c : lo) c -= r_out_;
  return lo;
}

std::vector<double> Domain::bbox_hi() const {
  if (shape_ == Shape::Interval || shape_ == Shape::Box) return hi_;
  std::vector<double> hi(center_);
  for (auto& c : hi) c += r_out_;
  return hi;
}

double eval_payoff(const Domain& domain, const PayoffData& payoff, const Point& x, int board) {
  if (domain.contains(x)) throw std::invalid_argument{"eval_payoff: point lies inside the domain"};
  if (board == 1) return payoff.f_bar(x);
  if (board == 2) return payoff.g_bar(x);
  throw std::invalid_argument{"eval_payoff: board must be 1 or 2"};
}

}  // namespace twoboard
