#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace pxg {

/// Largest ambient dimension supported by the fixed-capacity point type.
inline constexpr std::size_t kMaxDim = 6;

/// A point (or vector) in R^d with d <= kMaxDim, stored inline.
///
/// Coordinates past dim() are kept at zero so that the defaulted comparison
/// operators are exact coordinate-wise comparisons.
class Point {
 public:
  Point() = default;

  explicit Point(std::size_t dim) : dim_(check_dim(dim)) {}

  Point(std::initializer_list<double> coords) : dim_(check_dim(coords.size())) {
    std::size_t k = 0;
    for (double c : coords) c_[k++] = c;
  }

  static Point from_span(std::span<const double> coords) {
    Point p(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k) p.c_[k] = coords[k];
    return p;
  }

  static Point unit(std::size_t dim, std::size_t axis) {
    Point p(dim);
    p[axis] = 1.0;
    return p;
  }

  std::size_t dim() const { return dim_; }

  double& operator[](std::size_t k) { return c_[k]; }
  double operator[](std::size_t k) const { return c_[k]; }

  std::span<const double> coords() const { return {c_.data(), dim_}; }

  bool is_finite() const {
    for (std::size_t k = 0; k < dim_; ++k) {
      if (!std::isfinite(c_[k])) return false;
    }
    return true;
  }

  Point& operator+=(const Point& o) {
    for (std::size_t k = 0; k < dim_; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (std::size_t k = 0; k < dim_; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Point& operator*=(double a) {
    for (std::size_t k = 0; k < dim_; ++k) c_[k] *= a;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator-(Point a) { return a *= -1.0; }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;

 private:
  static std::size_t check_dim(std::size_t d) {
    if (d == 0 || d > kMaxDim) throw std::invalid_argument("point dimension must be in [1, 6]");
    return d;
  }

  std::array<double, kMaxDim> c_{};
  std::size_t dim_ = 0;
};

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) s += a[k] * b[k];
  return s;
}

inline double squared_norm(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(squared_norm(a)); }

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

inline double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

inline Point midpoint(const Point& a, const Point& b) {
  Point m(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) m[k] = 0.5 * (a[k] + b[k]);
  return m;
}

/// Closed or open ball, depending on context; callers document which.
struct Ball {
  Point center;
  double radius = 0.0;
};

}  // namespace pxg
