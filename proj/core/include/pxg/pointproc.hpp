#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "pxg/point.hpp"

namespace pxg {

class Rng;

/// Bounded viewing window: a closed ball or an axis-aligned closed cube.
class Window {
 public:
  enum class Shape { Ball, Cube };

  static Window ball(const Point& center, double radius);
  static Window cube(const Point& corner, double side);

  Shape shape() const { return shape_; }
  std::size_t dim() const { return anchor_.dim(); }
  /// Ball center, or the cube's lower corner.
  const Point& anchor() const { return anchor_; }
  /// Ball radius, or the cube's side length.
  double size() const { return size_; }

  bool contains(const Point& p) const;
  double volume() const;
  double diameter() const;
  Point lower() const;
  Point upper() const;
  Point center() const;

  Window scaled(double a) const;
  /// Star-shaped about the origin; both shapes are convex, so this is
  /// containment of the origin.
  bool star_shaped_about_origin() const { return contains(Point(dim())); }

  /// Uniform point; balls use rejection from the bounding cube.
  Point sample_uniform(Rng& rng) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  Window(Shape shape, Point anchor, double size) : shape_(shape), anchor_(anchor), size_(size) {}

  Shape shape_;
  Point anchor_;
  double size_;
};

enum class ProcessKind { Poisson, Binomial };

std::string_view to_string(ProcessKind kind);

/// A finite point configuration with its window and sampling provenance.
struct PointCloud {
  std::vector<Point> points;
  Window window;
  ProcessKind kind = ProcessKind::Poisson;
  double t = 0.0;  ///< Poisson mean count, or binomial count
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return window.dim(); }
};

/// Poisson process with mean count t, uniform on the window.
PointCloud sample_poisson(const Window& window, double t, std::uint64_t seed);

/// n i.i.d. uniform points.
PointCloud sample_binomial(const Window& window, std::size_t n, std::uint64_t seed);

/// Unit-intensity Poisson process on t^{1/d} * base, coupled across t: each
/// unit cell of the integer lattice carries its own seed-derived stream, so
/// the sample for s <= t equals the sample for t restricted to s^{1/d} * base.
/// Requires base to contain the origin.
PointCloud sample_poisson_growing(const Window& base, double t, std::uint64_t seed);

/// ceil(t) i.i.d. uniform points on t^{1/d} * base.
PointCloud sample_binomial_growing(const Window& base, double t, std::uint64_t seed);

/// Multiplies every point and the window by a > 0.
PointCloud scale_cloud(const PointCloud& cloud, double a);

/// Throws std::invalid_argument naming the first repeated point.
void require_distinct(std::span<const Point> points);

/// CSV with header `index,x1,...,xd`.
void write_points_csv(std::ostream& out, std::span<const Point> points, std::size_t dim);
std::vector<Point> read_points_csv(std::istream& in);

/// Binary: magic "PXG1", u32 dimension, u64 count, then count * d
/// little-endian f64 coordinates.
void write_points_binary(std::ostream& out, std::span<const Point> points, std::size_t dim);
std::vector<Point> read_points_binary(std::istream& in);

}  // namespace pxg
