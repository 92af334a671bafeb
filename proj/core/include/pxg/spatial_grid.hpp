#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pxg/point.hpp"

namespace pxg {

/// Uniform cell grid over the bounding box of a point set, stored as a
/// dense CSR table (cell -> point indices). The grid references the points;
/// they must outlive it.
class SpatialGrid {
 public:
  SpatialGrid() = default;

  /// cell_size <= 0 picks (bbox volume / n)^{1/d}. The cell size is grown
  /// when needed to keep the table at most 4n + 64 cells.
  explicit SpatialGrid(std::span<const Point> points, double cell_size = 0.0);

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return dim_; }
  double cell_size() const { return h_; }
  std::size_t cell_count() const { return start_.empty() ? 0 : start_.size() - 1; }
  std::span<const Point> points() const { return points_; }
  /// Box covered by the cells.
  const Point& lower() const { return origin_; }
  Point upper() const {
    Point p = origin_;
    for (std::size_t k = 0; k < dim_; ++k) p[k] += static_cast<double>(dims_[k]) * h_;
    return p;
  }

  /// Index of a point equal to p, if any.
  std::optional<std::size_t> find(const Point& p) const;

  /// Distance from p to the nearest indexed point; +inf when empty.
  double nearest_distance(const Point& p) const;

  /// Calls fn(index) for a superset of the points in the closed ball.
  template <class Fn>
  void for_each_in_ball(const Ball& ball, Fn&& fn) const {
    if (points_.empty()) return;
    CellBox box;
    if (!ball_box(ball, box)) return;
    visit_box(box, [&](std::size_t cell) {
      if (!cell_touches(cell, ball)) return false;
      for (std::uint32_t k = start_[cell]; k < start_[cell + 1]; ++k) fn(static_cast<std::size_t>(items_[k]));
      return false;
    });
  }

  /// True when pred(index) holds for some candidate in the closed ball.
  /// Cells are visited in Chebyshev rings around `probe`, so blockers near
  /// the probe are found first.
  template <class Pred>
  bool any_in_ball(const Ball& ball, const Point& probe, Pred&& pred) const {
    if (points_.empty()) return false;
    CellBox box;
    if (!ball_box(ball, box)) return false;
    Coord center{};
    long long rings = 0;
    for (std::size_t k = 0; k < dim_; ++k) {
      center[k] = std::clamp(axis_cell(probe[k], k), box.lo[k], box.hi[k]);
      rings = std::max({rings, center[k] - box.lo[k], box.hi[k] - center[k]});
    }
    auto scan = [&](std::size_t cell) {
      if (!cell_touches(cell, ball)) return false;
      for (std::uint32_t k = start_[cell]; k < start_[cell + 1]; ++k) {
        if (pred(static_cast<std::size_t>(items_[k]))) return true;
      }
      return false;
    };
    for (long long r = 0; r <= rings; ++r) {
      if (visit_ring(box, center, r, scan)) return true;
    }
    return false;
  }

 private:
  using Coord = std::array<long long, kMaxDim>;
  struct CellBox {
    Coord lo{}, hi{};
  };

  long long axis_cell(double x, std::size_t k) const {
    const double c = std::floor((x - origin_[k]) * inv_h_);
    if (!(c > 0.0)) return 0;
    if (c >= static_cast<double>(dims_[k] - 1)) return dims_[k] - 1;
    return static_cast<long long>(c);
  }

  bool ball_box(const Ball& ball, CellBox& box) const {
    for (std::size_t k = 0; k < dim_; ++k) {
      const double lo = ball.center[k] - ball.radius;
      const double hi = ball.center[k] + ball.radius;
      if (hi < origin_[k] - h_ || lo > origin_[k] + static_cast<double>(dims_[k] + 1) * h_) return false;
      box.lo[k] = axis_cell(lo, k);
      box.hi[k] = axis_cell(hi, k);
    }
    return true;
  }

  std::size_t linear(const Coord& c) const {
    std::size_t id = 0;
    for (std::size_t k = 0; k < dim_; ++k) id = id * static_cast<std::size_t>(dims_[k]) + static_cast<std::size_t>(c[k]);
    return id;
  }

  bool cell_touches(std::size_t cell, const Ball& ball) const {
    double d2 = 0.0;
    for (std::size_t k = dim_; k-- > 0;) {
      const auto i = static_cast<long long>(cell % static_cast<std::size_t>(dims_[k]));
      cell /= static_cast<std::size_t>(dims_[k]);
      const double lo = origin_[k] + static_cast<double>(i) * h_;
      const double hi = lo + h_;
      const double x = ball.center[k];
      // Slack absorbs rounding between axis_cell() and these cell bounds.
      const double g = std::max(0.0, (x < lo ? lo - x : (x > hi ? x - hi : 0.0)) - 1e-9 * h_);
      d2 += g * g;
    }
    return d2 <= ball.radius * ball.radius * (1.0 + 1e-9);
  }

  /// Visits every cell of [lo, hi] (inclusive) in lexicographic order until
  /// fn returns true.
  template <class Fn>
  bool visit_range(const Coord& lo, const Coord& hi, Fn& fn) const {
    for (std::size_t k = 0; k < dim_; ++k) {
      if (lo[k] > hi[k]) return false;
    }
    Coord c = lo;
    for (;;) {
      if (fn(linear(c))) return true;
      std::size_t k = dim_;
      for (;;) {
        if (k == 0) return false;
        --k;
        if (c[k] < hi[k]) {
          ++c[k];
          break;
        }
        c[k] = lo[k];
      }
    }
  }

  template <class Fn>
  bool visit_box(const CellBox& box, Fn&& fn) const {
    return visit_range(box.lo, box.hi, fn);
  }

  /// Cells at Chebyshev distance exactly r from `center`, clipped to box.
  /// Each boundary cell is produced once: the first pinned axis j sits at
  /// +-r, axes before j range strictly inside, axes after j range freely.
  template <class Fn>
  bool visit_ring(const CellBox& box, const Coord& center, long long r, Fn& fn) const {
    if (r == 0) return visit_range(center, center, fn);
    for (std::size_t j = 0; j < dim_; ++j) {
      for (long long sign : {-1LL, 1LL}) {
        Coord lo{}, hi{};
        for (std::size_t k = 0; k < dim_; ++k) {
          const long long span = k < j ? r - 1 : r;
          lo[k] = std::max(box.lo[k], center[k] - span);
          hi[k] = std::min(box.hi[k], center[k] + span);
        }
        lo[j] = hi[j] = center[j] + sign * r;
        if (lo[j] < box.lo[j] || lo[j] > box.hi[j]) continue;
        if (visit_range(lo, hi, fn)) return true;
      }
    }
    return false;
  }

  std::span<const Point> points_;
  std::size_t dim_ = 0;
  Point origin_;
  double h_ = 1.0;
  double inv_h_ = 1.0;
  Coord dims_{};
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> items_;
};

/// Upper bounds on the distance to the nearest point of a grid's point set,
/// tabulated on cells of side `cell` over the box [lower, upper].
class ClearanceMap {
 public:
  ClearanceMap(const SpatialGrid& grid, const Point& lower, const Point& upper, double cell);

  /// Bound on the nearest-point distance from c; +inf outside the box.
  double bound_at(const Point& c) const;
  /// Bound on the nearest-point distance from any point of the box within
  /// `radius` of `center`.
  double max_within(const Point& center, double radius) const;
  /// Bound over the whole box.
  double global_max() const { return global_; }

 private:
  std::size_t dim_ = 0;
  Point lower_;
  double h_ = 1.0;
  double half_diag_ = 0.0;
  std::array<long long, kMaxDim> dims_{};
  std::vector<double> nearest_;  // from each cell center
  double global_ = 0.0;

  long long axis_cell(double x, std::size_t k) const;
  Point center_of(const std::array<long long, kMaxDim>& c) const;
  std::size_t linear(const std::array<long long, kMaxDim>& c) const;
};

}  // namespace pxg
