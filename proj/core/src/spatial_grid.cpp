#include "pxg/spatial_grid.hpp"

#include <limits>
#include <stdexcept>

namespace pxg {

SpatialGrid::SpatialGrid(std::span<const Point> points, double cell_size) : points_(points) {
  if (points.empty()) return;
  if (points.size() >= std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("too many points");
  dim_ = points.front().dim();
  origin_ = points.front();
  Point upper = points.front();
  for (const auto& p : points) {
    if (p.dim() != dim_) throw std::invalid_argument("spatial grid: mixed dimensions");
    for (std::size_t k = 0; k < dim_; ++k) {
      origin_[k] = std::min(origin_[k], p[k]);
      upper[k] = std::max(upper[k], p[k]);
    }
  }
  double widest = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) widest = std::max(widest, upper[k] - origin_[k]);
  const double n = static_cast<double>(points.size());
  const double d = static_cast<double>(dim_);

  double h = cell_size;
  if (!(h > 0.0) || !std::isfinite(h)) {
    if (widest == 0.0) {
      h = 1.0;
    } else {
      double vol = 1.0;
      for (std::size_t k = 0; k < dim_; ++k) vol *= std::max(upper[k] - origin_[k], widest * 1e-3);
      h = std::pow(vol / n, 1.0 / d);
    }
  }
  const double max_cells = 4.0 * n + 64.0;
  for (;;) {
    double cells = 1.0;
    for (std::size_t k = 0; k < dim_; ++k) cells *= std::floor((upper[k] - origin_[k]) / h) + 1.0;
    if (cells <= max_cells) break;
    h *= 1.25;
  }
  h_ = h;
  inv_h_ = 1.0 / h;

  std::size_t total = 1;
  for (std::size_t k = 0; k < dim_; ++k) {
    dims_[k] = static_cast<long long>(std::floor((upper[k] - origin_[k]) * inv_h_)) + 1;
    total *= static_cast<std::size_t>(dims_[k]);
  }

  std::vector<std::uint32_t> cell_of(points.size());
  start_.assign(total + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    Coord c{};
    for (std::size_t k = 0; k < dim_; ++k) c[k] = axis_cell(points[i][k], k);
    cell_of[i] = static_cast<std::uint32_t>(linear(c));
    ++start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
  items_.resize(points.size());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) items_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
}

std::optional<std::size_t> SpatialGrid::find(const Point& p) const {
  std::optional<std::size_t> hit;
  if (points_.empty() || p.dim() != dim_) return hit;
  any_in_ball(Ball{p, 0.0}, p, [&](std::size_t i) {
    if (points_[i] == p) {
      hit = i;
      return true;
    }
    return false;
  });
  return hit;
}

double SpatialGrid::nearest_distance(const Point& p) const {
  double best2 = std::numeric_limits<double>::infinity();
  if (points_.empty()) return best2;
  Coord center{};
  long long rings = 0;
  CellBox all;
  for (std::size_t k = 0; k < dim_; ++k) {
    center[k] = axis_cell(p[k], k);
    all.lo[k] = 0;
    all.hi[k] = dims_[k] - 1;
    rings = std::max({rings, center[k], dims_[k] - 1 - center[k]});
  }
  auto scan = [&](std::size_t cell) {
    for (std::uint32_t k = start_[cell]; k < start_[cell + 1]; ++k) {
      best2 = std::min(best2, squared_distance(points_[items_[k]], p));
    }
    return false;
  };
  for (long long r = 0; r <= rings; ++r) {
    visit_ring(all, center, r, scan);
    // Points in ring r + 1 are at least r * h away.
    const double reach = static_cast<double>(r) * h_;
    if (best2 <= reach * reach) break;
  }
  return std::sqrt(best2);
}

// ---------------------------------------------------------------------------
// ClearanceMap

ClearanceMap::ClearanceMap(const SpatialGrid& grid, const Point& lower, const Point& upper, double cell)
    : dim_(lower.dim()), lower_(lower), h_(cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("clearance cell must be positive");
  double total = 1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    dims_[k] = static_cast<long long>(std::floor((upper[k] - lower[k]) / h_)) + 1;
    total *= static_cast<double>(dims_[k]);
  }
  if (total > 1e7) throw std::invalid_argument("clearance map too fine");
  half_diag_ = 0.5 * h_ * std::sqrt(static_cast<double>(dim_)) * (1.0 + 1e-9);
  nearest_.resize(static_cast<std::size_t>(total));
  std::array<long long, kMaxDim> c{};
  for (std::size_t id = 0; id < nearest_.size(); ++id) {
    nearest_[id] = grid.nearest_distance(center_of(c));
    global_ = std::max(global_, nearest_[id] + half_diag_);
    for (std::size_t k = dim_; k-- > 0;) {
      if (++c[k] < dims_[k]) break;
      c[k] = 0;
    }
  }
}

long long ClearanceMap::axis_cell(double x, std::size_t k) const {
  const double c = std::floor((x - lower_[k]) / h_);
  if (!(c > 0.0)) return 0;
  if (c >= static_cast<double>(dims_[k] - 1)) return dims_[k] - 1;
  return static_cast<long long>(c);
}

Point ClearanceMap::center_of(const std::array<long long, kMaxDim>& c) const {
  Point p(dim_);
  for (std::size_t k = 0; k < dim_; ++k) p[k] = lower_[k] + (static_cast<double>(c[k]) + 0.5) * h_;
  return p;
}

std::size_t ClearanceMap::linear(const std::array<long long, kMaxDim>& c) const {
  std::size_t id = 0;
  for (std::size_t k = 0; k < dim_; ++k) id = id * static_cast<std::size_t>(dims_[k]) + static_cast<std::size_t>(c[k]);
  return id;
}

double ClearanceMap::bound_at(const Point& c) const {
  std::array<long long, kMaxDim> idx{};
  for (std::size_t k = 0; k < dim_; ++k) {
    // Cells cover [lower, lower + dims * h]; anything beyond is unknown.
    const double rel = (c[k] - lower_[k]) / h_;
    if (!(rel >= 0.0) || rel > static_cast<double>(dims_[k])) return std::numeric_limits<double>::infinity();
    idx[k] = axis_cell(c[k], k);
  }
  return nearest_[linear(idx)] + distance(c, center_of(idx)) * (1.0 + 1e-9);
}

double ClearanceMap::max_within(const Point& center, double radius) const {
  std::array<long long, kMaxDim> lo{}, hi{};
  for (std::size_t k = 0; k < dim_; ++k) {
    lo[k] = axis_cell(center[k] - radius, k);
    hi[k] = axis_cell(center[k] + radius, k);
  }
  double best = 0.0;
  std::array<long long, kMaxDim> c = lo;
  for (;;) {
    double gap2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double a = lower_[k] + static_cast<double>(c[k]) * h_;
      const double g = center[k] < a ? a - center[k] : std::max(0.0, center[k] - a - h_);
      gap2 += g * g;
    }
    if (gap2 <= radius * radius * (1.0 + 1e-9)) best = std::max(best, nearest_[linear(c)] + half_diag_);
    std::size_t k = dim_;
    for (;;) {
      if (k == 0) return best;
      --k;
      if (c[k] < hi[k]) {
        ++c[k];
        break;
      }
      c[k] = lo[k];
    }
  }
}

}  // namespace pxg
