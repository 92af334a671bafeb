#include "pxg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pxg {

bool ProximityGraph::has_edge(std::size_t a, std::size_t b) const {
  return std::binary_search(edges.begin(), edges.end(), Edge::of(a, b));
}

namespace {

void check_points(std::span<const Point> points, const ForbiddenRegionFamily& family) {
  for (const auto& p : points) {
    if (p.dim() != family.dim()) throw std::invalid_argument("point dimension differs from the family's");
    if (!p.is_finite()) throw std::invalid_argument("non-finite point coordinate");
  }
  require_distinct(points);
}

}  // namespace

ProximityGraph build_naive(std::span<const Point> points, const ForbiddenRegionFamily& family) {
  check_points(points, family);
  ProximityGraph g{points.size(), {}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const Region region = family.region(points[i], points[j]);
      bool empty = true;
      for (std::size_t k = 0; k < points.size() && empty; ++k) {
        if (k != i && k != j && region.contains(points[k])) empty = false;
      }
      if (empty) g.edges.push_back({i, j});
    }
  }
  return g;
}

ProximityGraph build_naive(const PointCloud& cloud, const ForbiddenRegionFamily& family) {
  return build_naive(cloud.points, family);
}

bool region_occupied(const Region& region, const SpatialGrid& grid) {
  const auto pts = grid.points();
  return grid.any_in_ball(region.bounding_ball(), region.inscribed_ball().center,
                          [&](std::size_t k) { return region.contains(pts[k]); });
}

namespace {

/// Blocker test for canonical families, whose inscribed ball is centred at
/// the midpoint: a clearance bound below the inscribed radius proves a point
/// strictly inside the region.
bool pair_blocked(const Region& region, const SpatialGrid& grid, const ClearanceMap* clearance) {
  if (clearance) {
    const Ball ball = region.inscribed_ball();
    if (clearance->bound_at(ball.center) < ball.radius * (1.0 - 1e-9)) return true;
  }
  return region_occupied(region, grid);
}

bool has_midpoint_inscribed_ball(const ForbiddenRegionFamily& family) {
  return family.kind() != RegionKind::TemplateIsotropic;
}

/// Longest possible edge at p: an edge of length l needs clearance at least
/// delta * l at its midpoint, which lies within l / 2 of p.
double edge_length_cap(const ClearanceMap& clearance, const Point& p, double delta) {
  double cap = clearance.global_max() / delta;
  for (int iter = 0; iter < 3 && std::isfinite(cap); ++iter) {
    cap = std::min(cap, clearance.max_within(p, 0.5 * cap) / delta);
  }
  return cap;
}

}  // namespace

ProximityGraph build_accelerated(std::span<const Point> points, const ForbiddenRegionFamily& family,
                                 double cell_size) {
  check_points(points, family);
  const SpatialGrid grid(points, cell_size);
  ProximityGraph g{points.size(), {}};
  if (!has_midpoint_inscribed_ball(family) || points.size() < 3) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        if (!region_occupied(family.region(points[i], points[j]), grid)) g.edges.push_back({i, j});
      }
    }
    return g;
  }

  const ClearanceMap clearance(grid, grid.lower(), grid.upper(), grid.cell_size());
  const double delta = family.inscribed_template_ball().radius;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double cap = edge_length_cap(clearance, points[i], delta);
    grid.for_each_in_ball(Ball{points[i], cap}, [&](std::size_t j) {
      if (j <= i || squared_distance(points[i], points[j]) > cap * cap) return;
      if (!pair_blocked(family.region(points[i], points[j]), grid, &clearance)) g.edges.push_back({i, j});
    });
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

double default_cell_size(const Window& window, std::size_t n) {
  if (n == 0) return window.diameter();
  const double h = std::pow(window.volume() / static_cast<double>(n), 1.0 / static_cast<double>(window.dim()));
  return std::min(h, window.diameter());
}

ProximityGraph build_accelerated(const PointCloud& cloud, const ForbiddenRegionFamily& family) {
  return build_accelerated(cloud.points, family, default_cell_size(cloud.window, cloud.size()));
}

// ---------------------------------------------------------------------------
// InsertionProbe

InsertionProbe::InsertionProbe(std::span<const Point> points, const ProximityGraph& graph,
                               const ForbiddenRegionFamily& family, double cell_size)
    : points_(points), graph_(graph), family_(family), grid_(points, cell_size) {
  if (graph.n != points.size()) throw std::invalid_argument("graph and point set sizes differ");
  if (has_midpoint_inscribed_ball(family) && points.size() >= 2) {
    clearance_.emplace(grid_, grid_.lower(), grid_.upper(), grid_.cell_size());
  }
}

std::vector<std::size_t> InsertionProbe::new_neighbors(const Point& x) const {
  std::vector<std::size_t> out;
  const ClearanceMap* clr = clearance_ ? &*clearance_ : nullptr;
  auto consider = [&](std::size_t z) {
    if (points_[z] != x && !pair_blocked(family_.region(x, points_[z]), grid_, clr)) out.push_back(z);
  };
  if (clr && clr->bound_at(x) < std::numeric_limits<double>::infinity()) {
    // x inside the tabulated box, so every candidate midpoint is too.
    const double cap = edge_length_cap(*clr, x, family_.inscribed_template_ball().radius);
    grid_.for_each_in_ball(Ball{x, cap}, [&](std::size_t z) {
      if (squared_distance(x, points_[z]) <= cap * cap) consider(z);
    });
    std::sort(out.begin(), out.end());
  } else {
    for (std::size_t z = 0; z < points_.size(); ++z) consider(z);
  }
  return out;
}

std::vector<Edge> InsertionProbe::broken_edges(const Point& x) const {
  std::vector<Edge> out;
  const double factor = family_.bounding_factor() * (1.0 + 1e-12);
  for (const Edge& e : graph_.edges) {
    const Point& a = points_[e.i];
    const Point& b = points_[e.j];
    const double reach = factor * factor * squared_distance(a, b);
    if (squared_distance(x, midpoint(a, b)) > reach * (1.0 + 1e-9)) continue;
    if (family_.region(a, b).contains(x)) out.push_back(e);
  }
  return out;
}

EdgeDiff InsertionProbe::diff(const Point& x) const {
  if (x.dim() != family_.dim()) throw std::invalid_argument("insertion point dimension differs from the family's");
  EdgeDiff d;
  d.new_vertex = points_.size();
  if (contains_point(x)) {
    d.already_present = true;
    return d;
  }
  d.removed = broken_edges(x);
  for (std::size_t z : new_neighbors(x)) d.added.push_back({z, d.new_vertex});
  return d;
}

EdgeDiff edge_diff(std::span<const Point> points, const ProximityGraph& graph, const ForbiddenRegionFamily& family,
                   const Point& x) {
  return InsertionProbe(points, graph, family).diff(x);
}

ProximityGraph apply_diff(const ProximityGraph& graph, const EdgeDiff& diff) {
  if (diff.already_present) return graph;
  ProximityGraph out{graph.n + 1, {}};
  out.edges.reserve(graph.edges.size() + diff.added.size());
  std::set_difference(graph.edges.begin(), graph.edges.end(), diff.removed.begin(), diff.removed.end(),
                      std::back_inserter(out.edges));
  out.edges.insert(out.edges.end(), diff.added.begin(), diff.added.end());
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace pxg
