#pragma once

#include <compare>
#include <optional>
#include <cstddef>
#include <span>
#include <vector>

#include "pxg/point.hpp"
#include "pxg/pointproc.hpp"
#include "pxg/regions.hpp"
#include "pxg/spatial_grid.hpp"

namespace pxg {

/// Undirected edge between vertex indices, normalized so that i < j.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;

  static Edge of(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Edge set of the forbidden-region graph: {i, j} is present iff
/// S(x_i, x_j) holds no point of the configuration.
struct ProximityGraph {
  std::size_t n = 0;
  std::vector<Edge> edges;  ///< sorted, unique

  bool has_edge(std::size_t a, std::size_t b) const;
  friend bool operator==(const ProximityGraph&, const ProximityGraph&) = default;
};

/// Edge changes caused by inserting one point. The inserted point gets
/// vertex index n (the old vertex count); `added` edges are all incident to
/// it and `removed` edges never are.
struct EdgeDiff {
  std::size_t new_vertex = 0;
  bool already_present = false;  ///< x was a vertex; nothing changes
  std::vector<Edge> added;
  std::vector<Edge> removed;

  bool empty() const { return added.empty() && removed.empty(); }
};

/// Reference builder: every pair against every other point.
/// Throws std::invalid_argument on repeated points.
ProximityGraph build_naive(std::span<const Point> points, const ForbiddenRegionFamily& family);
ProximityGraph build_naive(const PointCloud& cloud, const ForbiddenRegionFamily& family);

/// Grid-accelerated builder with the same output as build_naive. Blockers
/// are searched only in cells meeting the region's bounding ball, starting
/// from the cell of its inscribed-ball center. cell_size <= 0 picks the
/// default.
ProximityGraph build_accelerated(std::span<const Point> points, const ForbiddenRegionFamily& family,
                                 double cell_size = 0.0);
/// Cell size (|window| / n)^{1/d}, clamped to the window diameter.
ProximityGraph build_accelerated(const PointCloud& cloud, const ForbiddenRegionFamily& family);

double default_cell_size(const Window& window, std::size_t n);

/// True when S(region) holds a point of `grid` (open-set membership).
bool region_occupied(const Region& region, const SpatialGrid& grid);

/// Answers insertion queries against a fixed configuration and its graph.
/// Keeps references to points, graph and family.
class InsertionProbe {
 public:
  InsertionProbe(std::span<const Point> points, const ProximityGraph& graph, const ForbiddenRegionFamily& family,
                 double cell_size = 0.0);

  /// Edge changes from inserting x. Empty when x is already a vertex.
  EdgeDiff diff(const Point& x) const;

  /// Indices z whose region S(x, z) holds no configuration point.
  std::vector<std::size_t> new_neighbors(const Point& x) const;
  /// Edges of the graph whose region contains x.
  std::vector<Edge> broken_edges(const Point& x) const;

  bool contains_point(const Point& x) const { return grid_.find(x).has_value(); }

  std::span<const Point> points() const { return points_; }
  const ProximityGraph& graph() const { return graph_; }
  const ForbiddenRegionFamily& family() const { return family_; }
  const SpatialGrid& grid() const { return grid_; }

 private:
  std::span<const Point> points_;
  const ProximityGraph& graph_;
  const ForbiddenRegionFamily& family_;
  SpatialGrid grid_;
  std::optional<ClearanceMap> clearance_;
};

EdgeDiff edge_diff(std::span<const Point> points, const ProximityGraph& graph, const ForbiddenRegionFamily& family,
                   const Point& x);

/// (graph - removed) + added, on n + 1 vertices; unchanged when the point
/// was already present.
ProximityGraph apply_diff(const ProximityGraph& graph, const EdgeDiff& diff);

}  // namespace pxg
