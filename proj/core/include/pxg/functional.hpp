#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pxg/graph.hpp"
#include "pxg/point.hpp"
#include "pxg/regions.hpp"

namespace pxg {

/// Symmetric edge weight psi with a declared growth bound
/// |psi(x, y)| <= C |x - y|^alpha.
class WeightSpec {
 public:
  enum class Kind { PowerLaw, Custom };
  using Fn = std::function<double(const Point&, const Point&)>;

  /// psi(x, y) = |x - y|^alpha, with C = 1.
  static WeightSpec power(double alpha);
  static WeightSpec custom(std::string name, Fn fn, double growth_constant, double alpha);
  /// Named built-ins: "log1p" (log(1 + r), C = 1, alpha = 1) and
  /// "saturating" (1 - exp(-r), C = 1, alpha = 0).
  static WeightSpec builtin(const std::string& name);

  double operator()(const Point& x, const Point& y) const;

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double growth_constant() const { return c_; }
  /// C * max(1, 2^{alpha - 1}).
  double c_alpha() const;
  const std::string& name() const { return name_; }

 private:
  WeightSpec() = default;

  Kind kind_ = Kind::PowerLaw;
  double alpha_ = 0.0;
  double c_ = 1.0;
  std::string name_;
  Fn fn_;
};

/// Spot-checks symmetry and the declared growth bound on random pairs in
/// [-scale, scale]^d. Returns the number of violating pairs.
std::size_t check_weight(const WeightSpec& weight, std::size_t dim, std::size_t samples, std::uint64_t seed,
                         double scale = 10.0);

/// Sum of psi over the edges, in sorted edge order.
double eval_L(const ProximityGraph& graph, std::span<const Point> points, const WeightSpec& weight);

/// L of the configuration with x appended as the last vertex, given its
/// insertion diff. Sums over the rebuilt edge list in sorted order.
double eval_L_after(const ProximityGraph& graph, std::span<const Point> points, const EdgeDiff& diff,
                    const Point& x, const WeightSpec& weight);

/// D_x L from an insertion diff: sum over added edges minus removed ones.
double diff_cost(const EdgeDiff& diff, std::span<const Point> points, const Point& x, const WeightSpec& weight);

/// D_x L(mu); zero when x is already in mu.
double add_one_cost(const InsertionProbe& probe, const WeightSpec& weight, const Point& x);
double add_one_cost(std::span<const Point> points, const ProximityGraph& graph, const ForbiddenRegionFamily& family,
                    const WeightSpec& weight, const Point& x);

/// L(mu + x + y) - L(mu + y) - L(mu + x) + L(mu), by four full builds.
/// Throws std::invalid_argument when x == y.
double second_difference(std::span<const Point> points, const ForbiddenRegionFamily& family,
                         const WeightSpec& weight, const Point& x, const Point& y);

/// Same quantity as D_x L(mu + y) - D_x L(mu), through insertion diffs.
double second_difference_iterated(std::span<const Point> points, const ForbiddenRegionFamily& family,
                                  const WeightSpec& weight, const Point& x, const Point& y);

struct DerivativeBound {
  double lhs = 0.0;  ///< |D_x L|
  double rhs = 0.0;  ///< C_alpha * sum over A(x; mu) of |z - x|^alpha
  std::vector<std::size_t> support;  ///< A(x; mu), sorted indices
  bool ok = false;
};

/// A(x; mu) collects the endpoints of every edge of mu whose region holds x
/// and no other point, together with the z for which S(x, z) misses mu.
DerivativeBound derivative_bound_check(std::span<const Point> points, const ProximityGraph& graph,
                                       const ForbiddenRegionFamily& family, const WeightSpec& weight,
                                       const Point& x);

}  // namespace pxg
