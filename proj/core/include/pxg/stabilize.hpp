#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pxg/functional.hpp"
#include "pxg/point.hpp"
#include "pxg/pointproc.hpp"
#include "pxg/regions.hpp"

namespace pxg {

/// The base set U: the point `center` when radius == 0, else the closed
/// ball B(center, radius).
struct BaseSet {
  Point center;
  double radius = 0.0;

  static BaseSet point(const Point& x) { return {x, 0.0}; }
  static BaseSet ball(const Point& x, double eps) { return {x, eps}; }
};

/// Grid-restricted estimate of the stabilization radius of U.
struct RegionUnionEstimate {
  BaseSet base;
  double resolution = 0.0;       ///< lattice spacing h
  std::size_t lattice_nodes = 0;
  std::size_t candidates = 0;    ///< lattice, configuration and U's center, deduplicated
  std::size_t pairs_examined = 0;
  std::size_t pairs_accepted = 0;  ///< empty and touching U
  std::size_t touch_samples = 0;   ///< points of U tested per region (0: exact test)
  /// Largest sup distance from U over accepted regions. Never decreases when
  /// h is halved.
  double max_distance = 0.0;
  /// max_distance + h * sqrt(d): allowance for pairs between lattice nodes.
  double padded_distance = 0.0;
  std::optional<std::pair<Point, Point>> witness;
};

/// Lattice spacing giving `per_axis` nodes across the window's bounding box.
double default_resolution(const Window& window, std::size_t per_axis = 32);

/// Window points of the lattice lower() + h * k. Halving h yields a superset.
std::vector<Point> lattice_nodes(const Window& window, double h);

/// sup |z - c| over the region, for c = U's center. Exact for the canonical
/// families; sampled on the family's template points otherwise.
double region_sup_distance(const Region& region, const Point& c);

/// Whether U meets the closure of the region.
bool region_touches(const Region& region, const BaseSet& u);

/// Candidate pairs are drawn from the lattice of spacing h over the window,
/// the configuration and U's center. A pair counts when its region holds no
/// point of `points` and its closure meets U. Throws when h <= 0, h exceeds
/// the window diameter, or U's center lies outside the window.
RegionUnionEstimate estimate_radius(std::span<const Point> points, const Window& window,
                                    const ForbiddenRegionFamily& family, const BaseSet& u, double h);

struct MonotonicityReport {
  double radius_small = 0.0;  ///< estimate for mu
  double radius_large = 0.0;  ///< estimate for nu
  std::size_t accepted_small = 0;
  std::size_t accepted_large = 0;
  bool subset = false;          ///< accepted pairs of nu are accepted pairs of mu
  bool extra_outside = false;   ///< no point of nu \ mu lies in an accepted region of mu
  bool equal_when_outside = true;
  bool ok() const { return subset && radius_large <= radius_small && equal_when_outside; }
};

/// Compares the accepted pair sets of mu and nu on one shared candidate set
/// (lattice, nu and U's center). Throws when mu is not a subset of nu.
MonotonicityReport check_monotonicity(std::span<const Point> mu, std::span<const Point> nu, const Window& window,
                                      const ForbiddenRegionFamily& family, const BaseSet& u, double h);

struct SurvivalRow {
  double t = 0.0;
  double r = 0.0;
  std::size_t survivors = 0;
  std::size_t total = 0;
  double survival = 0.0;
};

struct TailFit {
  double t = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double corr = 0.0;
  std::size_t points_used = 0;
  bool flagged = false;        ///< fewer than 4 usable r values
  double reference_slope = 0.0;  ///< -c_lambda * kappa * t
};

struct TailOptions {
  std::vector<double> t_values;
  std::size_t replications = 100;
  std::vector<double> r_grid;   ///< empty: 64 values up to the largest radius seen
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t per_axis = 32;
  double epsilon = 0.0;         ///< U = B(center, epsilon)
  double delta = 0.0;           ///< scaled-ball constant for kappa; 0 takes the family's
};

struct TailResult {
  std::vector<SurvivalRow> rows;
  std::vector<TailFit> fits;
  std::vector<std::vector<double>> radii;  ///< per t, per replication
  double kappa = 0.0;
  double c_lambda = 0.0;
};

/// ((1 - 2 eps) delta / (D sqrt(d)))^d.
double kappa_constant(double delta, double diameter, std::size_t dim, double epsilon);

/// Samples Poisson clouds on the window and tabulates P(R >= r) for the
/// radius at the window center; fits log survival against r^d where the
/// survival lies in [0.01, 0.9]. Throws when replications < 100.
TailResult tail_survival(const ForbiddenRegionFamily& family, const Window& window, const TailOptions& options);

struct ContractOptions {
  std::size_t trials = 1000;      ///< far pairs to test
  double margin = 1.1;
  std::size_t n_min = 20;
  std::size_t n_max = 100;
  std::size_t per_axis = 32;
  std::size_t extra_points = 3;   ///< points added beyond the radius in the add-many check
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct ContractViolation {
  std::size_t trial = 0;
  Point x, y;
  double radius = 0.0;          ///< at the reference grid
  double refined_radius = 0.0;  ///< at h / 2
  double second_difference = 0.0;
  bool resolved = false;        ///< |y - x| <= margin * refined radius
};

struct ContractReport {
  std::size_t trials = 0;
  std::size_t zero = 0;               ///< trials with D2 = 0
  std::size_t add_many_trials = 0;
  std::size_t add_many_unchanged = 0;
  std::size_t draws = 0;              ///< configurations drawn, including those without a far pair
  std::vector<ContractViolation> violations;
  std::vector<ContractViolation> add_many_violations;
  std::vector<std::string> log;

  double zero_fraction() const { return trials ? static_cast<double>(zero) / static_cast<double>(trials) : 0.0; }
  double add_many_fraction() const {
    return add_many_trials ? static_cast<double>(add_many_unchanged) / static_cast<double>(add_many_trials) : 0.0;
  }
  bool all_resolved() const;
};

/// Draws binomial configurations of n_min..n_max points, a base point x and
/// a partner y with |y - x| > margin * R, and checks D2_{x,y} L = 0. Each
/// violation is re-tested with the radius at h / 2 and logged. The add-many
/// check compares D_x L before and after adding extra_points points beyond
/// the same distance.
ContractReport check_stabilization_contract(const ForbiddenRegionFamily& family, const Window& window,
                                            const WeightSpec& weight, const ContractOptions& options);

}  // namespace pxg
