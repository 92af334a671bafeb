#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pxg/functional.hpp"
#include "pxg/pointproc.hpp"
#include "pxg/regions.hpp"
#include "pxg/stats.hpp"

namespace pxg {

enum class Parameterization {
  FixedWindow,    ///< intensity t on the window
  GrowingWindow,  ///< unit intensity on t^{1/d} * window, coupled across t
};

struct ExperimentPlan {
  ForbiddenRegionFamily family = ForbiddenRegionFamily::gabriel(2);
  std::vector<WeightSpec> weights{WeightSpec::power(0.0)};
  Window window = Window::ball(Point{0.0, 0.0}, 1.0);
  ProcessKind process = ProcessKind::Poisson;
  Parameterization parameterization = Parameterization::FixedWindow;
  std::vector<double> t_values;
  std::size_t replications = 2;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
  /// Clouds larger than this are skipped and the result is marked partial;
  /// 0 disables the cap.
  std::size_t max_points = 0;
  bool record_timing = false;
};

/// Throws std::invalid_argument unless t_values is non-empty, positive and
/// strictly increasing, replications >= 2 and at least one weight is given.
void validate_plan(const ExperimentPlan& plan);

struct Replication {
  std::size_t t_index = 0;
  double t = 0.0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::size_t n_points = 0;
  std::vector<double> values;  ///< one per weight
  double elapsed_ms = -1.0;    ///< negative when timing is off
  bool skipped = false;
};

struct PerTStats {
  double t = 0.0;
  std::size_t replications = 0;  ///< replications that produced a value
  double mean = 0.0;
  double variance = 0.0;
  /// Standardized by the sample standard deviation.
  double d_kolmogorov = 0.0;
  double d_wasserstein1 = 0.0;
  /// Divided by the sample variance instead.
  double d_kolmogorov_var = 0.0;
  double d_wasserstein1_var = 0.0;
};

struct WeightSummary {
  std::string weight;
  double alpha = 0.0;
  std::vector<PerTStats> per_t;
  LinearFit variance_fit;       ///< log Var against log t
  double variance_exponent = 0.0;
  double expected_exponent = 0.0;  ///< 1 - 2 alpha / d
  double v_alpha_hat = 0.0;        ///< min over t of Var / t^{1 - 2 alpha / d}
  LinearFit kolmogorov_fit;
  LinearFit wasserstein_fit;
  bool kolmogorov_decreasing = false;
  bool fits_valid = false;  ///< false when a fit was impossible (e.g. zero variance)
};

struct SummaryStats {
  std::vector<Replication> replications;  ///< ordered by (t index, rep)
  std::vector<WeightSummary> weights;
  bool partial = false;
  std::string partial_reason;
};

/// Replication (ti, rep) uses seed derive_seed({master, ti, rep}); results
/// do not depend on the thread count.
SummaryStats run_plan(const ExperimentPlan& plan);

/// Aggregates replication values into per-t statistics and fits.
std::vector<WeightSummary> summarize(const ExperimentPlan& plan, std::span<const Replication> reps);

/// CSV with columns t, rep, seed, n_points, L (one L column per weight when
/// there are several), elapsed_ms (empty unless timing was recorded).
void write_replications_csv(std::ostream& out, const SummaryStats& stats, std::span<const WeightSpec> weights);

struct InfluentialReport {
  Point x, y;
  std::size_t samples = 0;
  double fraction_above = 0.0;  ///< share of z in B(x, 1) with D_z L > a
  double fraction_below = 0.0;  ///< share of z in B(y, 1) with D_z L < b
  double radius_x = 0.0;        ///< estimated radius of U = B(x, 1)
  double radius_y = 0.0;
  bool radius_x_ok = false;     ///< radius_x <= r
  bool radius_y_ok = false;
  bool influential = false;     ///< both fractions positive and both radii within r
};

struct InfluentialOptions {
  double a = 0.0;
  double b = 0.0;
  double r = 0.0;
  std::size_t ball_samples = 256;
  std::size_t per_axis = 32;
  std::uint64_t seed = 0;
};

/// Diagnostic for candidate influential pairs. Throws when a <= b, or when a
/// pair's unit balls leave the window or overlap.
std::vector<InfluentialReport> detect_influential(std::span<const Point> points, const Window& window,
                                                  const ForbiddenRegionFamily& family, const WeightSpec& weight,
                                                  std::span<const std::pair<Point, Point>> pairs,
                                                  const InfluentialOptions& options);

}  // namespace pxg
