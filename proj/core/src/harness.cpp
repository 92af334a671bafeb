#include "pxg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pxg/format.hpp"
#include "pxg/graph.hpp"
#include "pxg/parallel.hpp"
#include "pxg/random.hpp"
#include "pxg/stabilize.hpp"

namespace pxg {

void validate_plan(const ExperimentPlan& plan) {
  if (plan.t_values.empty()) throw std::invalid_argument("plan needs at least one t value");
  for (std::size_t i = 0; i < plan.t_values.size(); ++i) {
    if (!(plan.t_values[i] > 0.0) || !std::isfinite(plan.t_values[i])) {
      throw std::invalid_argument("t values must be positive and finite");
    }
    if (i > 0 && !(plan.t_values[i] > plan.t_values[i - 1])) {
      throw std::invalid_argument("t values must be strictly increasing");
    }
  }
  if (plan.replications < 2) throw std::invalid_argument("plan needs at least two replications per t");
  if (plan.weights.empty()) throw std::invalid_argument("plan needs at least one weight");
  if (plan.window.dim() != plan.family.dim()) throw std::invalid_argument("window and family dimensions differ");
  if (plan.parameterization == Parameterization::GrowingWindow && !plan.window.star_shaped_about_origin()) {
    throw std::invalid_argument("growing-window plans need a window containing the origin");
  }
}

namespace {

PointCloud sample_for(const ExperimentPlan& plan, double t, std::uint64_t seed) {
  const bool growing = plan.parameterization == Parameterization::GrowingWindow;
  if (plan.process == ProcessKind::Poisson) {
    return growing ? sample_poisson_growing(plan.window, t, seed) : sample_poisson(plan.window, t, seed);
  }
  if (growing) return sample_binomial_growing(plan.window, t, seed);
  PointCloud cloud = sample_binomial(plan.window, static_cast<std::size_t>(std::ceil(t)), seed);
  cloud.t = t;
  return cloud;
}

std::string column_name(const WeightSpec& w, std::size_t count) {
  if (count == 1) return "L";
  if (w.kind() == WeightSpec::Kind::PowerLaw) return "L_alpha" + format_double(w.alpha());
  return "L_" + w.name();
}

}  // namespace

SummaryStats run_plan(const ExperimentPlan& plan) {
  validate_plan(plan);
  const std::size_t nt = plan.t_values.size();
  const std::size_t reps = plan.replications;
  SummaryStats stats;
  stats.replications.resize(nt * reps);

  parallel_for(nt * reps, plan.threads, [&](std::size_t task) {
    Replication& r = stats.replications[task];
    r.t_index = task / reps;
    r.rep = task % reps;
    r.t = plan.t_values[r.t_index];
    r.seed = derive_seed({plan.master_seed, r.t_index, r.rep});
    const auto start = std::chrono::steady_clock::now();
    const PointCloud cloud = sample_for(plan, r.t, r.seed);
    r.n_points = cloud.size();
    if (plan.max_points > 0 && cloud.size() > plan.max_points) {
      r.skipped = true;
      return;
    }
    const ProximityGraph g = build_accelerated(cloud, plan.family);
    r.values.reserve(plan.weights.size());
    for (const auto& w : plan.weights) r.values.push_back(eval_L(g, cloud.points, w));
    if (plan.record_timing) {
      r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });

  std::size_t skipped = 0;
  for (const auto& r : stats.replications) skipped += r.skipped ? 1 : 0;
  if (skipped > 0) {
    stats.partial = true;
    stats.partial_reason = std::to_string(skipped) + " replications exceeded max_points = " +
                           std::to_string(plan.max_points) + " and were skipped";
  }
  stats.weights = summarize(plan, stats.replications);
  return stats;
}

std::vector<WeightSummary> summarize(const ExperimentPlan& plan, std::span<const Replication> reps) {
  const std::size_t nt = plan.t_values.size();
  const double d = static_cast<double>(plan.family.dim());
  std::vector<WeightSummary> out;
  for (std::size_t wi = 0; wi < plan.weights.size(); ++wi) {
    const WeightSpec& w = plan.weights[wi];
    WeightSummary ws;
    ws.weight = column_name(w, 2);
    ws.alpha = w.alpha();
    ws.expected_exponent = 1.0 - 2.0 * w.alpha() / d;
    ws.fits_valid = true;
    std::vector<std::pair<double, double>> var_pts, dk_pts, dw_pts;
    ws.v_alpha_hat = std::numeric_limits<double>::infinity();
    for (std::size_t ti = 0; ti < nt; ++ti) {
      std::vector<double> values;
      for (const auto& r : reps) {
        if (r.t_index == ti && !r.skipped) values.push_back(r.values[wi]);
      }
      PerTStats s;
      s.t = plan.t_values[ti];
      s.replications = values.size();
      s.mean = mean(values);
      s.variance = sample_variance(values);
      if (s.variance > 0.0) {
        const auto z = standardize(values, s.mean, std::sqrt(s.variance));
        s.d_kolmogorov = empirical_kolmogorov(z);
        s.d_wasserstein1 = empirical_wasserstein1(z);
        const auto zv = standardize(values, s.mean, s.variance);
        s.d_kolmogorov_var = empirical_kolmogorov(zv);
        s.d_wasserstein1_var = empirical_wasserstein1(zv);
        var_pts.emplace_back(s.t, s.variance);
        dk_pts.emplace_back(s.t, s.d_kolmogorov);
        dw_pts.emplace_back(s.t, s.d_wasserstein1);
        ws.v_alpha_hat = std::min(ws.v_alpha_hat, s.variance / std::pow(s.t, ws.expected_exponent));
      } else {
        ws.fits_valid = false;
      }
      ws.per_t.push_back(s);
    }
    if (!std::isfinite(ws.v_alpha_hat)) ws.v_alpha_hat = 0.0;
    if (ws.fits_valid && nt >= 2) {
      ws.variance_fit = fit_loglog_slope(var_pts);
      ws.variance_exponent = ws.variance_fit.slope;
      ws.kolmogorov_fit = fit_loglog_slope(dk_pts);
      ws.wasserstein_fit = fit_loglog_slope(dw_pts);
    } else {
      ws.fits_valid = false;
    }
    ws.kolmogorov_decreasing = true;
    for (std::size_t ti = 1; ti < ws.per_t.size(); ++ti) {
      if (!(ws.per_t[ti].d_kolmogorov < ws.per_t[ti - 1].d_kolmogorov)) ws.kolmogorov_decreasing = false;
    }
    out.push_back(std::move(ws));
  }
  return out;
}

void write_replications_csv(std::ostream& out, const SummaryStats& stats, std::span<const WeightSpec> weights) {
  std::string buf = "t,rep,seed,n_points";
  for (const auto& w : weights) buf += "," + column_name(w, weights.size());
  buf += ",elapsed_ms\n";
  for (const auto& r : stats.replications) {
    buf += format_double(r.t) + "," + std::to_string(r.rep) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.n_points);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      buf += ",";
      if (!r.skipped) buf += format_double(r.values[k]);
    }
    buf += ",";
    if (r.elapsed_ms >= 0.0) buf += format_double(r.elapsed_ms);
    buf += "\n";
  }
  out << buf;
}

// ---------------------------------------------------------------------------
// Influential pairs

namespace {

bool unit_ball_inside(const Window& window, const Point& c) {
  if (window.shape() == Window::Shape::Ball) return distance(c, window.anchor()) + 1.0 <= window.size();
  const Point lo = window.lower();
  const Point hi = window.upper();
  for (std::size_t k = 0; k < c.dim(); ++k) {
    if (c[k] - 1.0 < lo[k] || c[k] + 1.0 > hi[k]) return false;
  }
  return true;
}

Point uniform_in_unit_ball(Rng& rng, const Point& c) {
  for (;;) {
    Point v(c.dim());
    for (std::size_t k = 0; k < c.dim(); ++k) v[k] = rng.uniform(-1.0, 1.0);
    if (squared_norm(v) <= 1.0) return c + v;
  }
}

}  // namespace

std::vector<InfluentialReport> detect_influential(std::span<const Point> points, const Window& window,
                                                  const ForbiddenRegionFamily& family, const WeightSpec& weight,
                                                  std::span<const std::pair<Point, Point>> pairs,
                                                  const InfluentialOptions& options) {
  if (!(options.a > options.b)) throw std::invalid_argument("detect_influential needs a > b");
  if (options.ball_samples == 0) throw std::invalid_argument("detect_influential needs ball samples");
  for (const auto& [x, y] : pairs) {
    if (!unit_ball_inside(window, x) || !unit_ball_inside(window, y)) {
      throw std::invalid_argument("influential pair: unit balls must lie inside the window");
    }
    if (!(distance(x, y) > 2.0)) throw std::invalid_argument("influential pair: unit balls must be disjoint");
  }
  const ProximityGraph g = build_accelerated(points, family);
  const InsertionProbe probe(points, g, family);
  const double h = default_resolution(window, options.per_axis);

  std::vector<InfluentialReport> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [x, y] = pairs[p];
    Rng rng(derive_seed({options.seed, p}));
    InfluentialReport rep;
    rep.x = x;
    rep.y = y;
    rep.samples = options.ball_samples;
    std::size_t above = 0, below = 0;
    for (std::size_t s = 0; s < options.ball_samples; ++s) {
      if (add_one_cost(probe, weight, uniform_in_unit_ball(rng, x)) > options.a) ++above;
      if (add_one_cost(probe, weight, uniform_in_unit_ball(rng, y)) < options.b) ++below;
    }
    const double n = static_cast<double>(options.ball_samples);
    rep.fraction_above = static_cast<double>(above) / n;
    rep.fraction_below = static_cast<double>(below) / n;
    rep.radius_x = estimate_radius(points, window, family, BaseSet::ball(x, 1.0), h).max_distance;
    rep.radius_y = estimate_radius(points, window, family, BaseSet::ball(y, 1.0), h).max_distance;
    rep.radius_x_ok = rep.radius_x <= options.r;
    rep.radius_y_ok = rep.radius_y <= options.r;
    rep.influential = above > 0 && below > 0 && rep.radius_x_ok && rep.radius_y_ok;
    out.push_back(rep);
  }
  return out;
}

}  // namespace pxg
