#include "pxg/stabilize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "pxg/graph.hpp"
#include "pxg/parallel.hpp"
#include "pxg/random.hpp"
#include "pxg/spatial_grid.hpp"
#include "pxg/stats.hpp"

namespace pxg {

double default_resolution(const Window& window, std::size_t per_axis) {
  if (per_axis < 2) throw std::invalid_argument("lattice needs at least two nodes per axis");
  const double extent = window.upper()[0] - window.lower()[0];
  return extent / static_cast<double>(per_axis - 1);
}

std::vector<Point> lattice_nodes(const Window& window, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("lattice spacing must be positive");
  const std::size_t d = window.dim();
  const Point lo = window.lower();
  const Point hi = window.upper();
  std::array<std::size_t, kMaxDim> count{};
  double total = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    count[k] = static_cast<std::size_t>(std::floor((hi[k] - lo[k]) / h + 1e-9)) + 1;
    total *= static_cast<double>(count[k]);
  }
  if (total > 4e6) throw std::invalid_argument("lattice too fine: more than 4e6 nodes");
  std::vector<Point> out;
  std::array<std::size_t, kMaxDim> idx{};
  for (;;) {
    Point p(d);
    for (std::size_t k = 0; k < d; ++k) p[k] = lo[k] + h * static_cast<double>(idx[k]);
    if (window.contains(p)) out.push_back(p);
    std::size_t k = d;
    for (;;) {
      if (k == 0) return out;
      --k;
      if (++idx[k] < count[k]) break;
      idx[k] = 0;
    }
  }
}

// ---------------------------------------------------------------------------
// Region geometry relative to U

namespace {

struct LensFrame {
  double along;   // signed offset of c along the axis, from the midpoint
  double across;  // distance of c from the axis line
};

LensFrame lens_frame(const Region& region, const Point& c) {
  const Point u = (1.0 / region.length()) * (region.first() - region.second());
  const Point v = c - region.mid();
  const double a = dot(v, u);
  return {a, std::sqrt(std::max(0.0, squared_norm(v) - a * a))};
}

/// Distance from c to the closed lens B(x, l) ∩ B(y, l).
double lens_distance(const Region& region, const Point& c) {
  const double len = region.length();
  const double len2 = len * len;
  const Point& x = region.first();
  const Point& y = region.second();
  const double dx2 = squared_distance(c, x);
  const double dy2 = squared_distance(c, y);
  if (dx2 <= len2 && dy2 <= len2) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  // Nearest point of one ball; optimal whenever it lies in the other ball.
  auto try_ball = [&](const Point& centre, double d2, const Point& other) {
    const Point p = d2 <= len2 ? c : centre + (len / std::sqrt(d2)) * (c - centre);
    if (squared_distance(p, other) <= len2 * (1.0 + 1e-12)) best = std::min(best, distance(p, c));
  };
  try_ball(x, dx2, y);
  try_ball(y, dy2, x);
  if (region.family().dim() > 1) {
    const LensFrame f = lens_frame(region, c);
    const double rho = len * std::sqrt(3.0) / 2.0;
    best = std::min(best, std::hypot(f.along, f.across - rho));
  }
  return best;
}

double lens_sup(const Region& region, const Point& c) {
  const double len = region.length();
  const double len2 = len * len;
  const Point& x = region.first();
  const Point& y = region.second();
  double best = std::max(distance(c, x), distance(c, y));
  auto try_ball = [&](const Point& centre, const Point& other) {
    const double dc = distance(c, centre);
    if (dc == 0.0) return;
    const Point p = centre + (len / dc) * (centre - c);
    if (squared_distance(p, other) <= len2 * (1.0 + 1e-12)) best = std::max(best, dc + len);
  };
  try_ball(x, y);
  try_ball(y, x);
  if (region.family().dim() > 1) {
    const LensFrame f = lens_frame(region, c);
    best = std::max(best, std::hypot(f.along, f.across + len * std::sqrt(3.0) / 2.0));
  }
  return best;
}

}  // namespace

double region_sup_distance(const Region& region, const Point& c) {
  const auto kind = region.family().kind();
  if (kind == RegionKind::Gabriel || (kind == RegionKind::RelativeNeighborhood && c.dim() == 1)) {
    return distance(c, region.mid()) + 0.5 * region.length();
  }
  if (kind == RegionKind::RelativeNeighborhood) return lens_sup(region, c);
  double best = 0.0;
  for (const Point& w : region.family().template_samples()) best = std::max(best, distance(c, region.to_world(w)));
  return best;
}

bool region_touches(const Region& region, const BaseSet& u) {
  if (u.radius == 0.0) return region.closure_contains(u.center);
  switch (region.family().kind()) {
    case RegionKind::Gabriel:
      return distance(u.center, region.mid()) <= 0.5 * region.length() + u.radius;
    case RegionKind::RelativeNeighborhood:
      if (u.center.dim() == 1) return distance(u.center, region.mid()) <= 0.5 * region.length() + u.radius;
      return lens_distance(region, u.center) <= u.radius;
    case RegionKind::TemplateIsotropic:
      break;
  }
  if (region.closure_contains(u.center)) return true;
  for (std::size_t k = 0; k < u.center.dim(); ++k) {
    Point p = u.center;
    p[k] += u.radius;
    if (region.closure_contains(p)) return true;
    p[k] = u.center[k] - u.radius;
    if (region.closure_contains(p)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Pair enumeration

namespace {

void check_inputs(const Window& window, const ForbiddenRegionFamily& family, const BaseSet& u, double h) {
  if (window.dim() != family.dim() || u.center.dim() != family.dim()) {
    throw std::invalid_argument("window, family and base point dimensions differ");
  }
  if (!(h > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  if (h > window.diameter()) throw std::invalid_argument("grid resolution exceeds the window diameter");
  if (!(u.radius >= 0.0)) throw std::invalid_argument("base ball radius must be >= 0");
  if (!window.contains(u.center)) throw std::invalid_argument("base point lies outside the window");
}

std::vector<Point> candidate_set(const Window& window, double h, std::span<const Point> points, const Point& c) {
  std::vector<Point> out = lattice_nodes(window, h);
  out.insert(out.end(), points.begin(), points.end());
  out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct PairScanner {
  const ForbiddenRegionFamily& family;
  const BaseSet& u;
  std::span<const Point> candidates;
  std::vector<double> reach;  // |candidate - c|
  std::vector<std::size_t> order;  // by reach, descending
  double factor;
  /// Candidates farther than this from c take part in no pair.
  double reach_cap = std::numeric_limits<double>::infinity();

  PairScanner(const ForbiddenRegionFamily& f, const BaseSet& base, std::span<const Point> cands)
      : family(f), u(base), candidates(cands), factor(f.bounding_factor() * (1.0 + 1e-12)) {
    reach.resize(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) reach[i] = distance(cands[i], u.center);
    order.resize(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return reach[a] > reach[b]; });
  }

  /// Calls visit(a, b, region) for touching pairs. With a finite `floor`,
  /// pairs whose bound cannot exceed *floor are skipped; visit may raise it.
  template <class Visit>
  std::size_t scan(const double* floor, Visit&& visit) const {
    const double eps = u.radius;
    const double lever = (0.5 + factor) * (1.0 + 1e-9);
    std::size_t examined = 0;
    for (std::size_t ia = 0; ia < order.size(); ++ia) {
      const std::size_t a = order[ia];
      if (reach[a] > reach_cap) continue;
      if (floor && lever * 2.0 * reach[a] + eps <= *floor) break;
      for (std::size_t ib = ia + 1; ib < order.size(); ++ib) {
        const std::size_t b = order[ib];
        if (floor && lever * (reach[a] + reach[b]) + eps <= *floor) break;
        ++examined;
        const Point& pa = candidates[a];
        const Point& pb = candidates[b];
        const double len = distance(pa, pb);
        const double dc = distance(u.center, midpoint(pa, pb));
        const double bound = factor * len;
        if (dc > (bound + eps) * (1.0 + 1e-9)) continue;
        if (floor && (dc + bound + eps) * (1.0 + 1e-9) <= *floor) continue;
        const Region region = family.region(pa, pb);
        if (!region_touches(region, u)) continue;
        visit(a, b, region);
      }
    }
    return examined;
  }
};

}  // namespace

RegionUnionEstimate estimate_radius(std::span<const Point> points, const Window& window,
                                    const ForbiddenRegionFamily& family, const BaseSet& u, double h) {
  check_inputs(window, family, u, h);
  RegionUnionEstimate est;
  est.base = u;
  est.resolution = h;
  est.lattice_nodes = lattice_nodes(window, h).size();
  const std::vector<Point> cands = candidate_set(window, h, points, u.center);
  est.candidates = cands.size();
  const bool canonical = family.kind() != RegionKind::TemplateIsotropic;
  est.touch_samples = u.radius == 0.0 ? 1 : (canonical ? 0 : 1 + 2 * family.dim());

  const SpatialGrid grid(points, default_cell_size(window, points.size()));
  PairScanner scanner(family, u, cands);
  std::optional<ClearanceMap> clearance;
  if (canonical && !points.empty()) {
    // An accepted pair of length l has clearance >= delta * l at its
    // midpoint, and that midpoint lies within factor * l + eps of c.
    clearance.emplace(grid, window.lower(), window.upper(), grid.cell_size());
    const double delta = family.inscribed_template_ball().radius;
    double cap = clearance->global_max() / delta;
    for (int iter = 0; iter < 4; ++iter) {
      cap = std::min(cap, clearance->max_within(u.center, scanner.factor * cap + u.radius) / delta);
    }
    scanner.reach_cap = ((0.5 + scanner.factor) * cap + u.radius) * (1.0 + 1e-9);
  }
  double best = 0.0;
  est.pairs_examined = scanner.scan(&best, [&](std::size_t a, std::size_t b, const Region& region) {
    if (clearance) {
      const Ball ball = region.inscribed_ball();
      if (clearance->bound_at(ball.center) < ball.radius * (1.0 - 1e-9)) return;
    }
    if (region_occupied(region, grid)) return;
    ++est.pairs_accepted;
    const double value = region_sup_distance(region, u.center) + u.radius;
    if (value > best || !est.witness) {
      best = std::max(best, value);
      est.witness = std::make_pair(cands[a], cands[b]);
    }
  });
  est.max_distance = best;
  est.padded_distance = best + h * std::sqrt(static_cast<double>(family.dim()));
  return est;
}

MonotonicityReport check_monotonicity(std::span<const Point> mu, std::span<const Point> nu, const Window& window,
                                      const ForbiddenRegionFamily& family, const BaseSet& u, double h) {
  check_inputs(window, family, u, h);
  std::vector<Point> small(mu.begin(), mu.end());
  std::vector<Point> large(nu.begin(), nu.end());
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());
  if (!std::includes(large.begin(), large.end(), small.begin(), small.end())) {
    throw std::invalid_argument("check_monotonicity: mu is not contained in nu");
  }
  std::vector<Point> extra;
  std::set_difference(large.begin(), large.end(), small.begin(), small.end(), std::back_inserter(extra));

  const std::vector<Point> cands = candidate_set(window, h, nu, u.center);
  const SpatialGrid grid_small(mu, default_cell_size(window, mu.size()));
  const SpatialGrid grid_large(nu, default_cell_size(window, nu.size()));
  const PairScanner scanner(family, u, cands);

  MonotonicityReport rep;
  rep.subset = true;
  rep.extra_outside = true;
  bool sets_equal = true;
  scanner.scan(nullptr, [&](std::size_t, std::size_t, const Region& region) {
    const bool in_small = !region_occupied(region, grid_small);
    const bool in_large = !region_occupied(region, grid_large);
    const double value = region_sup_distance(region, u.center) + u.radius;
    if (in_small) {
      ++rep.accepted_small;
      rep.radius_small = std::max(rep.radius_small, value);
      for (const Point& p : extra) {
        if (region.contains(p)) rep.extra_outside = false;
      }
    }
    if (in_large) {
      ++rep.accepted_large;
      rep.radius_large = std::max(rep.radius_large, value);
      if (!in_small) rep.subset = false;
    }
    if (in_small != in_large) sets_equal = false;
  });
  if (rep.extra_outside) rep.equal_when_outside = sets_equal && rep.radius_small == rep.radius_large;
  return rep;
}

// ---------------------------------------------------------------------------
// Tails

double kappa_constant(double delta, double diameter, std::size_t dim, double epsilon) {
  const double d = static_cast<double>(dim);
  return std::pow((1.0 - 2.0 * epsilon) * delta / (diameter * std::sqrt(d)), d);
}

TailResult tail_survival(const ForbiddenRegionFamily& family, const Window& window, const TailOptions& options) {
  if (options.replications < 100) throw std::invalid_argument("tail_survival needs at least 100 replications");
  if (options.t_values.empty()) throw std::invalid_argument("tail_survival needs t values");
  if (!(options.epsilon >= 0.0 && options.epsilon < 0.5)) throw std::invalid_argument("epsilon must be in [0, 1/2)");
  const std::size_t d = family.dim();
  const double h = default_resolution(window, options.per_axis);
  const Point center = window.center();

  TailResult out;
  out.c_lambda = 1.0 / window.volume();
  const double delta = options.delta > 0.0 ? options.delta : family.scaled_ball_delta();
  out.kappa = kappa_constant(delta, family.normalized_diameter(), d, options.epsilon);

  const std::size_t nt = options.t_values.size();
  const std::size_t reps = options.replications;
  out.radii.assign(nt, std::vector<double>(reps, 0.0));
  parallel_for(nt * reps, options.threads, [&](std::size_t task) {
    const std::size_t ti = task / reps;
    const std::size_t rep = task % reps;
    const PointCloud cloud = sample_poisson(window, options.t_values[ti], derive_seed({options.seed, ti, rep}));
    out.radii[ti][rep] =
        estimate_radius(cloud.points, window, family, BaseSet::ball(center, options.epsilon), h).max_distance;
  });

  std::vector<double> grid = options.r_grid;
  if (grid.empty()) {
    double top = 0.0;
    for (const auto& rs : out.radii) {
      for (double r : rs) top = std::max(top, r);
    }
    constexpr std::size_t kSteps = 64;
    for (std::size_t k = 0; k < kSteps; ++k) grid.push_back(top * static_cast<double>(k) / (kSteps - 1));
  }

  for (std::size_t ti = 0; ti < nt; ++ti) {
    const double t = options.t_values[ti];
    std::vector<double> xs, ys;
    for (double r : grid) {
      SurvivalRow row{t, r, 0, reps, 0.0};
      for (double v : out.radii[ti]) row.survivors += v >= r ? 1 : 0;
      row.survival = static_cast<double>(row.survivors) / static_cast<double>(reps);
      out.rows.push_back(row);
      if (row.survival >= 0.01 && row.survival <= 0.9) {
        xs.push_back(std::pow(r, static_cast<double>(d)));
        ys.push_back(std::log(row.survival));
      }
    }
    TailFit fit;
    fit.t = t;
    fit.points_used = xs.size();
    fit.reference_slope = -out.c_lambda * out.kappa * t;
    fit.flagged = xs.size() < 4;
    if (xs.size() >= 2 && xs.front() != xs.back()) {
      const LinearFit lf = linear_fit(xs, ys);
      fit.slope = lf.slope;
      fit.intercept = lf.intercept;
      fit.corr = lf.corr;
    }
    out.fits.push_back(fit);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stabilization contract

bool ContractReport::all_resolved() const {
  for (const auto& v : violations) {
    if (!v.resolved) return false;
  }
  for (const auto& v : add_many_violations) {
    if (!v.resolved) return false;
  }
  return true;
}

namespace {

struct TrialOutcome {
  bool found = false;
  std::size_t draws = 0;
  bool zero = false;
  bool add_many_unchanged = false;
  std::optional<ContractViolation> violation;
  std::optional<ContractViolation> add_many_violation;
};

double total_L(std::vector<Point> pts, const ForbiddenRegionFamily& family, const WeightSpec& weight) {
  return eval_L(build_accelerated(pts, family), pts, weight);
}

bool nearly_equal(double a, double b, double scale) {
  return std::fabs(a - b) <= 1e-9 * std::max(1.0, scale);
}

}  // namespace

ContractReport check_stabilization_contract(const ForbiddenRegionFamily& family, const Window& window,
                                            const WeightSpec& weight, const ContractOptions& options) {
  if (options.n_min > options.n_max) throw std::invalid_argument("n_min exceeds n_max");
  if (!(options.margin >= 1.0)) throw std::invalid_argument("margin must be >= 1");
  const double h = default_resolution(window, options.per_axis);
  std::vector<TrialOutcome> outcomes(options.trials);

  parallel_for(options.trials, options.threads, [&](std::size_t trial) {
    TrialOutcome& out = outcomes[trial];
    Rng rng(derive_seed({options.seed, 0x57AB1ULL, trial}));
    constexpr std::size_t kMaxDraws = 200;
    for (out.draws = 1; out.draws <= kMaxDraws; ++out.draws) {
      const std::size_t span = options.n_max - options.n_min + 1;
      const std::size_t n = options.n_min + static_cast<std::size_t>(rng.next() % span);
      const std::vector<Point> mu = sample_binomial(window, n, rng.next()).points;
      const Point x = window.sample_uniform(rng);
      const double radius = estimate_radius(mu, window, family, BaseSet::point(x), h).padded_distance;
      const double far = options.margin * radius;

      auto draw_far = [&](Point& y) {
        for (int k = 0; k < 200; ++k) {
          y = window.sample_uniform(rng);
          if (distance(x, y) > far) return true;
        }
        return false;
      };
      Point y;
      if (!draw_far(y)) continue;
      out.found = true;

      auto refine = [&](ContractViolation& v, std::initializer_list<Point> partners) {
        v.refined_radius = estimate_radius(mu, window, family, BaseSet::point(x), h / 2.0).padded_distance;
        v.resolved = false;
        for (const Point& p : partners) {
          if (distance(x, p) <= options.margin * v.refined_radius) v.resolved = true;
        }
      };

      std::vector<Point> with_x = mu, with_y = mu, with_xy = mu;
      with_x.push_back(x);
      with_y.push_back(y);
      with_xy.push_back(x);
      with_xy.push_back(y);
      const double l0 = total_L(mu, family, weight);
      const double lx = total_L(with_x, family, weight);
      const double ly = total_L(with_y, family, weight);
      const double lxy = total_L(with_xy, family, weight);
      const double d2 = lxy - ly - lx + l0;
      out.zero = nearly_equal(lxy - ly, lx - l0, std::fabs(lxy) + std::fabs(l0));
      if (!out.zero) {
        ContractViolation v{trial, x, y, radius, 0.0, d2, false};
        refine(v, {y});
        out.violation = v;
      }

      std::vector<Point> extra;
      bool ok = true;
      for (std::size_t k = 0; k < options.extra_points && ok; ++k) {
        Point z;
        ok = draw_far(z) && std::find(mu.begin(), mu.end(), z) == mu.end() && z != x;
        extra.push_back(z);
      }
      if (ok) {
        std::vector<Point> grown = mu;
        grown.insert(grown.end(), extra.begin(), extra.end());
        std::vector<Point> grown_x = grown;
        grown_x.push_back(x);
        const double before = lx - l0;
        const double lg = total_L(grown, family, weight);
        const double lgx = total_L(grown_x, family, weight);
        out.add_many_unchanged = nearly_equal(lgx - lg, before, std::fabs(lgx) + std::fabs(lx));
        if (!out.add_many_unchanged) {
          ContractViolation v{trial, x, extra.front(), radius, 0.0, (lgx - lg) - before, false};
          v.refined_radius = estimate_radius(mu, window, family, BaseSet::point(x), h / 2.0).padded_distance;
          for (const Point& p : extra) {
            if (distance(x, p) <= options.margin * v.refined_radius) v.resolved = true;
          }
          out.add_many_violation = v;
        }
      }
      return;
    }
  });

  ContractReport rep;
  for (const auto& out : outcomes) {
    rep.draws += out.draws;
    if (!out.found) {
      rep.log.push_back("no far partner found after repeated draws");
      continue;
    }
    ++rep.trials;
    rep.zero += out.zero ? 1 : 0;
    if (out.violation) {
      const auto& v = *out.violation;
      std::ostringstream line;
      line << "trial " << v.trial << ": D2 = " << v.second_difference << ", |y-x| = " << distance(v.x, v.y)
           << ", R(h) = " << v.radius << ", R(h/2) = " << v.refined_radius
           << (v.resolved ? ", resolved at h/2" : ", NOT resolved at h/2");
      rep.log.push_back(line.str());
      rep.violations.push_back(v);
    }
    if (out.add_many_violation || out.add_many_unchanged) ++rep.add_many_trials;
    rep.add_many_unchanged += out.add_many_unchanged ? 1 : 0;
    if (out.add_many_violation) {
      const auto& v = *out.add_many_violation;
      std::ostringstream line;
      line << "trial " << v.trial << " (add-many): change in D_x L = " << v.second_difference
           << ", R(h) = " << v.radius << ", R(h/2) = " << v.refined_radius
           << (v.resolved ? ", resolved at h/2" : ", NOT resolved at h/2");
      rep.log.push_back(line.str());
      rep.add_many_violations.push_back(v);
    }
  }
  return rep;
}

}  // namespace pxg
