#include "pxg/functional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pxg/random.hpp"

namespace pxg {

WeightSpec WeightSpec::power(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("weight alpha must be finite and >= 0");
  WeightSpec w;
  w.kind_ = Kind::PowerLaw;
  w.alpha_ = alpha;
  w.c_ = 1.0;
  w.name_ = "power";
  return w;
}

WeightSpec WeightSpec::custom(std::string name, Fn fn, double growth_constant, double alpha) {
  if (!fn) throw std::invalid_argument("custom weight needs a function");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("weight alpha must be finite and >= 0");
  if (!(growth_constant >= 0.0) || !std::isfinite(growth_constant)) {
    throw std::invalid_argument("weight growth constant must be finite and >= 0");
  }
  WeightSpec w;
  w.kind_ = Kind::Custom;
  w.alpha_ = alpha;
  w.c_ = growth_constant;
  w.name_ = std::move(name);
  w.fn_ = std::move(fn);
  return w;
}

WeightSpec WeightSpec::builtin(const std::string& name) {
  if (name == "log1p") {
    return custom(name, [](const Point& x, const Point& y) { return std::log1p(distance(x, y)); }, 1.0, 1.0);
  }
  if (name == "saturating") {
    return custom(name, [](const Point& x, const Point& y) { return -std::expm1(-distance(x, y)); }, 1.0, 0.0);
  }
  throw std::invalid_argument("unknown built-in weight '" + name + "'");
}

double WeightSpec::operator()(const Point& x, const Point& y) const {
  if (kind_ == Kind::Custom) return fn_(x, y);
  if (alpha_ == 0.0) return 1.0;
  const double r = distance(x, y);
  if (alpha_ == 1.0) return r;
  if (alpha_ == 2.0) return r * r;
  return std::pow(r, alpha_);
}

double WeightSpec::c_alpha() const {
  return c_ * std::max(1.0, std::pow(2.0, alpha_ - 1.0));
}

std::size_t check_weight(const WeightSpec& weight, std::size_t dim, std::size_t samples, std::uint64_t seed,
                         double scale) {
  Rng rng(seed);
  std::size_t bad = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    Point x(dim), y(dim);
    // Mix scales so both the small- and large-distance regimes are probed.
    const double span = scale * std::exp(rng.uniform(-8.0, 0.0));
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = rng.uniform(-span, span);
      y[k] = rng.uniform(-span, span);
    }
    if (x == y) continue;
    const double a = weight(x, y);
    const double b = weight(y, x);
    const double bound = weight.growth_constant() * std::pow(distance(x, y), weight.alpha());
    if (!std::isfinite(a) || a != b || std::fabs(a) > bound * (1.0 + 1e-12) + 1e-300) ++bad;
  }
  return bad;
}

double eval_L(const ProximityGraph& graph, std::span<const Point> points, const WeightSpec& weight) {
  if (graph.n != points.size()) throw std::invalid_argument("eval_L: graph and point set sizes differ");
  double sum = 0.0;
  for (const Edge& e : graph.edges) sum += weight(points[e.i], points[e.j]);
  return sum;
}

double eval_L_after(const ProximityGraph& graph, std::span<const Point> points, const EdgeDiff& diff,
                    const Point& x, const WeightSpec& weight) {
  if (diff.already_present) return eval_L(graph, points, weight);
  std::vector<Point> all(points.begin(), points.end());
  all.push_back(x);
  return eval_L(apply_diff(graph, diff), all, weight);
}

double diff_cost(const EdgeDiff& diff, std::span<const Point> points, const Point& x, const WeightSpec& weight) {
  double gained = 0.0;
  for (const Edge& e : diff.added) gained += weight(x, points[e.i]);
  double lost = 0.0;
  for (const Edge& e : diff.removed) lost += weight(points[e.i], points[e.j]);
  return gained - lost;
}

double add_one_cost(const InsertionProbe& probe, const WeightSpec& weight, const Point& x) {
  const EdgeDiff d = probe.diff(x);
  if (d.already_present) return 0.0;
  return diff_cost(d, probe.points(), x, weight);
}

double add_one_cost(std::span<const Point> points, const ProximityGraph& graph, const ForbiddenRegionFamily& family,
                    const WeightSpec& weight, const Point& x) {
  return add_one_cost(InsertionProbe(points, graph, family), weight, x);
}

namespace {

double total_with(std::span<const Point> points, std::initializer_list<const Point*> extra,
                  const ForbiddenRegionFamily& family, const WeightSpec& weight) {
  std::vector<Point> all(points.begin(), points.end());
  for (const Point* p : extra) {
    if (std::find(all.begin(), all.end(), *p) == all.end()) all.push_back(*p);
  }
  return eval_L(build_accelerated(all, family), all, weight);
}

}  // namespace

double second_difference(std::span<const Point> points, const ForbiddenRegionFamily& family,
                         const WeightSpec& weight, const Point& x, const Point& y) {
  if (x == y) throw std::invalid_argument("second difference needs distinct points");
  const double both = total_with(points, {&x, &y}, family, weight);
  const double with_y = total_with(points, {&y}, family, weight);
  const double with_x = total_with(points, {&x}, family, weight);
  const double none = total_with(points, {}, family, weight);
  return both - with_y - with_x + none;
}

double second_difference_iterated(std::span<const Point> points, const ForbiddenRegionFamily& family,
                                  const WeightSpec& weight, const Point& x, const Point& y) {
  if (x == y) throw std::invalid_argument("second difference needs distinct points");
  const ProximityGraph g = build_accelerated(points, family);
  const double dx = add_one_cost(points, g, family, weight, x);

  const InsertionProbe probe(points, g, family);
  const EdgeDiff dy = probe.diff(y);
  std::vector<Point> with_y(points.begin(), points.end());
  if (!dy.already_present) with_y.push_back(y);
  const ProximityGraph gy = apply_diff(g, dy);
  return add_one_cost(with_y, gy, family, weight, x) - dx;
}

DerivativeBound derivative_bound_check(std::span<const Point> points, const ProximityGraph& graph,
                                       const ForbiddenRegionFamily& family, const WeightSpec& weight,
                                       const Point& x) {
  const InsertionProbe probe(points, graph, family);
  DerivativeBound out;
  const EdgeDiff d = probe.diff(x);
  if (d.already_present) {
    out.ok = true;
    return out;
  }
  out.lhs = std::fabs(diff_cost(d, points, x, weight));
  for (const Edge& e : d.removed) {
    out.support.push_back(e.i);
    out.support.push_back(e.j);
  }
  for (const Edge& e : d.added) out.support.push_back(e.i);
  std::sort(out.support.begin(), out.support.end());
  out.support.erase(std::unique(out.support.begin(), out.support.end()), out.support.end());
  double sum = 0.0;
  for (std::size_t z : out.support) sum += std::pow(distance(points[z], x), weight.alpha());
  out.rhs = weight.c_alpha() * sum;
  out.ok = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

}  // namespace pxg
