#include "pxg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace pxg {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

std::vector<double> standardize(std::span<const double> xs, double center, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("standardization scale must be positive");
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((x - center) / scale);
  return out;
}

double empirical_kolmogorov(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("empirical_kolmogorov: empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max({d, std::fabs(static_cast<double>(i + 1) / n - f), std::fabs(static_cast<double>(i) / n - f)});
  }
  return std::min(d, 1.0);
}

namespace {

/// Antiderivative of Phi.
double phi_integral(double x) {
  return x * normal_cdf(x) + normal_pdf(x);
}

/// Integral over [a, b] of |c - Phi|, c in (0, 1).
double abs_gap(double a, double b, double c) {
  if (!(b > a)) return 0.0;
  const double q = normal_quantile(c);
  // c - Phi is positive left of q and negative right of it.
  auto signed_part = [&](double lo, double hi) { return c * (hi - lo) - (phi_integral(hi) - phi_integral(lo)); };
  if (q <= a) return -signed_part(a, b);
  if (q >= b) return signed_part(a, b);
  return signed_part(a, q) - signed_part(q, b);
}

}  // namespace

double empirical_wasserstein1(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("empirical_wasserstein1: empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  // Left tail: integral of Phi up to the minimum; right tail: of 1 - Phi.
  double total = phi_integral(xs.front());
  total += normal_pdf(xs.back()) - xs.back() * normal_cdf(-xs.back());
  for (std::size_t i = 1; i < n; ++i) {
    total += abs_gap(xs[i - 1], xs[i], static_cast<double>(i) / static_cast<double>(n));
  }
  return std::max(total, 0.0);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("linear_fit: needs at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit fit;
  fit.n = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.corr = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return fit;
}

LinearFit fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  std::vector<double> lx, ly;
  for (const auto& [t, v] : points) {
    if (!(t > 0.0) || !(v > 0.0)) throw std::domain_error("log-log fit needs positive values");
    lx.push_back(std::log(t));
    ly.push_back(std::log(v));
  }
  return linear_fit(lx, ly);
}

}  // namespace pxg
