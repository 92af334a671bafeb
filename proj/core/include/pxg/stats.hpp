#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace pxg {

double normal_pdf(double x);
/// Phi(x), via the complementary error function.
double normal_cdf(double x);
/// Phi^{-1}(p) for p in (0, 1); throws otherwise.
double normal_quantile(double p);

double mean(std::span<const double> xs);
/// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> xs);

/// (x - center) / scale for every x.
std::vector<double> standardize(std::span<const double> xs, double center, double scale);

/// sup |F_n - Phi|, evaluated exactly at the order statistics.
/// Throws std::invalid_argument on an empty sample.
double empirical_kolmogorov(std::span<const double> sample);

/// Integral of |F_n - Phi|: exact between order statistics, analytic tails.
double empirical_wasserstein1(std::span<const double> sample);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double corr = 0.0;  ///< Pearson correlation; 0 when either variable is constant
  std::size_t n = 0;
};

/// Least squares y ~ slope * x + intercept; needs two distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Least squares on (log t, log value). Throws std::domain_error on a
/// nonpositive t or value.
LinearFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

}  // namespace pxg
