#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pxg/harness.hpp"
#include "pxg/parallel.hpp"
#include "pxg/random.hpp"
#include "pxg/stats.hpp"

namespace pxg {
namespace {

std::vector<double> quantile_grid(std::size_t n) {
  std::vector<double> xs;
  for (std::size_t i = 1; i <= n; ++i) xs.push_back(normal_quantile((static_cast<double>(i) - 0.5) / n));
  return xs;
}

TEST(Stats, NormalCdfAndQuantile) {
  for (double x : {-6.0, -2.5, -1.0, -0.1, 0.0, 0.7, 1.0, 3.3}) {
    EXPECT_NEAR(normal_cdf(x), testing::phi_oracle(x), 1e-12) << x;
  }
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  for (double p : {1e-12, 1e-6, 0.001, 0.02, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-9) << p;
  }
  EXPECT_THROW(normal_quantile(0.0), std::domain_error);
  EXPECT_THROW(normal_quantile(1.0), std::domain_error);
  EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * M_PI), 1e-15);
}

TEST(Stats, Kolmogorov) {
  EXPECT_EQ(empirical_kolmogorov(std::vector<double>{0.0}), 0.5);
  EXPECT_NEAR(empirical_kolmogorov(std::vector<double>{-1.0, 1.0}), 0.3413, 1e-4);
  EXPECT_LE(empirical_kolmogorov(quantile_grid(1000)), 0.0006);
  EXPECT_THROW(empirical_kolmogorov(std::vector<double>{}), std::invalid_argument);
  std::mt19937_64 eng(61);
  std::normal_distribution<double> n(0.3, 1.4);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> xs(40);
    for (auto& x : xs) x = n(eng);
    xs.push_back(xs.front());  // a tie
    const double d = empirical_kolmogorov(xs);
    EXPECT_NEAR(d, testing::kolmogorov_oracle(xs), 1e-10);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(Stats, Wasserstein) {
  EXPECT_NEAR(empirical_wasserstein1(std::vector<double>{0.0}), std::sqrt(2.0 / M_PI), 1e-12);
  EXPECT_NEAR(empirical_wasserstein1(std::vector<double>{0.0}), 0.7979, 1e-3);
  EXPECT_LT(empirical_wasserstein1(quantile_grid(1000)), 0.01);
  EXPECT_THROW(empirical_wasserstein1(std::vector<double>{}), std::invalid_argument);
  std::mt19937_64 eng(62);
  std::normal_distribution<double> n(-0.2, 0.8);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> xs(30);
    for (auto& x : xs) x = n(eng);
    const double d = empirical_wasserstein1(xs);
    EXPECT_NEAR(d, testing::wasserstein_oracle(xs), 1e-6);
    for (double c : {-0.5, 0.1, 2.0}) {
      std::vector<double> shifted = xs;
      for (auto& x : shifted) x += c;
      EXPECT_LE(std::fabs(empirical_wasserstein1(shifted) - d), std::fabs(c) + 1e-12);
    }
  }
}

TEST(Stats, MomentsAndFits) {
  const std::vector<double> xs{1.0, 2.0, 4.0};
  EXPECT_DOUBLE_EQ(mean(xs), 7.0 / 3.0);
  EXPECT_NEAR(sample_variance(xs), 7.0 / 3.0, 1e-15);
  EXPECT_EQ(sample_variance(std::vector<double>{3.0}), 0.0);

  const std::vector<std::pair<double, double>> a{{1, 1}, {2, 0.5}, {4, 0.25}};
  EXPECT_NEAR(fit_loglog_slope(a).slope, -1.0, 1e-12);
  const std::vector<std::pair<double, double>> b{{1, 3}, {2, 3}, {4, 3}};
  EXPECT_NEAR(fit_loglog_slope(b).slope, 0.0, 1e-12);
  const std::vector<std::pair<double, double>> c{{1, 1}, {4, 0.5}};
  EXPECT_NEAR(fit_loglog_slope(c).slope, -0.5, 1e-12);
  const std::vector<std::pair<double, double>> bad{{1, 1}, {2, 0.0}};
  EXPECT_THROW(fit_loglog_slope(bad), std::domain_error);
}

TEST(Parallel, ResultsIndependentOfWidth) {
  std::vector<std::uint64_t> a(1000), b(1000);
  parallel_for(a.size(), 1, [&](std::size_t i) { a[i] = derive_seed({i}); });
  parallel_for(b.size(), 8, [&](std::size_t i) { b[i] = derive_seed({i}); });
  EXPECT_EQ(a, b);
  EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) { if (i == 7) throw std::runtime_error("boom"); }),
               std::runtime_error);
}

ExperimentPlan small_plan() {
  ExperimentPlan p;
  p.family = ForbiddenRegionFamily::gabriel(2);
  p.weights = {WeightSpec::power(0.0), WeightSpec::power(1.0)};
  p.window = Window::ball({0, 0}, 1.0);
  p.t_values = {30, 60};
  p.replications = 40;
  p.master_seed = 99;
  return p;
}

std::string csv_of(const SummaryStats& s, const ExperimentPlan& p) {
  std::ostringstream out;
  write_replications_csv(out, s, p.weights);
  return out.str();
}

TEST(Harness, ValidatePlan) {
  auto p = small_plan();
  EXPECT_NO_THROW(validate_plan(p));
  p.t_values = {60, 30};
  EXPECT_THROW(validate_plan(p), std::invalid_argument);
  p = small_plan();
  p.replications = 1;
  EXPECT_THROW(validate_plan(p), std::invalid_argument);
  p = small_plan();
  p.t_values = {};
  EXPECT_THROW(validate_plan(p), std::invalid_argument);
  p = small_plan();
  p.parameterization = Parameterization::GrowingWindow;
  p.window = Window::cube({1, 1}, 1.0);
  EXPECT_THROW(validate_plan(p), std::invalid_argument);
}

TEST(Harness, DeterministicAcrossWidths) {
  auto p = small_plan();
  p.threads = 1;
  const auto a = run_plan(p);
  p.threads = 8;
  const auto b = run_plan(p);
  EXPECT_EQ(csv_of(a, p), csv_of(b, p));
  ASSERT_EQ(a.weights.size(), 2u);
  for (std::size_t w = 0; w < 2; ++w) {
    EXPECT_EQ(a.weights[w].variance_exponent, b.weights[w].variance_exponent);
    for (std::size_t t = 0; t < 2; ++t) {
      EXPECT_EQ(a.weights[w].per_t[t].mean, b.weights[w].per_t[t].mean);
      EXPECT_EQ(a.weights[w].per_t[t].d_kolmogorov, b.weights[w].per_t[t].d_kolmogorov);
      EXPECT_EQ(a.weights[w].per_t[t].replications, p.replications);
    }
  }
  const std::string csv = csv_of(a, p);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,rep,seed,n_points,L_alpha0.0,L_alpha1.0,elapsed_ms");
}

TEST(Harness, SummaryRanges) {
  auto p = small_plan();
  p.process = ProcessKind::Binomial;
  const auto s = run_plan(p);
  for (const auto& w : s.weights) {
    for (const auto& t : w.per_t) {
      EXPECT_GE(t.variance, 0.0);
      EXPECT_GE(t.d_kolmogorov, 0.0);
      EXPECT_LE(t.d_kolmogorov, 1.0);
      EXPECT_GE(t.d_wasserstein1, 0.0);
    }
  }
  for (const auto& r : s.replications) EXPECT_EQ(r.n_points, static_cast<std::size_t>(r.t));
}

TEST(Harness, GrowingWindowAndCap) {
  auto p = small_plan();
  p.parameterization = Parameterization::GrowingWindow;
  p.max_points = 45;
  const auto s = run_plan(p);
  EXPECT_TRUE(s.partial);
  EXPECT_NE(s.partial_reason.find("max_points"), std::string::npos);
  const std::string csv = csv_of(s, p);
  EXPECT_NE(csv.find(",,,"), std::string::npos);  // skipped rows have empty values
}

TEST(Harness, TimingColumn) {
  auto p = small_plan();
  p.record_timing = true;
  p.replications = 2;
  const auto s = run_plan(p);
  for (const auto& r : s.replications) EXPECT_GE(r.elapsed_ms, 0.0);
}

TEST(Harness, PinnedGabrielMoments) {
  ExperimentPlan p;
  p.family = ForbiddenRegionFamily::gabriel(2);
  p.weights = {WeightSpec::power(0.0)};
  p.window = Window::ball({0, 0}, 1.0);
  p.t_values = {500};
  p.replications = 200;
  p.master_seed = 2024;
  const auto s = run_plan(p);
  const auto& t = s.weights[0].per_t[0];
  // Frozen from a reference run; a change means the sampling or the graph moved.
  EXPECT_NEAR(t.mean, 958.94, 1e-9);
  EXPECT_NEAR(t.variance, 2239.3933668341701, 1e-6);
  // Gabriel graphs of uniform points have about 2n edges in the plane.
  EXPECT_NEAR(t.mean / 500.0, 2.0, 0.15);
}

TEST(Influential, TwoPointExample) {
  const std::vector<Point> mu{{0, 0}, {1, 0}};
  const auto fam = ForbiddenRegionFamily::gabriel(2);
  const Window w = Window::ball({0, 0}, 10.0);
  InfluentialOptions o;
  o.a = 1.8;
  o.b = 1.2;
  o.r = 1e3;
  o.ball_samples = 200;
  o.per_axis = 16;
  const std::vector<std::pair<Point, Point>> pairs{{{0.5, 5}, {0.5, 0}}};
  const auto rep = detect_influential(mu, w, fam, WeightSpec::power(0.0), pairs, o);
  ASSERT_EQ(rep.size(), 1u);
  EXPECT_GT(rep[0].fraction_above, 0.0);
  EXPECT_GT(rep[0].fraction_below, 0.0);
  EXPECT_LE(rep[0].fraction_above, 1.0);
  EXPECT_TRUE(rep[0].influential);
  const auto again = detect_influential(mu, w, fam, WeightSpec::power(0.0), pairs, o);
  EXPECT_EQ(again[0].fraction_above, rep[0].fraction_above);
  EXPECT_EQ(again[0].fraction_below, rep[0].fraction_below);
}

TEST(Influential, EmptyConfigurationAndErrors) {
  const auto fam = ForbiddenRegionFamily::gabriel(2);
  const Window w = Window::ball({0, 0}, 10.0);
  InfluentialOptions o;
  o.a = 0.5;
  o.b = -0.5;
  o.r = 1e3;
  o.ball_samples = 50;
  o.per_axis = 8;
  const std::vector<std::pair<Point, Point>> pairs{{{3, 0}, {-3, 0}}};
  const auto rep = detect_influential({}, w, fam, WeightSpec::power(0.0), pairs, o);
  EXPECT_EQ(rep[0].fraction_above, 0.0);
  EXPECT_EQ(rep[0].fraction_below, 0.0);
  EXPECT_FALSE(rep[0].influential);
  o.a = -1.0;
  EXPECT_THROW(detect_influential({}, w, fam, WeightSpec::power(0.0), pairs, o), std::invalid_argument);
  o.a = 0.5;
  const std::vector<std::pair<Point, Point>> overlapping{{{0, 0}, {1, 0}}};
  EXPECT_THROW(detect_influential({}, w, fam, WeightSpec::power(0.0), overlapping, o), std::invalid_argument);
}

}  // namespace
}  // namespace pxg
