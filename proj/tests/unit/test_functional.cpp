#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pxg/functional.hpp"
#include "pxg/graph.hpp"

namespace pxg {
namespace {

using testing::uniform_point;
using testing::uniform_points;

const auto kGabriel = ForbiddenRegionFamily::gabriel(2);

double full_L(const std::vector<Point>& pts, const ForbiddenRegionFamily& f, const WeightSpec& w) {
  return eval_L(build_naive(pts, f), pts, w);
}

TEST(Functional, EvalExamples) {
  const std::vector<Point> two{{0, 0}, {3, 0}};
  const auto g2 = build_naive(two, kGabriel);
  EXPECT_EQ(eval_L(g2, two, WeightSpec::power(0.0)), 1.0);
  EXPECT_EQ(eval_L(g2, two, WeightSpec::power(1.0)), 3.0);

  const std::vector<Point> line{{0, 0}, {1, 0}, {2, 0}};
  const auto g3 = build_naive(line, kGabriel);
  EXPECT_EQ(eval_L(g3, line, WeightSpec::power(0.0)), 2.0);
  EXPECT_EQ(eval_L(g3, line, WeightSpec::power(1.0)), 2.0);
  EXPECT_THROW(eval_L(g3, two, WeightSpec::power(0.0)), std::invalid_argument);
}

TEST(Functional, MatchesOracle) {
  std::mt19937_64 eng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = uniform_points(eng, 40, 2);
    for (double a : {0.0, 1.0, 2.0}) {
      const double ours = full_L(pts, kGabriel, WeightSpec::power(a));
      EXPECT_NEAR(ours, testing::functional_oracle(pts, testing::gabriel_oracle, a), 1e-9 * std::max(1.0, ours));
    }
  }
}

TEST(Functional, AddOneExamples) {
  const std::vector<Point> mu{{0, 0}, {2, 0}};
  const auto g = build_naive(mu, kGabriel);
  const auto w0 = WeightSpec::power(0.0);
  EXPECT_EQ(add_one_cost(mu, g, kGabriel, w0, {1, 0}), 1.0);
  EXPECT_EQ(add_one_cost(mu, g, kGabriel, w0, {0.5, 5}), 2.0);
  EXPECT_EQ(add_one_cost(mu, g, kGabriel, w0, {2, 0}), 0.0);
}

TEST(Functional, AddOneMatchesRecompute) {
  std::mt19937_64 eng(42);
  for (const auto& f : {kGabriel, ForbiddenRegionFamily::relative_neighborhood(2),
                        ForbiddenRegionFamily::annulus_sector(2)}) {
    for (int trial = 0; trial < 100; ++trial) {
      auto pts = uniform_points(eng, 5 + eng() % 50, 2);
      const Point x = uniform_point(eng, 2);
      const auto w = WeightSpec::power(static_cast<double>(trial % 3));
      const auto g = build_accelerated(pts, f);
      const InsertionProbe probe(pts, g, f);
      const double fast = add_one_cost(probe, w, x);
      const double base = eval_L(g, pts, w);
      const double after_fast = eval_L_after(g, pts, probe.diff(x), x, w);
      auto more = pts;
      more.push_back(x);
      const double after = full_L(more, f, w);
      EXPECT_NEAR(fast, after - base, 1e-9 * std::max(1.0, std::fabs(after)));
      EXPECT_EQ(after_fast, after);  // same sorted summation order
    }
  }
}

TEST(Functional, SecondDifference) {
  const auto w0 = WeightSpec::power(0.0);
  // Empty configuration: the pair always forms an edge.
  EXPECT_EQ(second_difference({}, kGabriel, w0, {0, 0}, {4, 1}), 1.0);
  EXPECT_THROW(second_difference({}, kGabriel, w0, {0, 0}, {0, 0}), std::invalid_argument);

  std::mt19937_64 eng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = uniform_points(eng, 10 + eng() % 30, 2);
    const Point x = uniform_point(eng, 2), y = uniform_point(eng, 2);
    const auto w = WeightSpec::power(static_cast<double>(trial % 3));
    const double a = second_difference(pts, kGabriel, w, x, y);
    const double b = second_difference(pts, kGabriel, w, y, x);
    const double c = second_difference_iterated(pts, kGabriel, w, x, y);
    EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::fabs(a)));
    EXPECT_NEAR(a, c, 1e-9 * std::max(1.0, std::fabs(a)));
  }
}

TEST(Functional, DerivativeBoundExamples) {
  const auto w1 = WeightSpec::power(1.0);
  const std::vector<Point> one{{1, 0}};
  const auto r1 = derivative_bound_check(one, build_naive(one, kGabriel), kGabriel, w1, {0, 0});
  EXPECT_EQ(r1.support, (std::vector<std::size_t>{0}));
  EXPECT_DOUBLE_EQ(r1.lhs, 1.0);
  EXPECT_DOUBLE_EQ(r1.rhs, 1.0);
  EXPECT_TRUE(r1.ok);

  const std::vector<Point> mu{{0, 0}, {2, 0}};
  const auto r2 = derivative_bound_check(mu, build_naive(mu, kGabriel), kGabriel, WeightSpec::power(0.0), {1, 0});
  EXPECT_EQ(r2.lhs, 1.0);
  EXPECT_EQ(r2.rhs, 2.0);
  EXPECT_TRUE(r2.ok);
}

TEST(Functional, WeightSpecs) {
  EXPECT_DOUBLE_EQ(WeightSpec::power(2.0).c_alpha(), 2.0);
  EXPECT_DOUBLE_EQ(WeightSpec::power(0.5).c_alpha(), 1.0);
  EXPECT_DOUBLE_EQ(WeightSpec::power(3.0).c_alpha(), 4.0);
  EXPECT_THROW(WeightSpec::power(-1.0), std::invalid_argument);
  EXPECT_THROW(WeightSpec::builtin("nope"), std::invalid_argument);
  for (const char* name : {"log1p", "saturating"}) {
    EXPECT_EQ(check_weight(WeightSpec::builtin(name), 2, 2000, 1), 0u) << name;
  }
  // A weight that breaks its declared growth bound is caught.
  const auto liar = WeightSpec::custom("square", [](const Point& a, const Point& b) { return squared_distance(a, b); },
                                       1.0, 1.0);
  EXPECT_GT(check_weight(liar, 2, 2000, 1), 0u);
  const auto asym = WeightSpec::custom("asym", [](const Point& a, const Point&) { return a[0]; }, 100.0, 0.0);
  EXPECT_GT(check_weight(asym, 2, 200, 1, 1.0), 0u);
}

TEST(Functional, Homogeneity) {
  std::mt19937_64 eng(44);
  const auto pts = uniform_points(eng, 80, 2);
  const auto g = build_accelerated(pts, kGabriel);
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    const auto w = WeightSpec::power(alpha);
    const double base = eval_L(g, pts, w);
    for (double a : {0.25, 3.0}) {
      std::vector<Point> scaled;
      for (const auto& p : pts) scaled.push_back(a * p);
      const double s = eval_L(build_accelerated(scaled, kGabriel), scaled, w);
      EXPECT_NEAR(s, std::pow(a, alpha) * base, 1e-9 * std::pow(a, alpha) * base);
    }
  }
}

}  // namespace
}  // namespace pxg
