#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pxg/functional.hpp"
#include "pxg/graph.hpp"
#include "pxg/pointproc.hpp"
#include "pxg/random.hpp"

namespace pxg {
namespace {

const Window kDisc = Window::ball({0, 0}, 1.0);

TEST(PointProc, PoissonZeroIntensity) {
  EXPECT_EQ(sample_poisson(kDisc, 0.0, 1).size(), 0u);
  EXPECT_THROW(sample_poisson(kDisc, -1.0, 1), std::invalid_argument);
}

TEST(PointProc, PoissonMeanCount) {
  double total = 0.0;
  for (std::uint64_t r = 0; r < 1000; ++r) total += static_cast<double>(sample_poisson(kDisc, 100.0, r).size());
  EXPECT_NEAR(total / 1000.0, 100.0, 3.0 * std::sqrt(100.0 / 1000.0));
}

TEST(PointProc, PoissonVarianceMatchesMean) {
  // Small means exercise inversion, large ones the rejection sampler.
  for (double mean : {4.0, 250.0}) {
    Rng rng(derive_seed({77, static_cast<std::uint64_t>(mean)}));
    double s = 0.0, s2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(mean));
      s += k;
      s2 += k * k;
    }
    const double m = s / n;
    const double v = s2 / n - m * m;
    EXPECT_NEAR(m, mean, 4.0 * std::sqrt(mean / n));
    EXPECT_NEAR(v / mean, 1.0, 0.05);
  }
}

TEST(PointProc, Determinism) {
  const auto a = sample_poisson(kDisc, 50.0, 42);
  const auto b = sample_poisson(kDisc, 50.0, 42);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, sample_poisson(kDisc, 50.0, 43).points);
}

TEST(PointProc, BinomialCountsAndMean) {
  const Window cube = Window::cube({0, 0}, 1.0);
  EXPECT_EQ(sample_binomial(cube, 0, 1).size(), 0u);
  EXPECT_EQ(sample_binomial(cube, 7, 1).size(), 7u);
  const auto big = sample_binomial(cube, 100000, 9);
  double mx = 0.0, my = 0.0;
  for (const auto& p : big.points) {
    mx += p[0];
    my += p[1];
  }
  EXPECT_NEAR(mx / 1e5, 0.5, 0.005);
  EXPECT_NEAR(my / 1e5, 0.5, 0.005);
}

TEST(PointProc, PointsInsideWindow) {
  for (const Window& w : {kDisc, Window::cube({-1, 2, 0}, 0.5), Window::ball({3}, 2.0)}) {
    const auto c = sample_poisson(w, 500.0, 3);
    for (const auto& p : c.points) EXPECT_TRUE(w.contains(p));
  }
}

TEST(PointProc, WindowGeometry) {
  EXPECT_NEAR(kDisc.volume(), M_PI, 1e-12);
  EXPECT_NEAR(Window::ball({0, 0, 0}, 2.0).volume(), 4.0 / 3.0 * M_PI * 8.0, 1e-9);
  EXPECT_NEAR(Window::cube({0, 0}, 2.0).diameter(), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_THROW(Window::ball({0, 0}, 0.0), std::invalid_argument);
  EXPECT_THROW(Window::cube({0, 0}, -1.0), std::invalid_argument);
}

TEST(PointProc, ScaleCloud) {
  const auto c = sample_poisson(kDisc, 60.0, 5);
  const auto same = scale_cloud(c, 1.0);
  EXPECT_EQ(same.points, c.points);
  EXPECT_THROW(scale_cloud(c, 0.0), std::invalid_argument);

  const auto fam = ForbiddenRegionFamily::gabriel(2);
  const auto g = build_accelerated(c, fam);
  for (double a : {0.5, 2.0, 7.3}) {
    const auto s = scale_cloud(c, a);
    EXPECT_DOUBLE_EQ(s.window.size(), a);
    const auto gs = build_accelerated(s, fam);
    EXPECT_EQ(gs.edges, g.edges);
    EXPECT_EQ(eval_L(gs, s.points, WeightSpec::power(0.0)), eval_L(g, c.points, WeightSpec::power(0.0)));
    const double l1 = eval_L(g, c.points, WeightSpec::power(1.0));
    EXPECT_NEAR(eval_L(gs, s.points, WeightSpec::power(1.0)), a * l1, 1e-9 * a * l1);
  }
}

TEST(PointProc, GrowingWindowCoupling) {
  const Window base = Window::ball({0, 0}, 1.0);
  const auto big = sample_poisson_growing(base, 400.0, 17);
  const auto small = sample_poisson_growing(base, 100.0, 17);
  const Window small_window = base.scaled(std::sqrt(100.0));
  EXPECT_EQ(small.window, small_window);
  std::vector<Point> restricted;
  for (const auto& p : big.points) {
    if (small_window.contains(p)) restricted.push_back(p);
  }
  std::sort(restricted.begin(), restricted.end());
  auto s = small.points;
  std::sort(s.begin(), s.end());
  EXPECT_EQ(s, restricted);
  for (const auto& p : big.points) EXPECT_TRUE(big.window.contains(p));
  EXPECT_THROW(sample_poisson_growing(Window::cube({1, 1}, 1.0), 10.0, 1), std::invalid_argument);
}

TEST(PointProc, GrowingWindowIntensity) {
  const Window base = Window::cube({-0.5, -0.5}, 1.0);
  double total = 0.0;
  for (std::uint64_t r = 0; r < 400; ++r) total += static_cast<double>(sample_poisson_growing(base, 50.0, r).size());
  EXPECT_NEAR(total / 400.0, 50.0, 4.0 * std::sqrt(50.0 / 400.0));
}

TEST(PointProc, CsvRoundTrip) {
  const auto c = sample_poisson(Window::cube({0, 0, 0}, 1.0), 30.0, 8);
  std::stringstream ss;
  write_points_csv(ss, c.points, 3);
  EXPECT_EQ(ss.str().substr(0, 15), "index,x1,x2,x3\n");
  EXPECT_EQ(read_points_csv(ss), c.points);
}

TEST(PointProc, BinaryRoundTrip) {
  const auto c = sample_poisson(kDisc, 30.0, 8);
  std::stringstream ss;
  write_points_binary(ss, c.points, 2);
  EXPECT_EQ(ss.str().substr(0, 4), "PXG1");
  EXPECT_EQ(read_points_binary(ss), c.points);
  std::stringstream bad("PXG2xxxxxxxxxxxx");
  EXPECT_THROW(read_points_binary(bad), std::exception);
}

TEST(PointProc, RequireDistinct) {
  std::vector<Point> pts{{0, 0}, {1, 1}, {0, 0}};
  EXPECT_THROW(require_distinct(pts), std::invalid_argument);
  pts.pop_back();
  EXPECT_NO_THROW(require_distinct(pts));
}

TEST(Random, DeriveSeedIsOrderSensitive) {
  EXPECT_NE(derive_seed({1, 2, 3}), derive_seed({1, 3, 2}));
  EXPECT_EQ(derive_seed({1, 2, 3}), derive_seed({1, 2, 3}));
  EXPECT_NE(derive_seed({0}), derive_seed({0, 0}));
}

}  // namespace
}  // namespace pxg
