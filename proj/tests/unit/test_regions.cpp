#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "pxg/regions.hpp"

namespace pxg {
namespace {

using testing::uniform_point;

TEST(Regions, GabrielExamples) {
  const auto g = ForbiddenRegionFamily::gabriel(2);
  EXPECT_TRUE(g.contains({0, 0}, {2, 0}, {1, 0}));
  EXPECT_FALSE(g.contains({0, 0}, {2, 0}, {0, 0}));
  EXPECT_FALSE(g.contains({0, 0}, {2, 0}, {2, 0}));
  EXPECT_FALSE(g.contains({0, 0}, {2, 0}, {1, 1}));  // on the circle
}

TEST(Regions, RngExamples) {
  const auto r = ForbiddenRegionFamily::relative_neighborhood(2);
  EXPECT_TRUE(r.contains({0, 0}, {2, 0}, {1, 1.5}));
  EXPECT_FALSE(r.contains({0, 0}, {2, 0}, {1, 1.8}));
}

TEST(Regions, InvalidPairs) {
  const auto g = ForbiddenRegionFamily::gabriel(2);
  EXPECT_THROW(g.contains({1, 1}, {1, 1}, {0, 0}), std::invalid_argument);
  EXPECT_THROW(g.contains({1, 1}, {0, 0, 0}, {0, 0}), std::invalid_argument);
}

TEST(Regions, RotationExamples) {
  const Rotation id = rotation_to({1, 0}, {1, 0});
  const Point v{0.3, -0.7};
  EXPECT_EQ(id.apply(v), v);

  const Rotation quarter = rotation_to({1, 0}, {0, 1});
  const Point w = quarter.apply({1, 0});
  EXPECT_NEAR(w[0], 0.0, 1e-12);
  EXPECT_NEAR(w[1], 1.0, 1e-12);

  const Rotation r3 = rotation_to({1, 0, 0}, {0, 0, 1});
  const Point a = r3.apply({1, 0, 0});
  const Point b = r3.apply({0, 1, 0});
  EXPECT_NEAR(distance(a, {0, 0, 1}), 0.0, 1e-12);
  EXPECT_NEAR(distance(b, {0, 1, 0}), 0.0, 1e-12);

  EXPECT_THROW(rotation_to({2, 0}, {0, 1}), std::invalid_argument);
}

double determinant3(const std::vector<double>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

TEST(Regions, RotationIsProperAndOrthogonal) {
  std::mt19937_64 eng(11);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 200; ++trial) {
    Point u0(3), u(3);
    for (std::size_t k = 0; k < 3; ++k) u0[k] = n01(eng), u[k] = n01(eng);
    u0 = (1.0 / norm(u0)) * u0;
    u = (1.0 / norm(u)) * u;
    if (trial == 0) u = -u0;  // antiparallel case
    const Rotation r = rotation_to(u0, u);
    EXPECT_LT(distance(r.apply(u0), u), 1e-12);
    const auto m = r.matrix();
    EXPECT_NEAR(determinant3(m), 1.0, 1e-12);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) s += m[i * 3 + k] * m[j * 3 + k];
        EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
      }
    }
    // Fixes the orthogonal complement of span{u0, u}.
    if (trial > 0) {
      Point c{u0[1] * u[2] - u0[2] * u[1], u0[2] * u[0] - u0[0] * u[2], u0[0] * u[1] - u0[1] * u[0]};
      if (norm(c) > 1e-6) EXPECT_LT(distance(r.apply(c), c), 1e-12);
    }
  }
}

TEST(Regions, MatchesOracles) {
  std::mt19937_64 eng(5);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto g = ForbiddenRegionFamily::gabriel(d);
    const auto r = ForbiddenRegionFamily::relative_neighborhood(d);
    for (int i = 0; i < 5000; ++i) {
      const Point x = uniform_point(eng, d), y = uniform_point(eng, d);
      const Point z = uniform_point(eng, d, -0.5, 1.5);
      EXPECT_EQ(g.contains(x, y, z), testing::gabriel_oracle(x, y, z));
      EXPECT_EQ(r.contains(x, y, z), testing::rng_oracle(x, y, z));
    }
  }
}

TEST(Regions, BallTemplateReproducesGabriel) {
  std::mt19937_64 eng(6);
  for (std::size_t d = 1; d <= 3; ++d) {
    const Point axis = Point::unit(d, 0);
    const auto t = ForbiddenRegionFamily::isotropic(make_ball_template(d, 0.5), axis,
                                                    {1.0, 0.5, {Point(d), 0.5}});
    const auto g = ForbiddenRegionFamily::gabriel(d);
    std::size_t mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
      const Point x = uniform_point(eng, d), y = uniform_point(eng, d);
      const Point z = uniform_point(eng, d, -0.5, 1.5);
      mismatches += t.contains(x, y, z) != g.contains(x, y, z);
    }
    EXPECT_EQ(mismatches, 0u) << "d = " << d;
  }
}

TEST(Regions, CertifyCanonicalFamilies) {
  const auto rg = certify_constants(ForbiddenRegionFamily::gabriel(2), 2000, 1);
  EXPECT_TRUE(rg.ok());
  EXPECT_LE(rg.sampled_diameter, 1.0 + 1e-12);
  EXPECT_GT(rg.sampled_diameter, 0.99);

  const auto rr = certify_constants(ForbiddenRegionFamily::relative_neighborhood(2), 20000, 2);
  EXPECT_TRUE(rr.ok());
  EXPECT_NEAR(rr.sampled_diameter, std::sqrt(3.0), 1e-3);

  const auto ra = certify_constants(ForbiddenRegionFamily::annulus_sector(3), 2000, 3);
  EXPECT_TRUE(ra.ok()) << (ra.messages.empty() ? "" : ra.messages.front());
}

TEST(Regions, CertifyFlagsWrongConstants) {
  // Claimed inscribed ball pokes out of the Gabriel disc.
  const auto bad = ForbiddenRegionFamily::isotropic(make_ball_template(2, 0.5), {1, 0}, {1.0, 0.5, {{0.3, 0}, 0.5}});
  const auto rep = certify_constants(bad, 500, 4);
  EXPECT_GT(rep.inscribed_violations, 0u);
  EXPECT_FALSE(rep.ok());
}

TEST(Regions, InscribedBallInsideRngLens) {
  std::mt19937_64 eng(8);
  const auto r = ForbiddenRegionFamily::relative_neighborhood(2);
  const Point x{0.0, 0.0}, y{1.0, 0.0};
  const Ball b = r.region(x, y).inscribed_ball();
  EXPECT_NEAR(b.radius, 0.5, 1e-15);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 10000; ++i) {
    Point z{u(eng), u(eng)};
    if (squared_norm(z) >= 0.25) continue;
    EXPECT_TRUE(r.contains(x, y, b.center + z));
  }
}

TEST(Regions, TemplateShapesAndSdf) {
  const Point axis{1, 0};
  const auto lens = make_lens_template(axis);
  EXPECT_TRUE(lens->contains({0, 0}));
  EXPECT_FALSE(lens->contains({0, 0.9}));
  const auto ann = make_annulus_sector_template(axis, 0.1, 0.7);
  EXPECT_FALSE(ann->contains({0.05, 0}));
  EXPECT_TRUE(ann->contains({0.3, 0}));
  EXPECT_FALSE(ann->contains({0, 0.3}));

  // Signed distance of the disc of radius 1/2 sampled on a grid.
  const std::size_t res = 41;
  std::vector<double> values;
  for (std::size_t i = 0; i < res; ++i) {
    for (std::size_t j = 0; j < res; ++j) {
      const double a = -1.0 + 2.0 * static_cast<double>(i) / (res - 1);
      const double b = -1.0 + 2.0 * static_cast<double>(j) / (res - 1);
      values.push_back(std::hypot(a, b) - 0.5);
    }
  }
  const auto path = std::filesystem::temp_directory_path() / "pxg_test_disc.sdf";
  write_sdf_template(path.string(), 2, res, {-1, -1}, {1, 1}, values);
  const auto sdf = load_sdf_template(path.string());
  EXPECT_TRUE(sdf->contains({0, 0}));
  EXPECT_TRUE(sdf->contains({0.3, 0.2}));
  EXPECT_FALSE(sdf->contains({0.6, 0}));
  std::filesystem::remove(path);
  EXPECT_THROW(load_sdf_template("/nonexistent/file.sdf"), std::exception);
}

TEST(Regions, ClosureContains) {
  const auto g = ForbiddenRegionFamily::gabriel(2);
  const Region r = g.region({0, 0}, {2, 0});
  EXPECT_TRUE(r.closure_contains({0, 0}));
  EXPECT_TRUE(r.closure_contains({1, 1}));
  EXPECT_FALSE(r.closure_contains({1, 1.0001}));
}

}  // namespace
}  // namespace pxg
