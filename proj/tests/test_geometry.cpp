#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "scalenet/errors.hpp"
#include "scalenet/geometry.hpp"

using namespace scalenet;

namespace {

std::vector<double> pt(std::initializer_list<double> xs) { return std::vector<double>(xs); }

PointCloud line(std::initializer_list<double> xs) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return PointCloud::from_rows(rows);
}

}  // namespace

TEST(Distance, Pythagorean) {
  auto p = pt({0, 0}), q = pt({3, 4});
  EXPECT_DOUBLE_EQ(distance(p, q), 5.0);
  EXPECT_EQ(distance(p, p), 0.0);
  std::vector<double> ones(9, 1.0), zeros(9, 0.0);
  EXPECT_DOUBLE_EQ(distance(ones, zeros), 3.0);
}

TEST(Distance, MismatchThrows) {
  auto p = pt({0, 0}), q = pt({1, 2, 3});
  EXPECT_THROW(distance(p, q), InputError);
}

TEST(Distance, TriangleInequalityOnRandomTriples) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<double> a(5), b(5), c(5);
    for (int i = 0; i < 5; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
      c[i] = g(rng);
    }
    EXPECT_LE(distance(a, c), (distance(a, b) + distance(b, c)) * (1 + 1e-12));
  }
}

TEST(PointCloud, RejectsBadInput) {
  EXPECT_THROW(PointCloud(2, {}), InputError);
  EXPECT_THROW(PointCloud(2, {1.0, 2.0, 3.0}), InputError);
  EXPECT_THROW(PointCloud(1, {NAN}), InputError);
  EXPECT_THROW(PointCloud(1, {INFINITY}), InputError);
}

TEST(NearNeighbours, LineExample) {
  auto cloud = line({0, 1, 2, 10});
  EXPECT_EQ(brute_near_neighbours(cloud, 0, 2.5), (std::vector<PointId>{0, 1, 2}));
}

TEST(NearNeighbours, ZeroRadiusGivesCoincidentPoints) {
  auto cloud = line({3, 1, 3, 3, 2});
  EXPECT_EQ(brute_near_neighbours(cloud, 2, 0.0), (std::vector<PointId>{0, 2, 3}));
}

TEST(ExactMeb, SmallCases) {
  std::vector<std::vector<double>> one{pt({1, 2})};
  Ball b = exact_meb(one);
  EXPECT_EQ(b.radius, 0.0);
  EXPECT_EQ(b.center, pt({1, 2}));

  std::vector<std::vector<double>> two{pt({0, 0}), pt({2, 0})};
  b = exact_meb(two);
  EXPECT_NEAR(b.radius, 1.0, 1e-12);
  EXPECT_NEAR(b.center[0], 1.0, 1e-12);
  EXPECT_NEAR(b.center[1], 0.0, 1e-12);

  std::vector<std::vector<double>> tri{pt({0, 0}), pt({1, 0}), pt({0.5, std::sqrt(3.0) / 2})};
  EXPECT_NEAR(exact_meb(tri).radius, 1.0 / std::sqrt(3.0), 1e-12);

  std::vector<std::vector<double>> none;
  EXPECT_THROW(exact_meb(none), InputError);
}

TEST(ExactMeb, ObtuseTriangleUsesLongestEdge) {
  std::vector<std::vector<double>> tri{pt({0, 0}), pt({4, 0}), pt({2, 0.5})};
  EXPECT_NEAR(exact_meb(tri).radius, 2.0, 1e-12);
}

TEST(ExactMeb, ContainsAllAndBoundedByDiameter) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::vector<double>> pts(7, std::vector<double>(3));
    for (auto& p : pts) for (double& x : p) x = u(rng);
    Ball b = exact_meb(pts);
    double diam = 0;
    for (auto& p : pts) {
      EXPECT_TRUE(b.contains(p));
      for (auto& q : pts) diam = std::max(diam, distance(p, q));
    }
    EXPECT_LE(b.radius, diam);
    EXPECT_GE(b.radius, diam / 2 * (1 - 1e-12));
  }
}

TEST(Doubling, Examples) {
  auto single = line({4});
  EXPECT_EQ(brute_restricted_doubling(single, 1.0).lambda, 1u);
  EXPECT_EQ(brute_restricted_doubling(single, 1.0).dimension, 0);

  auto pair = line({0, 1});
  EXPECT_EQ(brute_restricted_doubling(pair, 2.0).lambda, 2u);
  EXPECT_EQ(brute_restricted_doubling(pair, 2.0).dimension, 1);

  // Unit spacing: a radius-1 ball around an interior point holds three
  // points that are pairwise more than 1/2 apart, and no larger ball needs more.
  auto five = line({0, 1, 2, 3, 4});
  auto res = brute_restricted_doubling(five, 4.0);
  EXPECT_EQ(res.lambda, 3u);
  EXPECT_EQ(res.dimension, 2);

  EXPECT_THROW(brute_restricted_doubling(five, 0.0), InputError);
}

TEST(Doubling, MonotoneInTAndStableBeyondDiameter) {
  GeneratorParams gp;
  gp.n = 12;
  gp.dim = 2;
  gp.seed = 5;
  auto cloud = generate(GeneratorKind::kUniform, gp);
  double diam = diameter(cloud);
  std::uint64_t prev = 0;
  for (int i = 1; i <= 8; ++i) {
    auto lam = brute_restricted_doubling(cloud, diam * i / 8).lambda;
    EXPECT_GE(lam, prev);
    prev = lam;
  }
  EXPECT_EQ(brute_restricted_doubling(cloud, diam).lambda,
            brute_restricted_doubling(cloud, 2 * diam).lambda);
}

TEST(Generators, Deterministic) {
  GeneratorParams gp;
  gp.n = 100;
  gp.dim = 10;
  gp.flat_dim = 1;
  gp.seed = 7;
  EXPECT_EQ(generate(GeneratorKind::kAffine, gp), generate(GeneratorKind::kAffine, gp));
  gp.seed = 8;
  auto other = generate(GeneratorKind::kAffine, gp);
  gp.seed = 7;
  EXPECT_FALSE(other == generate(GeneratorKind::kAffine, gp));
}

TEST(Generators, AffineLiesOnALine) {
  GeneratorParams gp;
  gp.n = 30;
  gp.dim = 10;
  gp.flat_dim = 1;
  gp.seed = 7;
  auto cloud = generate(GeneratorKind::kAffine, gp);
  // Collinear points: for any three, the largest distance is the sum of the other two.
  for (PointId i = 2; i < cloud.size(); ++i) {
    double a = distance(cloud[0], cloud[1]), b = distance(cloud[1], cloud[i]),
           c = distance(cloud[0], cloud[i]);
    double big = std::max({a, b, c});
    EXPECT_NEAR(2 * big, a + b + c, 1e-9);
  }
}

TEST(Generators, SphereNorms) {
  GeneratorParams gp;
  gp.n = 50;
  gp.dim = 3;
  gp.radius = 2.0;
  gp.noise = 0.1;
  auto cloud = generate(GeneratorKind::kSphere, gp);
  std::vector<double> origin(3, 0.0);
  for (PointId i = 0; i < cloud.size(); ++i) {
    double r = distance(cloud[i], origin);
    EXPECT_GE(r, 1.9 - 1e-12);
    EXPECT_LE(r, 2.1 + 1e-12);
  }
}

TEST(Generators, CurveHasLowRestrictedDimension) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    GeneratorParams gp;
    gp.n = 14;
    gp.dim = 3;
    gp.spacing = 0.05;
    gp.seed = seed;
    auto cloud = generate(GeneratorKind::kCurve, gp);
    EXPECT_LE(brute_restricted_doubling(cloud, 2 * gp.spacing).dimension, 2) << "seed " << seed;
  }
}

TEST(Generators, InvalidParamsThrow) {
  GeneratorParams gp;
  gp.n = 0;
  EXPECT_THROW(generate(GeneratorKind::kUniform, gp), InputError);
  gp.n = 10;
  gp.dim = 1;
  EXPECT_THROW(generate(GeneratorKind::kSphere, gp), InputError);
  gp.dim = 3;
  gp.flat_dim = 4;
  EXPECT_THROW(generate(GeneratorKind::kAffine, gp), InputError);
  EXPECT_THROW(parse_generator_kind("spiral"), InputError);
}

TEST(PointFile, RoundTripsExactly) {
  GeneratorParams gp;
  gp.n = 40;
  gp.dim = 4;
  auto cloud = generate(GeneratorKind::kClustered, gp);
  std::stringstream ss;
  write_points(ss, cloud);
  EXPECT_EQ(read_points(ss), cloud);
}

TEST(PointFile, RejectsRaggedRows) {
  std::stringstream ss("# dim=2\n1 2\n3\n");
  EXPECT_THROW(read_points(ss), InputError);
}
