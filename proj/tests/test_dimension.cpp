#include <gtest/gtest.h>

#include <cmath>

#include "scalenet/dimension.hpp"
#include "scalenet/errors.hpp"

using namespace scalenet;

namespace {

PointCloud line(std::vector<double> xs) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return PointCloud::from_rows(rows);
}

}  // namespace

TEST(EstimateDim, AllLeafForest) {
  auto cloud = line({0, 10, 20, 30});
  auto e = estimate_dim(build_forest(cloud, 1.0, exact_neighbour_factory()));
  EXPECT_EQ(e.max_out_degree, 1u);
  EXPECT_EQ(e.estimate, 0.0);
  EXPECT_THROW(estimate_dim(NetForest{}), InputError);
}

TEST(EstimateDim, BinaryChain) {
  // Pairs at geometrically growing gaps: every node splits in two.
  auto cloud = line({0, 0.001, 1, 1.001});
  auto f = build_forest(cloud, 100.0, exact_neighbour_factory());
  auto e = estimate_dim(f);
  EXPECT_EQ(e.max_out_degree, 2u);
  EXPECT_DOUBLE_EQ(e.estimate, 1.0);
}

TEST(EstimateDim, BelowClosestPairIsZero) {
  GeneratorParams gp;
  gp.n = 50;
  gp.dim = 3;
  gp.seed = 2;
  auto cloud = generate(GeneratorKind::kUniform, gp);
  auto e = estimate_dim(build_forest(cloud, closest_pair_distance(cloud) * 0.99, exact_neighbour_factory()));
  EXPECT_EQ(e.estimate, 0.0);
}

TEST(EstimateDim, TranslationInvariant) {
  GeneratorParams gp;
  gp.n = 120;
  gp.dim = 2;
  gp.seed = 5;
  auto cloud = generate(GeneratorKind::kUniform, gp);
  std::vector<double> shifted = cloud.coords();
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += (i % 2 ? 3.25 : -7.5);
  PointCloud moved(2, shifted);
  auto a = estimate_dim(build_forest(cloud, 0.3, exact_neighbour_factory()));
  auto b = estimate_dim(build_forest(moved, 0.3, exact_neighbour_factory()));
  EXPECT_EQ(a.max_out_degree, b.max_out_degree);
}
