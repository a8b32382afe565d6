#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scalenet/cech.hpp"
#include "scalenet/errors.hpp"

using namespace scalenet;

namespace {

struct Pipeline {
  PointCloud cloud;
  NetForest forest;
  Wssd wssd;

  Pipeline(PointCloud c, double eps, int k, double t)
      : cloud(std::move(c)),
        forest(build_forest(cloud, 2 * t, exact_neighbour_factory())),
        wssd(gen_wssd(forest, cloud, eps, k, t)) {}

  FiltrationOutput at(std::vector<double> grid) const { return build_filtration(forest, cloud, wssd, grid); }
};

bool has(const FiltrationSlice& s, std::vector<PointId> simplex) {
  return std::binary_search(s.simplices.begin(), s.simplices.end(), simplex);
}

}  // namespace

TEST(CoarseningLevel, BracketsTheBudget) {
  for (double eps : {0.01, 0.25, 0.5, 1.0}) {
    for (int i = -60; i <= 60; ++i) {
      double alpha = std::pow(10.0, i / 10.0);
      int h = coarsening_level(alpha, eps);
      EXPECT_LE(kCoverFactor * tau_pow(h), eps * alpha / 7 * (1 + 1e-12));
      EXPECT_GT(kCoverFactor * tau_pow(h + 1), eps * alpha / 7);
      // The forest behind a slice is built at 2t >= 2 alpha.
      EXPECT_LT(h, root_level(2 * alpha));
    }
  }
  EXPECT_THROW(coarsening_level(0.0, 0.5), InputError);
}

TEST(Vcell, RepWithinCoveringRadius) {
  GeneratorParams gp;
  gp.n = 60;
  gp.dim = 2;
  gp.seed = 3;
  auto cloud = generate(GeneratorKind::kUniform, gp);
  auto f = build_forest(cloud, 0.8, exact_neighbour_factory());
  for (PointId p = 0; p < cloud.size(); ++p) {
    for (int h = f.root_level - 1; h >= f.root_level - 4; --h) {
      PointId rep = f.node(vcell(f, p, h)).rep;
      EXPECT_LE(distance(cloud[p], cloud[rep]), kCoverFactor * tau_pow(h) * (1 + 1e-9));
    }
  }
  EXPECT_THROW(vcell(f, 0, f.root_level), InputError);
}

TEST(Filtration, EdgeThreshold) {
  Pipeline pl(PointCloud::from_rows({{0.0}, {1.0}}), 0.01, 2, 1.0);
  auto out = pl.at({0.49, 0.5});
  EXPECT_FALSE(has(out.slices[0], {0, 1}));
  EXPECT_TRUE(has(out.slices[0], {0}));
  EXPECT_TRUE(has(out.slices[1], {0, 1}));
  EXPECT_TRUE(verify_sandwich(pl.cloud, out).ok());
}

TEST(Filtration, EquilateralTriangle) {
  for (double eps : {0.01, 0.5}) {
    Pipeline pl(PointCloud::from_rows({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}}), eps, 2, 1.0);
    auto out = pl.at({0.6});
    EXPECT_TRUE(has(out.slices[0], {0, 1, 2})) << "eps " << eps;
    EXPECT_TRUE(verify_sandwich(pl.cloud, out).ok());
  }
}

TEST(Filtration, GridValidation) {
  Pipeline pl(PointCloud::from_rows({{0.0}, {1.0}}), 0.5, 1, 1.0);
  EXPECT_THROW(pl.at({0.5, 1.5}), InputError);
  EXPECT_THROW(pl.at({0.5, 0.5}), InputError);
  EXPECT_THROW(pl.at({0.0}), InputError);
  EXPECT_THROW(pl.at({}), InputError);
}

TEST(Filtration, DefaultGrid) {
  auto cloud = PointCloud::from_rows({{0.0}, {0.0}, {0.2}, {1.0}});
  auto grid = default_grid(cloud, 0.7, 1.0);
  EXPECT_DOUBLE_EQ(grid.front(), 0.1);
  EXPECT_LE(grid.back(), 1.0);
  EXPECT_GT(grid.back() * 1.1, 1.0);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_EQ(default_grid(PointCloud::from_rows({{1.0}}), 0.5, 2.0), std::vector<double>{2.0});
}

TEST(Sandwich, RandomCloudsHoldOnDefaultGrid) {
  for (double eps : {0.25, 0.5, 1.0}) {
    for (auto kind : {GeneratorKind::kUniform, GeneratorKind::kClustered}) {
      GeneratorParams gp;
      gp.n = 20;
      gp.dim = 2;
      gp.seed = 11;
      Pipeline pl(generate(kind, gp), eps, 2, 0.4);
      auto out = pl.at(default_grid(pl.cloud, eps, 0.4));
      auto r = verify_sandwich(pl.cloud, out);
      EXPECT_TRUE(r.ok()) << to_string(kind) << " eps " << eps << ": "
                          << (r.examples.empty() ? "" : r.examples.front());
      EXPECT_GT(r.cech_simplices, 0u);
    }
  }
}

TEST(Sandwich, FlagsFabricatedSlices) {
  Pipeline pl(PointCloud::from_rows({{0.0, 0.0}, {0.3, 0.0}, {5.0, 0.0}, {0.0, 5.0}}), 0.5, 2, 5.0);
  auto out = pl.at({0.4});
  ASSERT_TRUE(verify_sandwich(pl.cloud, out).ok());

  auto missing = out;
  auto& s = missing.slices[0].simplices;
  s.erase(std::remove(s.begin(), s.end(), std::vector<PointId>{0, 1}), s.end());
  EXPECT_GT(verify_sandwich(pl.cloud, missing).lower_failures, 0u);

  auto far = out;
  far.slices[0].simplices.push_back({0, 2, 3});
  EXPECT_GT(verify_sandwich(pl.cloud, far).upper_failures, 0u);
}

TEST(Filtration, FileRoundTripAndDeterminism) {
  GeneratorParams gp;
  gp.n = 15;
  gp.dim = 2;
  Pipeline pl(generate(GeneratorKind::kUniform, gp), 0.5, 2, 0.3);
  auto grid = default_grid(pl.cloud, 0.5, 0.3);
  std::stringstream a, b;
  write_filtration(a, pl.at(grid));
  write_filtration(b, pl.at(grid));
  EXPECT_EQ(a.str(), b.str());
  std::string text = a.str();
  auto back = read_filtration(a);
  std::stringstream again;
  write_filtration(again, back);
  EXPECT_EQ(again.str(), text);
  std::stringstream bad("cechapprox v1 epsilon=0.5 t=1 k=2\nvmap 0 0\n");
  EXPECT_THROW(read_filtration(bad), InputError);
}
