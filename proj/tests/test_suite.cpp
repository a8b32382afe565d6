#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "scalenet/errors.hpp"
#include "scalenet/suite.hpp"

using namespace scalenet;

TEST(Registry, OneEntryPerModuleInvariant) {
  const auto& reg = property_registry();
  std::set<std::string> ids;
  std::map<std::string, int> per_module;
  for (const Property& p : reg) {
    EXPECT_TRUE(ids.insert(p.id).second) << "duplicate id " << p.id;
    ++per_module[p.id.substr(0, p.id.find('.'))];
  }
  EXPECT_EQ(reg.size(), 30u);
  EXPECT_EQ(per_module["geometry"], 4);
  EXPECT_EQ(per_module["lsh"], 4);
  EXPECT_EQ(per_module["netforest"], 6);
  EXPECT_EQ(per_module["wspd"], 4);
  EXPECT_EQ(per_module["wssd"], 5);
  EXPECT_EQ(per_module["cech"], 4);
  EXPECT_EQ(per_module["dimension"], 3);
}

TEST(Helpers, SlopeAndBinomialBand) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 6, 12, 24}), 1.0, 1e-12);
  EXPECT_NEAR(loglog_slope({1, 10, 100}, {1, 100, 10000}), 2.0, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), InputError);
  // P(X <= 15) = 0.043 and P(X <= 16) = 0.133 for Binomial(20, 0.9).
  EXPECT_EQ(binomial_lower_band(20, 0.9, 0.05), 16);
  EXPECT_EQ(parse_scale("small"), Scale::kSmall);
  EXPECT_THROW(parse_scale("huge"), InputError);
}

TEST(Suite, TinyPasses) {
  SuiteOptions opt;
  opt.seed = 42;
  auto reports = run_suite(opt);
  EXPECT_EQ(reports.size(), property_registry().size());
  for (const auto& r : reports) {
    EXPECT_NE(r.outcome, Outcome::kFail) << r.id << " [" << r.instance << "]: " << r.detail;
    EXPECT_NE(r.instance.find("seed=42"), std::string::npos);
  }
  std::ostringstream tsv;
  write_reports_tsv(tsv, reports);
  std::string text = tsv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 31);
}

TEST(Suite, RelMutantIsCaught) {
  SuiteOptions opt;
  opt.scale = Scale::kMedium;
  opt.rel_factor = 13.0;
  auto reports = run_suite(opt, "netforest.rel_equivalence");
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].outcome, Outcome::kFail);
  EXPECT_FALSE(reports[0].detail.empty());
}
