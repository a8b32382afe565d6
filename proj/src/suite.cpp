#include "scalenet/suite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "scalenet/cech.hpp"
#include "scalenet/dimension.hpp"
#include "scalenet/errors.hpp"
#include "scalenet/lsh.hpp"
#include "scalenet/random.hpp"
#include "scalenet/text.hpp"
#include "scalenet/wspd.hpp"
#include "scalenet/wssd.hpp"

namespace scalenet {

Scale parse_scale(const std::string& name) {
  if (name == "tiny") return Scale::kTiny;
  if (name == "small") return Scale::kSmall;
  if (name == "medium") return Scale::kMedium;
  throw InputError("unknown scale '" + name + "'");
}

std::string to_string(Scale scale) {
  switch (scale) {
    case Scale::kTiny: return "tiny";
    case Scale::kSmall: return "small";
    case Scale::kMedium: return "medium";
  }
  return "?";
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("loglog_slope: need two or more matched points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

int binomial_lower_band(int trials, double p, double alpha) {
  double cdf = 0.0;  // P(X < c)
  for (int c = 0; c <= trials; ++c) {
    double pmf = std::exp(std::lgamma(trials + 1.0) - std::lgamma(c + 1.0) - std::lgamma(trials - c + 1.0) +
                          c * std::log(p) + (trials - c) * std::log1p(-p));
    if (cdf + pmf > alpha) return c;
    cdf += pmf;
  }
  return trials;
}

namespace {

PointCloud sample(GeneratorKind kind, std::size_t n, std::size_t dim, std::uint64_t seed) {
  GeneratorParams gp;
  gp.n = n;
  gp.dim = dim;
  gp.flat_dim = std::min<std::size_t>(2, dim);
  gp.seed = seed;
  return generate(kind, gp);
}

// Pick per scale.
std::size_t pick(Scale s, std::size_t tiny, std::size_t small, std::size_t medium) {
  return s == Scale::kTiny ? tiny : s == Scale::kSmall ? small : medium;
}

// q-quantile of pairwise distances (all pairs; sampled above 3000 points).
double pair_quantile(const PointCloud& cloud, double q, std::uint64_t seed) {
  std::vector<double> d;
  const std::size_t n = cloud.size();
  if (n <= 3000) {
    for (PointId i = 0; i < n; ++i)
      for (PointId j = i + 1; j < n; ++j) d.push_back(distance(cloud[i], cloud[j]));
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<PointId> u(0, static_cast<PointId>(n - 1));
    for (int s = 0; s < 2'000'000; ++s) {
      PointId i = u(rng), j = u(rng);
      if (i != j) d.push_back(distance(cloud[i], cloud[j]));
    }
  }
  auto k = static_cast<std::size_t>(q * (d.size() - 1));
  std::nth_element(d.begin(), d.begin() + k, d.end());
  return d[k];
}

struct Check {
  PropertyReport report;

  Check(std::string id, std::string instance) {
    report.id = std::move(id);
    report.instance = std::move(instance);
    report.outcome = Outcome::kPass;
  }
  void expect(bool ok, const std::string& what) {
    if (ok || report.outcome == Outcome::kFail) return;
    report.outcome = Outcome::kFail;
    report.detail = what;
  }
  PropertyReport done() { return std::move(report); }
};

std::string inst(const SuiteOptions& o, const std::string& extra) {
  return "scale=" + to_string(o.scale) + " seed=" + std::to_string(o.seed) + (extra.empty() ? "" : " " + extra);
}

NetForest forest_of(const PointCloud& cloud, double t, const SuiteOptions& o) {
  ForestOptions fo;
  fo.rel_factor = o.rel_factor;
  return build_forest(cloud, t, exact_neighbour_factory(), fo);
}

const std::vector<GeneratorKind> kMixed{GeneratorKind::kUniform, GeneratorKind::kAffine, GeneratorKind::kClustered,
                                        GeneratorKind::kCurve, GeneratorKind::kSphere};

// ---- geometry ----

PropertyReport triangle_inequality(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 15, 40, 100);
  Check c("geometry.triangle_inequality", inst(o, "uniform d=5 n=" + std::to_string(n)));
  auto cloud = sample(GeneratorKind::kUniform, n, 5, o.seed);
  for (PointId a = 0; a < n; ++a)
    for (PointId b = 0; b < n; ++b)
      for (PointId e = 0; e < n; ++e)
        c.expect(distance(cloud[a], cloud[e]) <= (distance(cloud[a], cloud[b]) + distance(cloud[b], cloud[e])) * (1 + 1e-12),
                 "triple " + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(e));
  return c.done();
}

PropertyReport meb_bounds(const SuiteOptions& o) {
  Check c("geometry.meb_bounds", inst(o, "gaussian subsets d=3"));
  std::mt19937_64 rng(SeedTree(o.seed).child("meb").value());
  std::normal_distribution<double> g;
  int reps = static_cast<int>(pick(o.scale, 50, 200, 1000));
  for (int r = 0; r < reps; ++r) {
    std::vector<std::vector<double>> pts(2 + r % 6, std::vector<double>(3));
    for (auto& p : pts) for (double& x : p) x = g(rng);
    Ball b = exact_meb(pts);
    double diam = 0;
    for (auto& p : pts) {
      c.expect(b.contains(p), "point outside ball in rep " + std::to_string(r));
      for (auto& q : pts) diam = std::max(diam, distance(p, q));
    }
    c.expect(b.radius <= diam * (1 + 1e-9), "radius above diameter in rep " + std::to_string(r));
  }
  return c.done();
}

PropertyReport doubling_monotone(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 10, 12, 12);
  Check c("geometry.doubling_monotone", inst(o, "uniform d=2 n=" + std::to_string(n)));
  auto cloud = sample(GeneratorKind::kUniform, n, 2, o.seed);
  double diam = diameter(cloud);
  std::uint64_t prev = 0;
  for (int i = 1; i <= 6; ++i) {
    auto lam = brute_restricted_doubling(cloud, diam * i / 6).lambda;
    c.expect(lam >= prev, "lambda drops at t=" + format_real(diam * i / 6));
    prev = lam;
  }
  return c.done();
}

PropertyReport doubling_at_diameter(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 10, 12, 12);
  Check c("geometry.doubling_at_diameter", inst(o, "clustered d=2 n=" + std::to_string(n)));
  auto cloud = sample(GeneratorKind::kClustered, n, 2, o.seed);
  double diam = diameter(cloud);
  c.expect(brute_restricted_doubling(cloud, diam).lambda == brute_restricted_doubling(cloud, 2 * diam).lambda,
           "lambda differs between t=diam and t=2diam");
  return c.done();
}

// ---- lsh ----

PropertyReport lsh_soundness(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 15, 60, 2000);
  Check c("lsh.soundness", inst(o, "uniform d=4 n=" + std::to_string(n) + " rho=0.5 delta=0.1"));
  auto cloud = sample(GeneratorKind::kUniform, n, 4, o.seed);
  double r = pair_quantile(cloud, 0.01, o.seed);
  auto index = LshIndex::build(cloud, derive_params(n, r, 0.5, 0.1), SeedTree(o.seed).child("lsh").value());
  for (PointId q = 0; q < n; ++q) {
    auto got = index.query(q).neighbours;
    auto all = brute_near_neighbours(cloud, q, r);
    c.expect(std::includes(all.begin(), all.end(), got.begin(), got.end()), "false positive for query " + std::to_string(q));
  }
  return c.done();
}

PropertyReport lsh_completeness(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 15, 60, 2000);
  const int builds = 20;
  const double delta = 0.1;
  Check c("lsh.completeness", inst(o, "uniform d=8 n=" + std::to_string(n) + " rho=0.5 delta=0.1 builds=20"));
  auto cloud = sample(GeneratorKind::kUniform, n, 8, o.seed);
  double r = pair_quantile(cloud, 0.01, o.seed);
  std::vector<std::vector<PointId>> truth;
  for (PointId q = 0; q < n; ++q) truth.push_back(brute_near_neighbours(cloud, q, r));
  auto params = derive_params(n, r, 0.5, delta);
  int full = 0;
  for (int b = 0; b < builds; ++b) {
    auto index = LshIndex::build(cloud, params, SeedTree(o.seed).child("lsh").child(b).value());
    bool ok = true;
    for (PointId q = 0; q < n && ok; ++q) ok = index.query(q).neighbours == truth[q];
    full += ok;
  }
  int band = binomial_lower_band(builds, 1 - delta, 0.05);
  c.expect(full >= band, std::to_string(full) + " of 20 builds complete, band " + std::to_string(band));
  return c.done();
}

PropertyReport lsh_bucket_bound(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 15, 60, 1000);
  Check c("lsh.bucket_bound", inst(o, "clustered d=3 n=" + std::to_string(n)));
  GeneratorParams gp;
  gp.n = n;
  gp.dim = 3;
  gp.clusters = 8;
  gp.cluster_sigma = 0.002;
  gp.extent = 10.0;
  gp.seed = o.seed;
  auto cloud = generate(GeneratorKind::kClustered, gp);
  const double r = 0.1;
  auto params = derive_params(n, r, 0.5, 0.1);
  auto index = LshIndex::build(cloud, params, SeedTree(o.seed).child("lsh").value());
  double scanned = 0;
  std::size_t cmax = 0;
  for (PointId q = 0; q < n; ++q) {
    scanned += static_cast<double>(index.query(q).candidates_scanned);
    cmax = std::max(cmax, brute_near_neighbours(cloud, q, params.r2).size());
  }
  double mean = scanned / static_cast<double>(n);
  double bound = static_cast<double>(params.l) * (static_cast<double>(cmax) + 1) * 1.5;
  c.expect(mean <= bound, "mean candidates " + format_real(mean) + " above " + format_real(bound));
  return c.done();
}

PropertyReport lsh_determinism(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 15, 60, 1000);
  Check c("lsh.determinism", inst(o, "uniform d=3 n=" + std::to_string(n)));
  auto cloud = sample(GeneratorKind::kUniform, n, 3, o.seed);
  double r = pair_quantile(cloud, 0.02, o.seed);
  auto params = derive_params(n, r, 0.5, 0.1);
  auto a = LshIndex::build(cloud, params, o.seed);
  auto b = LshIndex::build(cloud, params, o.seed);
  for (PointId q = 0; q < n; ++q) {
    auto ra = a.query(q), rb = b.query(q);
    c.expect(ra.neighbours == rb.neighbours && ra.candidates_scanned == rb.candidates_scanned,
             "reports differ for query " + std::to_string(q));
  }
  return c.done();
}

// ---- netforest ----

struct ForestCase {
  GeneratorKind kind;
  std::size_t dim;
  double t;
};

const std::vector<ForestCase> kForestCases{{GeneratorKind::kUniform, 2, 0.3}, {GeneratorKind::kAffine, 6, 0.2},
                                           {GeneratorKind::kClustered, 3, 0.1}, {GeneratorKind::kCurve, 3, 0.2},
                                           {GeneratorKind::kSphere, 3, 0.5}};

template <typename Fn>
PropertyReport over_forests(const SuiteOptions& o, const std::string& id, std::size_t n, Fn fn) {
  Check c(id, inst(o, "mixed generators n=" + std::to_string(n)));
  for (const ForestCase& fc : kForestCases) {
    auto cloud = sample(fc.kind, n, fc.dim, o.seed);
    auto f = forest_of(cloud, fc.t, o);
    std::string where = to_string(fc.kind) + " t=" + format_real(fc.t) + ": ";
    fn(c, cloud, f, where);
  }
  return c.done();
}

PropertyReport forest_net(const SuiteOptions& o) {
  return over_forests(o, "netforest.tt_net", pick(o.scale, 15, 60, 1000),
                      [](Check& c, const PointCloud& cloud, const NetForest& f, const std::string& where) {
                        for (PointId p = 0; p < cloud.size(); ++p) {
                          bool covered = false;
                          for (NodeId r : f.roots) covered = covered || distance(cloud[p], cloud[f.node(r).rep]) <= f.t * (1 + 1e-9);
                          c.expect(covered, where + "point " + std::to_string(p) + " uncovered");
                        }
                        for (NodeId a : f.roots)
                          for (NodeId b : f.roots)
                            if (a < b) c.expect(distance(cloud[f.node(a).rep], cloud[f.node(b).rep]) > f.t * (1 - 1e-9),
                                                where + "roots " + std::to_string(a) + "," + std::to_string(b) + " too close");
                      });
}

PropertyReport forest_partition(const SuiteOptions& o) {
  return over_forests(o, "netforest.partition", pick(o.scale, 15, 60, 1000),
                      [](Check& c, const PointCloud& cloud, const NetForest& f, const std::string& where) {
                        std::vector<int> seen(cloud.size(), 0);
                        std::size_t total = 0;
                        for (NodeId r : f.roots) {
                          for (PointId p : f.points(r)) ++seen[p];
                          total += f.node(r).size();
                        }
                        c.expect(total == cloud.size(), where + "root sizes sum to " + std::to_string(total));
                        c.expect(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }), where + "overlap");
                      });
}

PropertyReport forest_cover_pack(const SuiteOptions& o) {
  return over_forests(o, "netforest.covering_packing", pick(o.scale, 15, 60, 1000),
                      [](Check& c, const PointCloud& cloud, const NetForest& f, const std::string& where) {
                        for (const auto& v : check_forest(f, cloud).violations) {
                          if (v.find("Rel") == std::string::npos) c.expect(false, where + v);
                        }
                        int lowest = f.root_level;
                        for (const NetNode& v : f.nodes) lowest = std::min(lowest, v.level);
                        for (int l = lowest; l <= f.root_level; ++l) {
                          auto r = check_extracted_net(f, cloud, l);
                          c.expect(r.ok(), where + (r.ok() ? "" : r.violations.front()));
                        }
                      });
}

PropertyReport forest_rel(const SuiteOptions& o) {
  return over_forests(o, "netforest.rel_equivalence", pick(o.scale, 15, 60, 300),
                      [](Check& c, const PointCloud& cloud, const NetForest& f, const std::string& where) {
                        auto brute = brute_force_rel(f, cloud);
                        for (NodeId u = 0; u < f.nodes.size(); ++u)
                          c.expect(f.nodes[u].rel == brute[u], where + "Rel of node " + std::to_string(u) + " differs");
                      });
}

PropertyReport root_rel_threshold(const SuiteOptions& o) {
  Check c("netforest.root_rel_threshold", inst(o, "50 log-spaced t in [1e-4, 1e4]"));
  for (int i = 0; i < 50; ++i) {
    double t = std::pow(10.0, -4.0 + 8.0 * i / 49.0);
    c.expect(kRelFactor * tau_pow(root_level(t)) <= 7 * t, "threshold above 7t at t=" + format_real(t));
    c.expect(kRelFactor * t / kCoverFactor <= 7 * t, "root Rel radius above 7t at t=" + format_real(t));
  }
  return c.done();
}

PropertyReport root_rel_bounded(const SuiteOptions& o) {
  Check c("netforest.root_rel_bounded", inst(o, "uniform d=2 t=0.05 n=400..3200"));
  std::vector<std::size_t> sizes;
  for (std::size_t n : {400u, 800u, 1600u, 3200u}) {
    auto cloud = sample(GeneratorKind::kUniform, n, 2, o.seed);
    auto f = forest_of(cloud, 0.05, o);
    std::size_t m = 0;
    for (NodeId r : f.roots) m = std::max(m, f.node(r).rel.size());
    sizes.push_back(m);
  }
  std::string seq;
  for (auto s : sizes) seq += std::to_string(s) + " ";
  // Roots are t-separated, so a packing bound caps Rel; growth should flatten out.
  c.expect(sizes.back() <= 1.2 * static_cast<double>(sizes[sizes.size() - 2]), "max root Rel grows: " + seq);
  c.report.detail = c.report.outcome == Outcome::kPass ? "max root Rel " + seq : c.report.detail;
  return c.done();
}

// ---- wspd ----

template <typename Fn>
PropertyReport over_wspds(const SuiteOptions& o, const std::string& id, Fn fn) {
  std::size_t n = pick(o.scale, 15, 60, 300);
  Check c(id, inst(o, "mixed generators eps=0.5 n=" + std::to_string(n)));
  for (const ForestCase& fc : kForestCases) {
    auto cloud = sample(fc.kind, n, fc.dim, o.seed);
    auto f = forest_of(cloud, fc.t, o);
    auto w = gen_wspd(f, cloud, 0.5, fc.t);
    fn(c, cloud, f, w, to_string(fc.kind) + ": ");
  }
  return c.done();
}

PropertyReport wspd_soundness(const SuiteOptions& o) {
  return over_wspds(o, "wspd.soundness", [](Check& c, const PointCloud& cloud, const NetForest& f, const Wspd& w,
                                             const std::string& where) {
    auto r = verify_wspd(cloud, f, w);
    c.expect(r.separation_failures == 0, where + std::to_string(r.separation_failures) + " pairs not separated");
  });
}

PropertyReport wspd_coverage(const SuiteOptions& o) {
  return over_wspds(o, "wspd.coverage", [](Check& c, const PointCloud& cloud, const NetForest& f, const Wspd& w,
                                            const std::string& where) {
    auto r = verify_wspd(cloud, f, w);
    c.expect(r.coverage_failures == 0, where + std::to_string(r.coverage_failures) + " pairs uncovered");
  });
}

PropertyReport wspd_truncation(const SuiteOptions& o) {
  return over_wspds(o, "wspd.truncation", [](Check& c, const PointCloud&, const NetForest& f, const Wspd& w,
                                              const std::string& where) {
    for (const WsPair& p : w.pairs)
      c.expect(f.node(p.u).level <= f.root_level && f.node(p.v).level <= f.root_level, where + "pair above roots");
  });
}

std::vector<std::size_t> trend_sizes(Scale s) {
  if (s == Scale::kMedium) return {250, 500, 1000, 2000};
  return {125, 250, 500, 1000};
}

PropertyReport wspd_size_trend(const SuiteOptions& o) {
  Check c("wspd.size_trend", inst(o, "affine d=4 flat=2 t=0.1 eps=0.5"));
  std::vector<double> xs, ys;
  for (std::size_t n : trend_sizes(o.scale)) {
    auto cloud = sample(GeneratorKind::kAffine, n, 4, o.seed);
    auto f = forest_of(cloud, 0.1, o);
    xs.push_back(static_cast<double>(n));
    ys.push_back(static_cast<double>(gen_wspd(f, cloud, 0.5, 0.1).pairs.size()));
  }
  double slope = loglog_slope(xs, ys);
  c.expect(std::abs(slope - 1.0) <= 0.2, "slope " + format_real(slope));
  if (c.report.outcome == Outcome::kPass) c.report.detail = "slope " + format_real(slope);
  return c.done();
}

// ---- wssd ----

struct WssdCase {
  PointCloud cloud;
  NetForest forest;
  Wssd wssd;
};

WssdCase wssd_case(const PointCloud& cloud, double eps, int k, double t, const SuiteOptions& o) {
  auto f = forest_of(cloud, 2 * t, o);
  auto w = gen_wssd(f, cloud, eps, k, t);
  return {cloud, std::move(f), std::move(w)};
}

std::vector<WssdCase> wssd_cases(const SuiteOptions& o) {
  std::vector<WssdCase> out;
  std::size_t n2 = pick(o.scale, 12, 40, 40), n3 = pick(o.scale, 10, 25, 25);
  for (GeneratorKind kind : {GeneratorKind::kUniform, GeneratorKind::kClustered, GeneratorKind::kCurve}) {
    out.push_back(wssd_case(sample(kind, n2, 2, o.seed), 0.5, 2, 0.2, o));
  }
  out.push_back(wssd_case(sample(GeneratorKind::kUniform, n3, 3, o.seed), 0.5, 3, 0.3, o));
  return out;
}

PropertyReport wssd_first_tier(const SuiteOptions& o) {
  Check c("wssd.first_tier", inst(o, "uniform d=2 eps=0.5 t=0.15 n=" + std::to_string(pick(o.scale, 15, 60, 60))));
  auto wc = wssd_case(sample(GeneratorKind::kUniform, pick(o.scale, 15, 60, 60), 2, o.seed), 0.5, 1, 0.15, o);
  Wspd pairs;
  pairs.epsilon = wc.wssd.epsilon / 2;
  pairs.t = 2 * wc.wssd.t;
  for (const WsTuple& g : wc.wssd.tier(1)) pairs.pairs.push_back({g.nodes[0], g.nodes[1]});
  auto r = verify_wspd(wc.cloud, wc.forest, pairs, pairs.t);
  c.expect(r.ok(), std::to_string(r.coverage_failures) + " uncovered, " + std::to_string(r.separation_failures) +
                       " not separated at eps/2");
  return c.done();
}

PropertyReport wssd_coverage(const SuiteOptions& o) {
  Check c("wssd.coverage", inst(o, "uniform/clustered/curve k=2 and uniform k=3, eps=0.5"));
  for (const auto& wc : wssd_cases(o)) {
    auto r = verify_wssd(wc.cloud, wc.forest, wc.wssd);
    c.expect(r.coverage_failures == 0, std::to_string(r.coverage_failures) + " simplices uncovered (k=" +
                                           std::to_string(wc.wssd.k) + ")");
  }
  return c.done();
}

PropertyReport wssd_separation(const SuiteOptions& o) {
  Check c("wssd.separation", inst(o, "uniform/clustered/curve k=2 and uniform k=3, eps=0.5"));
  for (const auto& wc : wssd_cases(o)) {
    auto r = verify_wssd(wc.cloud, wc.forest, wc.wssd);
    c.expect(r.separation_failures == 0 && r.tuples_skipped == 0,
             std::to_string(r.separation_failures) + " tuples not separated, " + std::to_string(r.tuples_skipped) +
                 " skipped");
  }
  return c.done();
}

PropertyReport wssd_size_trend(const SuiteOptions& o) {
  Check c("wssd.size_trend", inst(o, "affine d=4 flat=2 t=0.05 eps=0.5 k=2"));
  std::vector<double> xs, ys;
  const std::vector<std::size_t> sizes = o.scale == Scale::kMedium ? std::vector<std::size_t>{125, 250, 500, 1000}
                                                                    : std::vector<std::size_t>{60, 120, 240, 480};
  for (std::size_t n : sizes) {
    auto cloud = sample(GeneratorKind::kAffine, n, 4, o.seed);
    auto wc = wssd_case(cloud, 0.5, 2, 0.05, o);
    xs.push_back(static_cast<double>(n));
    ys.push_back(static_cast<double>(wc.wssd.tier(2).size()));
  }
  double slope = loglog_slope(xs, ys);
  c.expect(std::abs(slope - 1.0) <= 0.2, "slope " + format_real(slope));
  if (c.report.outcome == Outcome::kPass) c.report.detail = "slope " + format_real(slope);
  return c.done();
}

PointCloud root_cap_cloud(std::size_t per_cluster, double t, std::uint64_t seed) {
  std::mt19937_64 rng(SeedTree(seed).child("rootcap").value());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < per_cluster; ++i) rows.push_back({c * 6 * t + 2 * t * u(rng), 0.1 * t * u(rng)});
  return PointCloud::from_rows(rows);
}

PropertyReport wssd_root_cap(const SuiteOptions& o) {
  std::size_t per = pick(o.scale, 6, 14, 14);
  Check c("wssd.root_cap", inst(o, "two clusters of diameter 2t, t=0.5, k=2, per cluster " + std::to_string(per)));
  auto wc = wssd_case(root_cap_cloud(per, 0.5, o.seed), 0.5, 2, 0.5, o);
  auto r = verify_wssd(wc.cloud, wc.forest, wc.wssd);
  c.expect(r.ok(), std::to_string(r.coverage_failures) + " uncovered, " + std::to_string(r.separation_failures) +
                       " not separated");
  return c.done();
}

// ---- cech ----

PropertyReport cech_level(const SuiteOptions& o) {
  Check c("cech.coarsening_level", inst(o, "alpha in 1e-3..1e3, eps in {0.01,0.25,0.5,1}"));
  for (double eps : {0.01, 0.25, 0.5, 1.0}) {
    for (int i = -30; i <= 30; ++i) {
      double alpha = std::pow(10.0, i / 10.0);
      int h = coarsening_level(alpha, eps);
      c.expect(kCoverFactor * tau_pow(h) <= eps * alpha / 7 * (1 + 1e-12) &&
                   kCoverFactor * tau_pow(h + 1) > eps * alpha / 7,
               "h not bracketing at alpha=" + format_real(alpha));
      c.expect(h < root_level(2 * alpha), "h reaches the roots at alpha=" + format_real(alpha));
    }
  }
  return c.done();
}

struct CechCase {
  std::string label;
  PointCloud cloud;
  FiltrationOutput output;
};

std::vector<CechCase> cech_cases(const SuiteOptions& o) {
  std::vector<CechCase> out;
  std::size_t n = pick(o.scale, 10, 20, 20);
  for (double eps : {0.25, 0.5, 1.0}) {
    auto wc = wssd_case(sample(GeneratorKind::kUniform, n, 2, o.seed), eps, 2, 0.4, o);
    auto output = build_filtration(wc.forest, wc.cloud, wc.wssd, default_grid(wc.cloud, eps, 0.4));
    out.push_back({"eps=" + format_real(eps), std::move(wc.cloud), std::move(output)});
  }
  return out;
}

PropertyReport cech_sandwich(const SuiteOptions& o) {
  Check c("cech.sandwich", inst(o, "uniform d=2 k=2 t=0.4 n=" + std::to_string(pick(o.scale, 10, 20, 20))));
  for (const CechCase& cc : cech_cases(o)) {
    auto r = verify_sandwich(cc.cloud, cc.output);
    c.expect(r.lower_failures == 0 && r.upper_failures == 0,
             cc.label + ": " + (r.examples.empty() ? std::string("?") : r.examples.front()));
  }
  return c.done();
}

PropertyReport cech_vertices(const SuiteOptions& o) {
  Check c("cech.vertex_image", inst(o, "uniform d=2 k=2 t=0.4"));
  for (const CechCase& cc : cech_cases(o)) {
    auto r = verify_sandwich(cc.cloud, cc.output);
    c.expect(r.vertex_failures == 0, cc.label + ": simplex vertex outside vertex map image");
  }
  return c.done();
}

PropertyReport cech_determinism(const SuiteOptions& o) {
  Check c("cech.determinism", inst(o, "uniform d=2 k=2 t=0.4 eps=0.5"));
  auto cloud = sample(GeneratorKind::kUniform, pick(o.scale, 10, 20, 20), 2, o.seed);
  auto text = [&] {
    auto wc = wssd_case(cloud, 0.5, 2, 0.4, o);
    std::ostringstream out;
    write_filtration(out, build_filtration(wc.forest, wc.cloud, wc.wssd, default_grid(cloud, 0.5, 0.4)));
    return out.str();
  };
  c.expect(text() == text(), "filtration files differ between runs");
  return c.done();
}

// ---- dimension ----

PropertyReport dim_translation(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 15, 60, 500);
  Check c("dimension.translation_invariance", inst(o, "uniform d=2 t=0.3 n=" + std::to_string(n)));
  auto cloud = sample(GeneratorKind::kUniform, n, 2, o.seed);
  std::vector<double> shifted = cloud.coords();
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += (i % 2 ? 3.25 : -7.5);
  auto a = estimate_dim(forest_of(cloud, 0.3, o));
  auto b = estimate_dim(forest_of(PointCloud(2, shifted), 0.3, o));
  c.expect(a.max_out_degree == b.max_out_degree,
           "x=" + std::to_string(a.max_out_degree) + " vs " + std::to_string(b.max_out_degree));
  return c.done();
}

PropertyReport dim_monotone(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 15, 60, 500);
  Check c("dimension.monotone_trend", inst(o, "uniform d=3, 9 samples, t in {0.1,0.2,0.4,0.8}, n=" + std::to_string(n)));
  std::vector<double> medians;
  for (double t : {0.1, 0.2, 0.4, 0.8}) {
    std::vector<double> est;
    for (std::uint64_t s = 0; s < 9; ++s)
      est.push_back(estimate_dim(forest_of(sample(GeneratorKind::kUniform, n, 3, o.seed + s), t, o)).estimate);
    std::nth_element(est.begin(), est.begin() + 4, est.end());
    medians.push_back(est[4]);
  }
  for (std::size_t i = 1; i < medians.size(); ++i)
    c.expect(medians[i - 1] <= medians[i] + 1, "median drops from " + format_real(medians[i - 1]) + " to " +
                                                    format_real(medians[i]));
  return c.done();
}

PropertyReport dim_below_closest(const SuiteOptions& o) {
  std::size_t n = pick(o.scale, 15, 60, 500);
  Check c("dimension.below_closest_pair", inst(o, "uniform d=3 t=0.99*closest n=" + std::to_string(n)));
  auto cloud = sample(GeneratorKind::kUniform, n, 3, o.seed);
  auto e = estimate_dim(forest_of(cloud, 0.99 * closest_pair_distance(cloud), o));
  c.expect(e.estimate == 0.0, "estimate " + format_real(e.estimate));
  return c.done();
}

}  // namespace

const std::vector<Property>& property_registry() {
  static const std::vector<Property> registry{
      {"geometry.triangle_inequality", Scale::kTiny, triangle_inequality},
      {"geometry.meb_bounds", Scale::kTiny, meb_bounds},
      {"geometry.doubling_monotone", Scale::kTiny, doubling_monotone},
      {"geometry.doubling_at_diameter", Scale::kTiny, doubling_at_diameter},
      {"lsh.soundness", Scale::kTiny, lsh_soundness},
      {"lsh.completeness", Scale::kTiny, lsh_completeness},
      {"lsh.bucket_bound", Scale::kTiny, lsh_bucket_bound},
      {"lsh.determinism", Scale::kTiny, lsh_determinism},
      {"netforest.tt_net", Scale::kTiny, forest_net},
      {"netforest.partition", Scale::kTiny, forest_partition},
      {"netforest.covering_packing", Scale::kTiny, forest_cover_pack},
      {"netforest.rel_equivalence", Scale::kTiny, forest_rel},
      {"netforest.root_rel_threshold", Scale::kTiny, root_rel_threshold},
      {"netforest.root_rel_bounded", Scale::kSmall, root_rel_bounded},
      {"wspd.soundness", Scale::kTiny, wspd_soundness},
      {"wspd.coverage", Scale::kTiny, wspd_coverage},
      {"wspd.size_trend", Scale::kSmall, wspd_size_trend},
      {"wspd.truncation", Scale::kTiny, wspd_truncation},
      {"wssd.first_tier", Scale::kTiny, wssd_first_tier},
      {"wssd.coverage", Scale::kTiny, wssd_coverage},
      {"wssd.separation", Scale::kTiny, wssd_separation},
      {"wssd.size_trend", Scale::kSmall, wssd_size_trend},
      {"wssd.root_cap", Scale::kTiny, wssd_root_cap},
      {"cech.coarsening_level", Scale::kTiny, cech_level},
      {"cech.sandwich", Scale::kTiny, cech_sandwich},
      {"cech.vertex_image", Scale::kTiny, cech_vertices},
      {"cech.determinism", Scale::kTiny, cech_determinism},
      {"dimension.translation_invariance", Scale::kTiny, dim_translation},
      {"dimension.monotone_trend", Scale::kTiny, dim_monotone},
      {"dimension.below_closest_pair", Scale::kTiny, dim_below_closest},
  };
  return registry;
}

std::vector<PropertyReport> run_suite(const SuiteOptions& options) { return run_suite(options, ""); }

std::vector<PropertyReport> run_suite(const SuiteOptions& options, const std::string& prefix) {
  std::vector<PropertyReport> out;
  for (const Property& p : property_registry()) {
    if (!p.id.starts_with(prefix)) continue;
    if (static_cast<int>(options.scale) < static_cast<int>(p.min_scale)) {
      out.push_back({p.id, inst(options, ""), Outcome::kSkip, "needs scale " + to_string(p.min_scale)});
      continue;
    }
    try {
      out.push_back(p.run(options));
    } catch (const std::exception& e) {
      out.push_back({p.id, inst(options, ""), Outcome::kFail, std::string("exception: ") + e.what()});
    }
  }
  return out;
}

std::size_t failure_count(const std::vector<PropertyReport>& reports) {
  return static_cast<std::size_t>(
      std::count_if(reports.begin(), reports.end(), [](const PropertyReport& r) { return r.outcome == Outcome::kFail; }));
}

void write_reports_tsv(std::ostream& out, const std::vector<PropertyReport>& reports) {
  out << "id\toutcome\tinstance\tdetail\n";
  for (const PropertyReport& r : reports) {
    const char* o = r.outcome == Outcome::kPass ? "pass" : r.outcome == Outcome::kFail ? "fail" : "skip";
    out << r.id << '\t' << o << '\t' << r.instance << '\t' << r.detail << '\n';
  }
}

}  // namespace scalenet
