// Command-line front end: data generation, forest/WSPD/WSSD/filtration
// builds with optional oracle checks, LSH benchmarking and the property suite.
#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "scalenet/cech.hpp"
#include "scalenet/dimension.hpp"
#include "scalenet/errors.hpp"
#include "scalenet/lsh.hpp"
#include "scalenet/random.hpp"
#include "scalenet/suite.hpp"
#include "scalenet/text.hpp"
#include "scalenet/wspd.hpp"
#include "scalenet/wssd.hpp"

using namespace scalenet;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

/// Raised for flag combinations CLI11 cannot express; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string input;
  std::string forest;
  std::string output;
  double t = 0;
  double epsilon = 0.5;
  int k = 2;
  double rho = 0.5;
  double delta = 0.1;
  std::optional<std::uint64_t> seed;
  bool verify = false;
  bool exact_nn = false;
  std::string grid = "auto";
};

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write(out);
}

NeighbourFactory factory_of(const Common& c) {
  if (c.exact_nn) return exact_neighbour_factory();
  if (!c.seed) throw UsageError("--seed is required unless --exact-nn is given");
  return lsh_neighbour_factory(c.rho, c.delta, *c.seed);
}

PointCloud points_of(const Common& c) {
  if (c.input.empty()) throw UsageError("--input is required");
  return load_points(c.input);
}

// Forest at scale `scale`: loaded from --forest (scale must match) or built.
NetForest forest_at(const Common& c, const PointCloud& cloud, double scale) {
  if (c.forest.empty()) return build_forest(cloud, scale, factory_of(c));
  NetForest f = load_forest(c.forest);
  if (f.t != scale) {
    throw InputError("forest file has t=" + format_real(f.t) + ", this command needs t=" + format_real(scale));
  }
  if (f.point_count != cloud.size()) throw InputError("forest file does not match the point file");
  return f;
}

void require_t(const Common& c) {
  if (!(c.t > 0)) throw UsageError("--t must be given and positive");
}

int report_check(bool ok, const std::string& what, const std::vector<std::string>& examples) {
  if (ok) {
    std::cerr << what << ": ok\n";
    return kOk;
  }
  std::cerr << what << ": FAILED\n";
  for (const auto& e : examples) std::cerr << "  " << e << '\n';
  return kFailed;
}

bool gate(std::size_t n, std::size_t limit, const std::string& what) {
  if (n <= limit) return true;
  std::cerr << what << ": verification skipped for n=" << n << " (limit " << limit << ")\n";
  return false;
}

int cmd_build_forest(const Common& c) {
  require_t(c);
  auto cloud = points_of(c);
  auto f = build_forest(cloud, c.t, factory_of(c));
  emit(c.output, [&](std::ostream& out) { write_forest(out, f); });
  std::cerr << "forest: " << f.roots.size() << " roots, " << f.nodes.size() << " nodes\n";
  if (c.verify && gate(cloud.size(), 3000, "forest")) {
    auto r = check_forest(f, cloud);
    std::vector<std::string> ex(r.violations.begin(), r.violations.begin() + std::min<std::size_t>(10, r.violations.size()));
    return report_check(r.ok(), "forest invariants", ex);
  }
  return kOk;
}

int cmd_wspd(const Common& c) {
  require_t(c);
  auto cloud = points_of(c);
  auto f = forest_at(c, cloud, c.t);
  auto w = gen_wspd(f, cloud, c.epsilon, c.t);
  emit(c.output, [&](std::ostream& out) { write_wspd(out, w); });
  std::cerr << "wspd: " << w.pairs.size() << " pairs\n";
  if (c.verify && gate(cloud.size(), 5000, "wspd")) {
    auto r = verify_wspd(cloud, f, w);
    return report_check(r.ok(), "wspd coverage and separation", r.examples);
  }
  return kOk;
}

int cmd_wssd(const Common& c) {
  require_t(c);
  auto cloud = points_of(c);
  auto f = forest_at(c, cloud, 2 * c.t);
  auto w = gen_wssd(f, cloud, c.epsilon, c.k, c.t);
  emit(c.output, [&](std::ostream& out) { write_wssd(out, w); });
  for (int j = 1; j <= w.k; ++j) std::cerr << "wssd tier " << j << ": " << w.tier(j).size() << " tuples\n";
  if (c.verify && gate(cloud.size(), 60, "wssd")) {
    auto r = verify_wssd(cloud, f, w);
    return report_check(r.ok() && r.tuples_skipped == 0, "wssd coverage and separation", r.examples);
  }
  return kOk;
}

std::vector<double> grid_of(const Common& c, const PointCloud& cloud) {
  if (c.grid == "auto") return default_grid(cloud, c.epsilon, c.t);
  std::vector<double> grid;
  for (auto part : split(c.grid, ',')) grid.push_back(parse_real(part));
  return grid;
}

int cmd_cech(const Common& c) {
  require_t(c);
  auto cloud = points_of(c);
  auto f = forest_at(c, cloud, 2 * c.t);
  auto w = gen_wssd(f, cloud, c.epsilon, c.k, c.t);
  auto out = build_filtration(f, cloud, w, grid_of(c, cloud));
  emit(c.output, [&](std::ostream& o) { write_filtration(o, out); });
  std::cerr << "cech: " << out.slices.size() << " slices\n";
  if (c.verify && gate(cloud.size(), 30, "cech")) {
    auto r = verify_sandwich(cloud, out);
    return report_check(r.ok(), "cech sandwich containments", r.examples);
  }
  return kOk;
}

int cmd_dim(const Common& c) {
  require_t(c);
  auto cloud = points_of(c);
  auto e = estimate_dim(forest_at(c, cloud, c.t));
  std::ostringstream line;
  line << "dim-estimate t=" << format_real(e.t) << " x=" << e.max_out_degree << " log2x=" << format_real(e.estimate)
       << '\n';
  emit(c.output, [&](std::ostream& out) { out << line.str(); });
  return kOk;
}

struct GenFlags {
  std::string kind = "uniform";
  GeneratorParams params;
};

int cmd_gen(const GenFlags& g, const Common& c) {
  if (!c.seed) throw UsageError("--seed is required");
  GeneratorParams p = g.params;
  p.seed = *c.seed;
  p.flat_dim = static_cast<std::size_t>(c.k);
  auto cloud = generate(parse_generator_kind(g.kind), p);
  emit(c.output, [&](std::ostream& out) { write_points(out, cloud); });
  return kOk;
}

struct BenchFlags {
  std::string kind = "clustered";
  std::string ns = "500,1000,2000";
  std::string rhos = "0.5";
  std::size_t dim = 3;
};

int cmd_bench(const BenchFlags& b, const Common& c) {
  if (!c.seed) throw UsageError("--seed is required");
  std::vector<std::size_t> ns;
  std::vector<double> rhos;
  for (auto s : split(b.ns, ',')) ns.push_back(static_cast<std::size_t>(parse_int(s)));
  for (auto s : split(b.rhos, ',')) rhos.push_back(parse_real(s));
  using Clock = std::chrono::steady_clock;
  emit(c.output, [&](std::ostream& out) {
    out << "n\trho\tr\tk\tl\tbuild_ms\tmean_query_us\tmean_candidates\trecall\n";
    for (std::size_t n : ns) {
      GeneratorParams gp;
      gp.n = n;
      gp.dim = b.dim;
      gp.seed = SeedTree(*c.seed).child("bench").child(n).value();
      auto cloud = c.input.empty() ? generate(parse_generator_kind(b.kind), gp) : load_points(c.input);
      double r = c.t;
      if (!(r > 0)) {
        // Default radius: about one percent of the pairwise distances.
        std::vector<double> d;
        for (PointId i = 0; i < std::min<std::size_t>(cloud.size(), 400); ++i)
          for (PointId j = i + 1; j < std::min<std::size_t>(cloud.size(), 400); ++j) d.push_back(distance(cloud[i], cloud[j]));
        std::nth_element(d.begin(), d.begin() + d.size() / 100, d.end());
        r = d[d.size() / 100];
      }
      std::vector<std::vector<PointId>> truth;
      std::size_t true_pairs = 0;
      for (PointId q = 0; q < cloud.size(); ++q) {
        truth.push_back(brute_near_neighbours(cloud, q, r));
        true_pairs += truth.back().size();
      }
      for (double rho : rhos) {
        auto params = derive_params(cloud.size(), r, rho, c.delta);
        auto t0 = Clock::now();
        auto index = LshIndex::build(cloud, params, SeedTree(*c.seed).child("lsh").value());
        auto t1 = Clock::now();
        std::size_t found = 0, candidates = 0;
        for (PointId q = 0; q < cloud.size(); ++q) {
          auto rep = index.query(q);
          found += rep.neighbours.size();
          candidates += rep.candidates_scanned;
        }
        auto t2 = Clock::now();
        double qn = static_cast<double>(cloud.size());
        out << cloud.size() << '\t' << format_real(rho) << '\t' << format_real(r) << '\t' << params.k << '\t'
            << params.l << '\t' << std::chrono::duration<double, std::milli>(t1 - t0).count() << '\t'
            << std::chrono::duration<double, std::micro>(t2 - t1).count() / qn << '\t'
            << static_cast<double>(candidates) / qn << '\t'
            << static_cast<double>(found) / static_cast<double>(true_pairs) << '\n';
      }
    }
  });
  return kOk;
}

int cmd_suite(const std::string& scale, const std::string& only, const Common& c) {
  SuiteOptions opt;
  opt.scale = parse_scale(scale);
  opt.seed = c.seed.value_or(42);
  auto reports = run_suite(opt, only);
  emit(c.output, [&](std::ostream& out) { write_reports_tsv(out, reports); });
  std::size_t failed = failure_count(reports);
  std::cerr << "suite " << scale << ": " << reports.size() - failed << " of " << reports.size()
            << " properties without failure\n";
  return failed == 0 ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Net-forest toolkit: nets, WSPD, WSSD and approximate Cech filtrations at scale t"};
  app.require_subcommand(1);

  Common c;
  auto common = [&](CLI::App* sub, bool points = true) {
    if (points) sub->add_option("--input", c.input, "point file");
    sub->add_option("--output", c.output, "output file (default stdout)");
    sub->add_option("--seed", c.seed, "seed for every random draw");
  };
  auto pipeline = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--t", c.t, "scale t");
    sub->add_option("--rho", c.rho, "LSH quality exponent")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--delta", c.delta, "LSH failure probability")->check(CLI::Range(0.0, 1.0));
    sub->add_flag("--exact-nn", c.exact_nn, "brute-force neighbour queries instead of LSH");
    sub->add_flag("--verify", c.verify, "run the oracle check; exit 1 on violations");
  };

  GenFlags g;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic point file");
  common(gen, false);
  gen->add_option("--kind", g.kind, "uniform|affine|clustered|curve|sphere");
  gen->add_option("--n", g.params.n, "number of points");
  gen->add_option("--d", g.params.dim, "ambient dimension");
  gen->add_option("--k", c.k, "flat dimension (affine)");
  gen->add_option("--spacing", g.params.spacing, "curve vertex spacing");
  gen->add_option("--clusters", g.params.clusters, "number of blobs");
  gen->add_option("--sigma", g.params.cluster_sigma, "blob standard deviation");
  gen->add_option("--radius", g.params.radius, "sphere radius");
  gen->add_option("--noise", g.params.noise, "sphere radial noise");
  gen->add_option("--extent", g.params.extent, "side length of the sampled region");

  auto* forest = app.add_subcommand("build-forest", "build the net-forest at scale t");
  pipeline(forest);

  auto* wspd = app.add_subcommand("wspd", "t-restricted epsilon-WSPD");
  pipeline(wspd);
  wspd->add_option("--forest", c.forest, "forest file at scale t");
  wspd->add_option("--epsilon", c.epsilon, "separation");

  auto* wssd = app.add_subcommand("wssd", "t-restricted (epsilon, k)-WSSD");
  pipeline(wssd);
  wssd->add_option("--forest", c.forest, "forest file at scale 2t");
  wssd->add_option("--epsilon", c.epsilon, "separation");
  wssd->add_option("--k", c.k, "largest simplex dimension");

  auto* cech = app.add_subcommand("cech", "approximate truncated Cech filtration");
  pipeline(cech);
  cech->add_option("--forest", c.forest, "forest file at scale 2t");
  cech->add_option("--epsilon", c.epsilon, "approximation");
  cech->add_option("--k", c.k, "largest simplex dimension");
  cech->add_option("--grid", c.grid, "'auto' or comma-separated alphas in (0, t]");

  auto* dim = app.add_subcommand("dim-estimate", "log2 of the largest child count");
  pipeline(dim);
  dim->add_option("--forest", c.forest, "forest file at scale t");

  BenchFlags b;
  auto* bench = app.add_subcommand("bench", "LSH build/query sweep as TSV");
  common(bench);
  bench->add_option("--kind", b.kind, "generator when --input is absent");
  bench->add_option("--n", b.ns, "comma-separated sizes");
  bench->add_option("--rho", b.rhos, "comma-separated rho values");
  bench->add_option("--d", b.dim, "ambient dimension");
  bench->add_option("--t", c.t, "query radius (default: 1st percentile of distances)");
  bench->add_option("--delta", c.delta, "LSH failure probability");

  std::string scale = "tiny";
  auto* suite = app.add_subcommand("run-suite", "property suite as TSV");
  common(suite, false);
  suite->add_option("--scale", scale, "tiny|small|medium");
  std::string only;
  suite->add_option("--only", only, "run properties whose id starts with this prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(g, c);
    if (*forest) return cmd_build_forest(c);
    if (*wspd) return cmd_wspd(c);
    if (*wssd) return cmd_wssd(c);
    if (*cech) return cmd_cech(c);
    if (*dim) return cmd_dim(c);
    if (*bench) return cmd_bench(b, c);
    if (*suite) return cmd_suite(scale, only, c);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
