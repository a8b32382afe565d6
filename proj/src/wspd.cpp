#include "scalenet/wspd.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "scalenet/errors.hpp"
#include "scalenet/text.hpp"

namespace scalenet {

namespace {

constexpr std::size_t kMaxExamples = 20;

void check_scale(const NetForest& forest, double t) {
  if (!(t > 0.0)) throw InputError("t must be positive");
  if (std::abs(forest.t - t) > 1e-12 * t) {
    throw InputError("forest was built at t=" + format_real(forest.t) + ", requested t=" +
                     format_real(t));
  }
}

}  // namespace

bool well_separated(const NetForest& forest, const PointCloud& cloud, std::span<const double> radii,
                    NodeId u, NodeId v, double epsilon) {
  double bound = 2.0 * std::max(radii[u], radii[v]);
  return bound <= epsilon * distance(cloud[forest.nodes[u].rep], cloud[forest.nodes[v].rep]);
}

Wspd gen_wspd(const NetForest& forest, const PointCloud& cloud, double epsilon, double t) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("wspd: epsilon must lie in (0, 1)");
  check_scale(forest, t);
  Wspd out;
  out.epsilon = epsilon;
  out.t = t;
  const std::vector<double> radii = measured_radii(forest, cloud);

  std::vector<std::pair<NodeId, NodeId>> stack;
  for (NodeId r : forest.roots) {
    for (NodeId s : forest.nodes[r].rel) stack.push_back({std::min(r, s), std::max(r, s)});
  }
  std::sort(stack.begin(), stack.end());
  stack.erase(std::unique(stack.begin(), stack.end()), stack.end());

  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const NetNode& na = forest.nodes[a];
    if (a == b) {
      for (std::size_t i = 0; i < na.children.size(); ++i) {
        for (std::size_t j = i; j < na.children.size(); ++j) {
          stack.push_back({na.children[i], na.children[j]});
        }
      }
      continue;
    }
    if (well_separated(forest, cloud, radii, a, b, epsilon)) {
      out.pairs.push_back({std::min(a, b), std::max(a, b)});
      continue;
    }
    double da = radii[a], db = radii[b];
    bool split_a = da > db || (da == db && a < b);
    NodeId big = split_a ? a : b, other = split_a ? b : a;
    for (NodeId c : forest.nodes[big].children) stack.push_back({c, other});
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  out.pairs.erase(std::unique(out.pairs.begin(), out.pairs.end()), out.pairs.end());
  return out;
}

double node_diameter(const NetForest& forest, const PointCloud& cloud, NodeId v) {
  auto pts = forest.points(v);
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::max(best, distance(cloud[pts[i]], cloud[pts[j]]));
    }
  }
  return best;
}

WspdReport verify_wspd(const PointCloud& cloud, const NetForest& forest, const Wspd& wspd,
                       double radius) {
  if (radius < 0.0) radius = wspd.t;
  WspdReport report;
  std::unordered_map<NodeId, double> diam;
  auto diameter_of = [&](NodeId v) {
    auto it = diam.find(v);
    if (it != diam.end()) return it->second;
    return diam[v] = node_diameter(forest, cloud, v);
  };

  const std::size_t n = cloud.size();
  std::vector<std::uint8_t> covered(n * n, 0);
  for (const WsPair& pr : wspd.pairs) {
    double d = distance(cloud[forest.nodes[pr.u].rep], cloud[forest.nodes[pr.v].rep]);
    double worst = std::max(diameter_of(pr.u), diameter_of(pr.v));
    if (worst > wspd.epsilon * d * (1.0 + 1e-9)) {
      ++report.separation_failures;
      if (report.examples.size() < kMaxExamples) {
        report.examples.push_back("pair " + std::to_string(pr.u) + " " + std::to_string(pr.v) +
                                  " not separated: diameter " + format_real(worst) +
                                  " vs distance " + format_real(d));
      }
    }
    for (PointId p : forest.points(pr.u)) {
      for (PointId q : forest.points(pr.v)) {
        covered[p * n + q] = 1;
        covered[q * n + p] = 1;
      }
    }
  }
  for (PointId p = 0; p < n; ++p) {
    for (PointId q = p + 1; q < n; ++q) {
      if (distance(cloud[p], cloud[q]) > radius) continue;
      ++report.required_pairs;
      if (covered[p * n + q]) continue;
      ++report.coverage_failures;
      if (report.examples.size() < kMaxExamples) {
        report.examples.push_back("points " + std::to_string(p) + " and " + std::to_string(q) +
                                  " not covered");
      }
    }
  }
  return report;
}

void write_wspd(std::ostream& out, const Wspd& wspd) {
  out << "wspd v1 epsilon=" << format_real(wspd.epsilon) << " t=" << format_real(wspd.t) << '\n';
  for (const WsPair& p : wspd.pairs) out << "pair " << p.u << ' ' << p.v << '\n';
}

Wspd read_wspd(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("wspd v1")) {
    throw InputError("wspd: missing 'wspd v1' header");
  }
  Wspd w;
  w.epsilon = parse_real(require_field(line, "epsilon"));
  w.t = parse_real(require_field(line, "t"));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tok = split(line, ' ');
    if (tok.size() != 3 || tok[0] != "pair") throw InputError("wspd: bad line '" + line + "'");
    auto u = static_cast<NodeId>(parse_int(tok[1])), v = static_cast<NodeId>(parse_int(tok[2]));
    w.pairs.push_back({std::min(u, v), std::max(u, v)});
  }
  return w;
}

}  // namespace scalenet
