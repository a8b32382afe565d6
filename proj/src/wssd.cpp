#include "scalenet/wssd.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "scalenet/errors.hpp"
#include "scalenet/text.hpp"
#include "scalenet/wspd.hpp"

namespace scalenet {

Ball approx_meb(std::span<const std::vector<double>> points, double delta) {
  if (points.empty()) throw InputError("approx_meb: empty input");
  if (!(delta > 0.0 && delta <= 0.5)) throw InputError("approx_meb: delta must lie in (0, 1/2]");
  const std::size_t dim = points[0].size();
  std::vector<double> c = points[0];
  auto farthest = [&](double* out_d) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double d = squared_distance(c, points[i]);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    if (out_d) *out_d = std::sqrt(best_d);
    return best;
  };
  const int rounds = static_cast<int>(std::ceil(1.0 / (delta * delta)));
  for (int i = 1; i <= rounds; ++i) {
    const auto& f = points[farthest(nullptr)];
    const double step = 1.0 / (i + 1);
    for (std::size_t j = 0; j < dim; ++j) c[j] += (f[j] - c[j]) * step;
  }
  Ball b;
  farthest(&b.radius);
  b.center = std::move(c);
  return b;
}

Ball approx_meb(const PointCloud& cloud, std::span<const PointId> ids, double delta) {
  std::vector<std::vector<double>> pts;
  pts.reserve(ids.size());
  for (PointId i : ids) pts.emplace_back(cloud[i].begin(), cloud[i].end());
  return approx_meb(pts, delta);
}

namespace {

constexpr double kLiftMebDelta = 0.05;
// Rel(a) reaches 14 tau^l; two covering radii of 2.2 tau^l are spent on the
// ancestor and on the node holding the new vertex.
constexpr double kAncestorReach = kRelFactor - 2.0 * kCoverFactor;

class Lifter {
 public:
  Lifter(const NetForest& forest, const PointCloud& cloud, double epsilon, double t)
      : f_(forest), cloud_(cloud), eps_(epsilon), t_(t), radii_(measured_radii(forest, cloud)) {}

  double cover(NodeId v) const { return radii_[v]; }

  double rep_dist(NodeId a, NodeId b) const {
    return distance(cloud_[f_.nodes[a].rep], cloud_[f_.nodes[b].rep]);
  }

  bool accepted(double max_cover, double lower_bound) const {
    return 2.0 * max_cover <= eps_ * lower_bound;
  }

  Ball rep_ball(const std::vector<NodeId>& nodes) const {
    std::vector<PointId> reps;
    for (NodeId v : nodes) reps.push_back(f_.nodes[v].rep);
    return approx_meb(cloud_, reps, kLiftMebDelta);
  }

  void lift(const WsTuple& g, std::vector<WsTuple>& out) const {
    double max_cover = 0.0;
    for (NodeId v : g.nodes) max_cover = std::max(max_cover, cover(v));
    const NodeId v0 = g.nodes.front();
    const auto at = cloud_[f_.nodes[v0].rep];
    const double rad = g.meb_cache.radius;
    const double reach = cover(v0) + std::min(2.0 * t_, 3.0 * (rad + max_cover));

    NodeId a = v0;
    while (!f_.nodes[a].is_root() && reach > kAncestorReach * tau_pow(f_.nodes[a].level)) {
      a = *f_.nodes[a].parent;
    }

    std::vector<NodeId> stack(f_.nodes[a].rel.begin(), f_.nodes[a].rel.end());
    while (!stack.empty()) {
      NodeId y = stack.back();
      stack.pop_back();
      double dy = distance(at, cloud_[f_.nodes[y].rep]);
      if (dy - radii_[y] > reach * (1.0 + 1e-9)) continue;
      double lb = g.lower_bound;
      for (NodeId v : g.nodes) lb = std::max(lb, 0.5 * (rep_dist(v, y) - cover(v) - cover(y)));
      if (accepted(std::max(max_cover, cover(y)), lb) || f_.nodes[y].is_leaf()) {
        WsTuple next;
        next.nodes = g.nodes;
        next.nodes.insert(std::upper_bound(next.nodes.begin(), next.nodes.end(), y), y);
        next.lower_bound = lb;
        out.push_back(std::move(next));
        continue;
      }
      for (NodeId c : f_.nodes[y].children) stack.push_back(c);
    }
  }

  void finish(std::vector<WsTuple>& tier) const {
    std::sort(tier.begin(), tier.end(), [](const WsTuple& x, const WsTuple& y) {
      return x.nodes != y.nodes ? x.nodes < y.nodes : x.lower_bound > y.lower_bound;
    });
    tier.erase(std::unique(tier.begin(), tier.end(),
                           [](const WsTuple& x, const WsTuple& y) { return x.nodes == y.nodes; }),
               tier.end());
    for (WsTuple& g : tier) g.meb_cache = rep_ball(g.nodes);
  }

 private:
  const NetForest& f_;
  const PointCloud& cloud_;
  double eps_;
  double t_;
  std::vector<double> radii_;
};

}  // namespace

Wssd gen_wssd(const NetForest& forest, const PointCloud& cloud, double epsilon, int k, double t) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InputError("wssd: epsilon must lie in (0, 1]");
  if (k < 1) throw InputError("wssd: k must be at least 1");
  if (!(t > 0.0)) throw InputError("wssd: t must be positive");
  if (std::abs(forest.t - 2.0 * t) > 1e-12 * t) {
    throw InputError("wssd: forest must be built at 2t=" + format_real(2.0 * t) + ", got t=" +
                     format_real(forest.t));
  }
  Wssd out;
  out.epsilon = epsilon;
  out.t = t;
  out.k = k;
  Lifter lifter(forest, cloud, epsilon, t);

  // Pairs separated at eps / (2 + eps) also pass the tuple test at eps.
  Wspd base = gen_wspd(forest, cloud, epsilon / (2.0 + epsilon), 2.0 * t);
  std::vector<WsTuple> first;
  for (const WsPair& p : base.pairs) {
    WsTuple g;
    g.nodes = {p.u, p.v};
    g.lower_bound = std::max(
        0.0, 0.5 * (lifter.rep_dist(p.u, p.v) - lifter.cover(p.u) - lifter.cover(p.v)));
    first.push_back(std::move(g));
  }
  lifter.finish(first);
  out.tiers.push_back(std::move(first));

  for (int j = 2; j <= k; ++j) {
    std::vector<WsTuple> next;
    for (const WsTuple& g : out.tiers.back()) lifter.lift(g, next);
    lifter.finish(next);
    out.tiers.push_back(std::move(next));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

constexpr std::size_t kMaxExamples = 20;

std::uint64_t encode(std::vector<PointId> pts) {
  std::sort(pts.begin(), pts.end());
  std::uint64_t key = pts.size();
  for (PointId p : pts) key = key * 0x10001ull + p + 1;
  return key;
}

}  // namespace

WssdReport verify_wssd(const PointCloud& cloud, const NetForest& forest, const Wssd& wssd,
                       const WssdCheckOptions& options) {
  WssdReport report;
  const std::size_t n = cloud.size();
  if (n >= 0xFFFF) throw InputError("verify_wssd: cloud too large for the exhaustive check");
  auto note = [&](std::string msg) {
    if (report.examples.size() < kMaxExamples) report.examples.push_back(std::move(msg));
  };

  std::unordered_set<std::uint64_t> covered;
  for (int j = 1; j <= wssd.k; ++j) {
    for (const WsTuple& g : wssd.tier(j)) {
      ++report.tuples_checked;
      std::vector<std::span<const PointId>> sets;
      std::size_t combos = 1;
      for (NodeId v : g.nodes) {
        sets.push_back(forest.points(v));
        combos = sets.back().size() > options.max_transversals / combos
                     ? options.max_transversals + 1
                     : combos * sets.back().size();
      }
      std::vector<PointId> all;
      for (auto s : sets) all.insert(all.end(), s.begin(), s.end());

      const bool check_separation = combos <= options.max_transversals;
      if (!check_separation) {
        ++report.tuples_skipped;
        note("tuple with " + std::to_string(g.nodes.size()) +
             " nodes skipped for separation: too many transversals");
      }
      std::vector<std::size_t> idx(sets.size(), 0);
      std::vector<PointId> pick(sets.size());
      std::vector<std::vector<double>> coords(sets.size());
      bool bad = false;
      for (;;) {
        for (std::size_t i = 0; i < sets.size(); ++i) pick[i] = sets[i][idx[i]];
        covered.insert(encode(pick));
        if (check_separation && !bad) {
          for (std::size_t i = 0; i < sets.size(); ++i) {
            coords[i].assign(cloud[pick[i]].begin(), cloud[pick[i]].end());
          }
          Ball b = exact_meb(coords);
          b.radius *= 1.0 + wssd.epsilon;
          for (PointId z : all) {
            if (!b.contains(cloud[z])) {
              bad = true;
              break;
            }
          }
        }
        std::size_t i = 0;
        while (i < sets.size() && ++idx[i] == sets[i].size()) idx[i++] = 0;
        if (i == sets.size()) break;
      }
      if (bad) {
        ++report.separation_failures;
        std::string ids;
        for (NodeId v : g.nodes) ids += " " + std::to_string(v);
        note("tuple" + ids + " not well separated");
      }
    }
  }

  // Enumerate multisets of j + 1 points in ascending order.
  for (int j = 1; j <= wssd.k; ++j) {
    std::vector<PointId> pts(j + 1, 0);
    std::vector<std::vector<double>> coords(j + 1);
    for (;;) {
      bool distinct = std::adjacent_find(pts.begin(), pts.end()) == pts.end();
      bool wanted = distinct;
      if (!distinct && options.degenerate) wanted = pts.front() != pts.back();
      if (wanted) {
        for (int i = 0; i <= j; ++i) coords[i].assign(cloud[pts[i]].begin(), cloud[pts[i]].end());
        if (exact_meb(coords).radius <= wssd.t) {
          ++report.simplices_checked;
          if (!covered.count(encode(pts))) {
            ++report.coverage_failures;
            std::string ids;
            for (PointId p : pts) ids += " " + std::to_string(p);
            note("simplex" + ids + " not covered");
          }
        }
      }
      int i = j;
      while (i >= 0 && pts[i] == n - 1) --i;
      if (i < 0) break;
      ++pts[i];
      for (int r = i + 1; r <= j; ++r) pts[r] = pts[i];
    }
  }
  return report;
}

void write_wssd(std::ostream& out, const Wssd& wssd) {
  out << "wssd v1 epsilon=" << format_real(wssd.epsilon) << " k=" << wssd.k
      << " t=" << format_real(wssd.t) << '\n';
  for (int j = 1; j <= wssd.k; ++j) {
    for (const WsTuple& g : wssd.tier(j)) {
      out << "tuple " << j;
      for (NodeId v : g.nodes) out << ' ' << v;
      out << '\n';
    }
  }
}

Wssd read_wssd(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("wssd v1")) {
    throw InputError("wssd: missing 'wssd v1' header");
  }
  Wssd w;
  w.epsilon = parse_real(require_field(line, "epsilon"));
  w.k = static_cast<int>(parse_int(require_field(line, "k")));
  w.t = parse_real(require_field(line, "t"));
  if (w.k < 1) throw InputError("wssd: k must be at least 1");
  w.tiers.resize(w.k);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tok = split(line, ' ');
    if (tok.size() < 3 || tok[0] != "tuple") throw InputError("wssd: bad line '" + line + "'");
    long long j = parse_int(tok[1]);
    if (j < 1 || j > w.k || tok.size() != static_cast<std::size_t>(j) + 3) {
      throw InputError("wssd: bad tuple arity in '" + line + "'");
    }
    WsTuple g;
    for (std::size_t i = 2; i < tok.size(); ++i) g.nodes.push_back(static_cast<NodeId>(parse_int(tok[i])));
    w.tiers[j - 1].push_back(std::move(g));
  }
  return w;
}

}  // namespace scalenet
