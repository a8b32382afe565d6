#include "scalenet/netforest.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "scalenet/errors.hpp"
#include "scalenet/text.hpp"

namespace scalenet {

namespace {

constexpr PointId kUnassigned = std::numeric_limits<PointId>::max();
constexpr int kMaxDepth = 4000;

// Radius of the neighbourhood kept between centres of one level while the
// nested nets are built, in units of tau^level.
constexpr double kLinkFactor = 2.5;

double root_rel_radius(double t) { return kRelFactor * t / kCoverFactor; }

}  // namespace

double tau_pow(int level) {
  constexpr int kSpan = 320;
  static const std::array<double, 2 * kSpan + 1> table = [] {
    std::array<double, 2 * kSpan + 1> t{};
    for (int i = 0; i <= 2 * kSpan; ++i) t[i] = std::pow(kTau, i - kSpan);
    return t;
  }();
  if (level < -kSpan || level > kSpan) return std::pow(kTau, level);
  return table[level + kSpan];
}

int root_level(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("root_level: t must be positive");
  const double x = t / kCoverFactor;
  int l = static_cast<int>(std::floor(std::log(x) / std::log(kTau)));
  // Correct the floating-point floor so exact powers land on their level.
  constexpr double slack = 1e-12;
  while (tau_pow(l + 1) <= x * (1.0 + slack)) ++l;
  while (tau_pow(l) > x * (1.0 + slack)) --l;
  return l;
}

NetAssignment build_net(const PointCloud& cloud, double t, const NeighbourIndex& nn) {
  if (!(t > 0.0)) throw InputError("build_net: t must be positive");
  const std::size_t n = cloud.size();
  NetAssignment out;
  out.netpoint.assign(n, kUnassigned);
  std::vector<double> dist(n, 0.0);
  for (PointId p = 0; p < n; ++p) {
    if (out.netpoint[p] != kUnassigned) continue;
    out.netpoint[p] = p;
    dist[p] = 0.0;
    out.net_points.push_back(p);
    for (PointId q : nn.neighbours(p)) {
      double d = distance(cloud[p], cloud[q]);
      if (d > t) continue;
      if (out.netpoint[q] == kUnassigned || d < dist[q]) {
        out.netpoint[q] = p;
        dist[q] = d;
      }
    }
  }
  return out;
}

std::vector<std::vector<NodeId>> build_root_rel(const PointCloud& cloud,
                                                std::span<const PointId> net_points, double t,
                                                const NeighbourIndex& nn7t) {
  const std::size_t m = net_points.size();
  const double r = root_rel_radius(t);
  std::vector<std::vector<NodeId>> rel(m);
  for (NodeId i = 0; i < m; ++i) {
    rel[i].push_back(i);
    for (PointId j : nn7t.neighbours(i)) {
      if (j == i || j >= m) continue;
      if (distance(cloud[net_points[i]], cloud[net_points[j]]) <= r) {
        rel[i].push_back(j);
        rel[j].push_back(i);  // a probabilistic index may find only one direction
      }
    }
  }
  for (auto& list : rel) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return rel;
}

// ---------------------------------------------------------------------------
// Cluster trees from nested greedy nets.
//
// N_L = {root rep}; N_{j-1} extends N_j greedily (ascending index) with points
// farther than tau^{j-1} from every centre. A centre entering at level j-1 is
// attached to its nearest centre of N_j. A centre c becomes a node at every
// level where it gains children, plus one leaf.

namespace {

class ClusterBuilder {
 public:
  ClusterBuilder(NetForest& forest, const PointCloud& cloud, std::span<const PointId> cluster,
                 PointId root_rep)
      : forest_(forest), cloud_(cloud), ids_(cluster.begin(), cluster.end()) {
    std::sort(ids_.begin(), ids_.end());
    auto it = std::lower_bound(ids_.begin(), ids_.end(), root_rep);
    if (it == ids_.end() || *it != root_rep) {
      throw InputError("build_cluster_tree: root rep is not in the cluster");
    }
    root_ = static_cast<int>(it - ids_.begin());
  }

  NodeId run() {
    const int m = static_cast<int>(ids_.size());
    entry_.assign(m, INT_MIN);
    parent_.assign(m, -1);
    if (m > 1) nest();
    children_.assign(m, {});
    for (int i = 0; i < m; ++i) {
      if (parent_[i] >= 0) children_[parent_[i]].push_back({entry_[i] + 1, i});
    }
    for (auto& list : children_) std::sort(list.begin(), list.end(), [](auto a, auto b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    return make_node(root_, forest_.root_level, std::nullopt);
  }

 private:
  double dist(int a, int b) const { return distance(cloud_[ids_[a]], cloud_[ids_[b]]); }

  void nest() {
    const int m = static_cast<int>(ids_.size());
    const int top = forest_.root_level;
    entry_[root_] = top;

    std::vector<int> cand(m, root_);
    std::vector<double> cand_dist(m);
    for (int i = 0; i < m; ++i) cand_dist[i] = dist(i, root_);
    std::vector<int> pending;
    for (int i = 0; i < m; ++i) if (i != root_) pending.push_back(i);

    std::vector<int> centres{root_};
    std::vector<std::vector<int>> link(m);  // centres of the current level within 2.5 tau^level
    link[root_] = {root_};
    std::vector<std::vector<int>> fresh(m);  // new centres keyed by their previous candidate

    int j = top - 1;
    for (int depth = 0;; ++depth, --j) {
      bool only_duplicates = std::all_of(pending.begin(), pending.end(),
                                         [&](int p) { return cand_dist[p] == 0.0; });
      if (only_duplicates) break;
      if (depth > kMaxDepth) throw StateError("build_cluster_tree: level range exhausted");

      const double r = tau_pow(j);
      std::vector<int> added;
      std::vector<int> still;
      std::vector<int> next_cand(m, -1);
      std::vector<double> next_dist(m, 0.0);
      for (int p : pending) {
        int best = -1;
        double best_d = 0.0;
        auto consider = [&](int z) {
          double d = dist(p, z);
          if (d <= r && (best < 0 || d < best_d || (d == best_d && z < best))) {
            best = z;
            best_d = d;
          }
        };
        for (int c : link[cand[p]]) {
          consider(c);
          for (int y : fresh[c]) consider(y);
        }
        if (best < 0) {
          entry_[p] = j;
          fresh[cand[p]].push_back(p);
          added.push_back(p);
        } else {
          next_cand[p] = best;
          next_dist[p] = best_d;
          still.push_back(p);
        }
      }

      for (int y : added) {
        int best = -1;
        double best_d = 0.0;
        for (int c : link[cand[y]]) {
          double d = dist(y, c);
          if (best < 0 || d < best_d || (d == best_d && c < best)) {
            best = c;
            best_d = d;
          }
        }
        parent_[y] = best;
      }

      std::vector<int> all = centres;
      all.insert(all.end(), added.begin(), added.end());
      std::vector<std::vector<int>> next_link(m);
      const double reach = kLinkFactor * r;
      for (int x : all) {
        int anchor = entry_[x] == j ? cand[x] : x;
        auto& out = next_link[x];
        for (int c : link[anchor]) {
          if (dist(x, c) <= reach) out.push_back(c);
          for (int y : fresh[c]) {
            if (dist(x, y) <= reach) out.push_back(y);
          }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
      }
      for (int c : centres) fresh[c].clear();
      link = std::move(next_link);

      for (int p : still) {
        cand[p] = next_cand[p];
        cand_dist[p] = next_dist[p];
      }
      for (int y : added) {
        cand[y] = y;
        cand_dist[y] = 0.0;
      }
      centres = std::move(all);
      pending = std::move(still);
    }

    // Coincident points never separate; hang them below their centre.
    for (int p : pending) {
      entry_[p] = j;
      parent_[p] = cand[p];
    }
  }

  // Highest level below `below` at which centre c gains children, or INT_MIN.
  int next_internal_level(int c, int below) const {
    for (auto [level, child] : children_[c]) {
      if (level < below) return level;
    }
    return INT_MIN;
  }

  NodeId new_node(int c, int level, std::optional<NodeId> parent) {
    NetNode node;
    node.id = static_cast<NodeId>(forest_.nodes.size());
    node.rep = ids_[c];
    node.level = level;
    node.parent = parent;
    forest_.nodes.push_back(node);
    if (parent) forest_.nodes[*parent].children.push_back(node.id);
    return node.id;
  }

  NodeId make_node(int c, int level, std::optional<NodeId> parent) {
    NodeId id = new_node(c, level, parent);
    if (ids_.size() == 1) return id;
    int cont = next_internal_level(c, level);
    if (cont != INT_MIN) {
      make_node(c, cont, id);
    } else {
      new_node(c, level - 1, id);  // leaf; level fixed up once all trees exist
    }
    for (auto [child_level, y] : children_[c]) {
      if (child_level != level) continue;
      int top = next_internal_level(y, INT_MAX);
      if (top != INT_MIN) {
        make_node(y, top, id);
      } else {
        new_node(y, level - 1, id);
      }
    }
    return id;
  }

  NetForest& forest_;
  const PointCloud& cloud_;
  std::vector<PointId> ids_;
  int root_ = 0;
  std::vector<int> entry_;
  std::vector<int> parent_;
  std::vector<std::vector<std::pair<int, int>>> children_;  // (level, child), level descending
};

}  // namespace

NodeId build_cluster_tree(NetForest& forest, const PointCloud& cloud,
                          std::span<const PointId> cluster, PointId root_rep) {
  if (cluster.empty()) throw InputError("build_cluster_tree: empty cluster");
  ClusterBuilder builder(forest, cloud, cluster, root_rep);
  NodeId root = builder.run();
  forest.roots.push_back(root);
  return root;
}

// ---------------------------------------------------------------------------
// Forest accessors

std::span<const PointId> NetForest::points(NodeId id) const {
  const NetNode& v = nodes.at(id);
  return std::span<const PointId>(leaf_order.data() + v.begin, v.size());
}

double NetForest::covering_radius(NodeId id) const {
  const NetNode& v = nodes.at(id);
  if (v.is_root()) return t;
  return kCoverFactor * tau_pow(v.level);
}

double NetForest::diameter_bound(NodeId id) const {
  const NetNode& v = nodes.at(id);
  if (v.is_leaf()) return 0.0;
  return 2.0 * covering_radius(id);
}

double NetForest::rel_radius(NodeId id) const {
  const NetNode& v = nodes.at(id);
  if (v.is_root()) return root_rel_radius(t);
  return kRelFactor * tau_pow(v.level);
}

NodeId NetForest::root_of(NodeId id) const {
  while (nodes.at(id).parent) id = *nodes[id].parent;
  return id;
}

void NetForest::rebuild_ranges() {
  leaf_order.clear();
  leaf_of.assign(point_count, std::numeric_limits<NodeId>::max());
  std::vector<std::pair<NodeId, bool>> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.push_back({*it, false});
  while (!stack.empty()) {
    auto [id, done] = stack.back();
    stack.pop_back();
    NetNode& v = nodes.at(id);
    if (done) {
      v.end = static_cast<std::uint32_t>(leaf_order.size());
      continue;
    }
    v.begin = static_cast<std::uint32_t>(leaf_order.size());
    if (v.is_leaf()) {
      if (v.rep >= point_count || leaf_of[v.rep] != std::numeric_limits<NodeId>::max()) {
        throw InputError("forest: leaf rep out of range or repeated");
      }
      leaf_of[v.rep] = id;
      leaf_order.push_back(v.rep);
      v.end = v.begin + 1;
      continue;
    }
    stack.push_back({id, true});
    for (auto c = v.children.rbegin(); c != v.children.rend(); ++c) stack.push_back({*c, false});
  }
  if (leaf_order.size() != point_count) throw InputError("forest: leaves do not cover every point");
}

// ---------------------------------------------------------------------------
// Pipeline

NetForest build_forest(const PointCloud& cloud, double t, const NeighbourFactory& factory,
                       const ForestOptions& options) {
  NetForest forest;
  forest.point_count = cloud.size();
  forest.dim = cloud.dim();
  forest.t = t;
  forest.root_level = root_level(t);

  auto nn = factory(cloud, t, 2 * options.stream);
  NetAssignment net = build_net(cloud, t, *nn);
  nn.reset();

  PointCloud centres = cloud.subset(net.net_points);
  auto nn7 = factory(centres, 7.0 * t, 2 * options.stream + 1);
  auto root_rel = build_root_rel(cloud, net.net_points, t, *nn7);
  nn7.reset();

  std::vector<std::uint32_t> slot(cloud.size());
  for (std::uint32_t i = 0; i < net.net_points.size(); ++i) slot[net.net_points[i]] = i;
  std::vector<std::vector<PointId>> clusters(net.net_points.size());
  for (PointId p = 0; p < cloud.size(); ++p) clusters[slot[net.netpoint[p]]].push_back(p);

  for (std::size_t i = 0; i < clusters.size(); ++i) {
    build_cluster_tree(forest, cloud, clusters[i], net.net_points[i]);
  }

  // Uniform nominal level for non-root leaves.
  int lowest = forest.root_level;
  for (const NetNode& v : forest.nodes) {
    if (!v.is_leaf()) lowest = std::min(lowest, v.level);
  }
  for (NetNode& v : forest.nodes) {
    if (v.is_leaf() && !v.is_root()) v.level = lowest - 1;
  }

  for (std::size_t i = 0; i < root_rel.size(); ++i) {
    auto& rel = forest.nodes[forest.roots[i]].rel;
    for (NodeId j : root_rel[i]) rel.push_back(forest.roots[j]);
    std::sort(rel.begin(), rel.end());
  }
  forest.rebuild_ranges();
  augment_rel(forest, cloud, options.rel_factor);
  return forest;
}

namespace {

// Children of one node ordered by distance to its rep, so a search can skip
// every child outside an annulus around the query distance.
struct ChildRing {
  std::vector<double> dist;
  std::vector<NodeId> ids;
  double max_cover = 0.0;
};

std::vector<ChildRing> child_rings(const NetForest& forest, const PointCloud& cloud) {
  std::vector<ChildRing> rings(forest.nodes.size());
  std::vector<std::pair<double, NodeId>> tmp;
  for (const NetNode& v : forest.nodes) {
    if (v.children.empty()) continue;
    tmp.clear();
    ChildRing& ring = rings[v.id];
    for (NodeId c : v.children) {
      tmp.push_back({distance(cloud[v.rep], cloud[forest.nodes[c].rep]), c});
      if (!forest.nodes[c].is_leaf()) ring.max_cover = std::max(ring.max_cover, forest.covering_radius(c));
    }
    std::sort(tmp.begin(), tmp.end());
    for (auto [d, c] : tmp) {
      ring.dist.push_back(d);
      ring.ids.push_back(c);
    }
  }
  return rings;
}

}  // namespace

void augment_rel(NetForest& forest, const PointCloud& cloud, double rel_factor) {
  for (NodeId r : forest.roots) {
    if (forest.nodes.at(r).rel.empty()) throw StateError("augment_rel: root Rel is missing");
  }
  const std::vector<ChildRing> rings = child_rings(forest, cloud);
  std::vector<NodeId> queue(forest.roots.begin(), forest.roots.end());
  std::vector<std::pair<NodeId, double>> stack;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (NodeId c : forest.nodes[u].children) queue.push_back(c);
    NetNode& node = forest.nodes[u];
    if (node.is_root()) continue;

    const auto at = cloud[node.rep];
    const double reach = rel_factor * tau_pow(node.level);
    const double slack = reach * (1.0 + 1e-9);
    std::vector<NodeId> rel;
    stack.clear();
    for (NodeId w : forest.nodes[*node.parent].rel) stack.push_back({w, distance(at, cloud[forest.nodes[w].rep])});
    while (!stack.empty()) {
      auto [w, d] = stack.back();
      stack.pop_back();
      const NetNode& cand = forest.nodes[w];
      if (cand.level <= node.level) {
        if (d <= reach) rel.push_back(w);
        continue;
      }
      // |d - dist(rep_w, rep_x)| <= dist(at, rep_x), so children outside
      // this window cannot come within reach.
      const ChildRing& ring = rings[w];
      const double width = slack + ring.max_cover + 1e-9 * (d + slack + ring.max_cover);
      auto lo = std::lower_bound(ring.dist.begin(), ring.dist.end(), d - width);
      auto hi = std::upper_bound(lo, ring.dist.end(), d + width);
      for (auto it = lo; it != hi; ++it) {
        NodeId x = ring.ids[static_cast<std::size_t>(it - ring.dist.begin())];
        const NetNode& child = forest.nodes[x];
        double dx = distance(at, cloud[child.rep]);
        // Any descendant rep lies within the covering radius of x.
        double cover = child.is_leaf() ? 0.0 : forest.covering_radius(x);
        if (dx - cover <= slack) stack.push_back({x, dx});
      }
    }
    std::sort(rel.begin(), rel.end());
    rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
    forest.nodes[u].rel = std::move(rel);
  }
}

std::vector<std::vector<NodeId>> brute_force_rel(const NetForest& forest, const PointCloud& cloud) {
  const std::size_t m = forest.nodes.size();
  std::vector<std::vector<NodeId>> rel(m);
  for (NodeId u = 0; u < m; ++u) {
    const NetNode& a = forest.nodes[u];
    const double reach = forest.rel_radius(u);
    for (NodeId v = 0; v < m; ++v) {
      const NetNode& b = forest.nodes[v];
      bool upper = b.is_root() || a.level < forest.nodes[*b.parent].level;
      if (b.level <= a.level && upper && distance(cloud[a.rep], cloud[b.rep]) <= reach) {
        rel[u].push_back(v);
      }
    }
  }
  return rel;
}

namespace {

// Level range (lower, upper] a node represents in net extraction.
bool spans(const NetForest& forest, const NetNode& v, int level) {
  bool above_lower = v.is_leaf() || v.level < level;
  bool below_upper = v.is_root() || level <= forest.nodes[*v.parent].level;
  return above_lower && below_upper;
}

}  // namespace

std::vector<PointId> extract_net(const NetForest& forest, int level) {
  if (level > forest.root_level) {
    throw InputError("extract_net: level " + std::to_string(level) + " is above root level " +
                     std::to_string(forest.root_level));
  }
  std::vector<PointId> reps;
  if (level == forest.root_level) {
    for (NodeId r : forest.roots) reps.push_back(forest.nodes[r].rep);
  } else {
    for (const NetNode& v : forest.nodes) {
      if (spans(forest, v, level)) reps.push_back(v.rep);
    }
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

NodeId cell_of(const NetForest& forest, PointId p, int h) {
  if (h >= forest.root_level) throw InputError("cell_of: level must lie below the root level");
  if (p >= forest.point_count) throw InputError("cell_of: point out of range");
  NodeId v = forest.leaf_of[p];
  while (!spans(forest, forest.nodes[v], h)) v = *forest.nodes[v].parent;
  return v;
}

// ---------------------------------------------------------------------------
// Invariant checks

namespace {

constexpr double kTol = 1e-9;

bool at_most(double d, double r) { return d <= r * (1.0 + kTol) + 1e-300; }

std::string node_label(const NetNode& v) {
  return "node " + std::to_string(v.id) + " (rep " + std::to_string(v.rep) + ", level " +
         std::to_string(v.level) + ")";
}

// Canonical index of each point among coincident copies.
std::vector<PointId> canonical_copies(const PointCloud& cloud) {
  std::vector<PointId> order(cloud.size());
  for (PointId i = 0; i < order.size(); ++i) order[i] = i;
  auto less = [&](PointId a, PointId b) {
    auto x = cloud[a], y = cloud[b];
    if (std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end())) return true;
    if (std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end())) return false;
    return a < b;
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<PointId> canon(cloud.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    bool same = i > 0 && std::ranges::equal(cloud[order[i]], cloud[order[i - 1]]);
    canon[order[i]] = same ? canon[order[i - 1]] : order[i];
  }
  return canon;
}

}  // namespace

std::vector<double> measured_radii(const NetForest& forest, const PointCloud& cloud) {
  std::vector<double> radii(forest.nodes.size(), 0.0);
  for (const NetNode& v : forest.nodes) {
    for (PointId p : forest.points(v.id)) radii[v.id] = std::max(radii[v.id], distance(cloud[v.rep], cloud[p]));
  }
  return radii;
}

ForestReport check_forest(const NetForest& forest, const PointCloud& cloud) {
  ForestReport report;
  auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };
  const std::size_t n = cloud.size();
  if (forest.point_count != n) {
    fail("forest covers " + std::to_string(forest.point_count) + " points, cloud has " +
         std::to_string(n));
    return report;
  }

  // (t,t)-net over the roots, partition and closest assignment.
  std::vector<NodeId> root_of_point(n);
  std::size_t total = 0;
  for (NodeId r : forest.roots) {
    total += forest.nodes[r].size();
    for (PointId p : forest.points(r)) root_of_point[p] = r;
  }
  if (total != n) fail("root point sets have total size " + std::to_string(total));
  for (std::size_t i = 0; i < forest.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < forest.roots.size(); ++j) {
      double d = distance(cloud[forest.nodes[forest.roots[i]].rep],
                          cloud[forest.nodes[forest.roots[j]].rep]);
      if (d <= forest.t * (1.0 - kTol)) {
        fail("roots " + std::to_string(forest.roots[i]) + " and " +
             std::to_string(forest.roots[j]) + " are within t");
      }
    }
  }
  for (PointId p = 0; p < n; ++p) {
    double own = distance(cloud[p], cloud[forest.nodes[root_of_point[p]].rep]);
    if (!at_most(own, forest.t)) fail("point " + std::to_string(p) + " is farther than t from its root");
    for (NodeId r : forest.roots) {
      if (!at_most(own, distance(cloud[p], cloud[forest.nodes[r].rep]))) {
        fail("point " + std::to_string(p) + " is not assigned to its closest root");
        break;
      }
    }
  }

  // Per-node structure, covering and packing.
  const auto canon = canonical_copies(cloud);
  std::vector<std::uint8_t> inside(n, 0);
  std::vector<std::uint8_t> copy_inside(n, 0);
  for (const NetNode& v : forest.nodes) {
    auto pts = forest.points(v.id);
    if (v.is_leaf() != (pts.size() == 1)) fail(node_label(v) + ": leaf iff single point fails");
    if (!v.is_leaf()) {
      bool inherits = false;
      for (NodeId c : v.children) {
        if (forest.nodes[c].level >= v.level) fail(node_label(v) + ": child level not below");
        if (forest.nodes[c].parent != v.id) fail(node_label(v) + ": child parent link broken");
        inherits = inherits || forest.nodes[c].rep == v.rep;
      }
      if (!inherits) fail(node_label(v) + ": rep not inherited from a child");
      if (!v.is_root() && v.children.size() < 2) fail(node_label(v) + ": fewer than two children");
    }
    const double cover = forest.covering_radius(v.id);
    for (PointId p : pts) {
      if (!at_most(distance(cloud[p], cloud[v.rep]), cover)) {
        fail(node_label(v) + ": point " + std::to_string(p) + " outside covering radius");
        break;
      }
    }
    if (v.is_root()) continue;

    const double pack = kPackFactor * tau_pow(forest.nodes[*v.parent].level);
    const NodeId own_root = root_of_point[v.rep];
    for (PointId p : pts) {
      inside[p] = 1;
      copy_inside[canon[p]] = 1;
    }
    for (PointId q = 0; q < n; ++q) {
      if (inside[q] || copy_inside[canon[q]]) continue;
      if (distance(cloud[q], cloud[v.rep]) >= pack * (1.0 - kTol)) continue;
      if (root_of_point[q] == own_root) {
        fail(node_label(v) + ": point " + std::to_string(q) + " inside packing radius");
      } else {
        ++report.cross_cluster_packing;
      }
    }
    for (PointId p : pts) {
      inside[p] = 0;
      copy_inside[canon[p]] = 0;
    }
  }

  auto expected = brute_force_rel(forest, cloud);
  for (NodeId u = 0; u < forest.nodes.size(); ++u) {
    if (forest.nodes[u].rel != expected[u]) {
      fail(node_label(forest.nodes[u]) + ": Rel differs from direct evaluation (" +
           std::to_string(forest.nodes[u].rel.size()) + " vs " +
           std::to_string(expected[u].size()) + " members)");
    }
  }
  return report;
}

ForestReport check_extracted_net(const NetForest& forest, const PointCloud& cloud, int level) {
  ForestReport report;
  auto reps = extract_net(forest, level);
  const bool top = level == forest.root_level;
  const double cover = top ? forest.t : kCoverFactor * tau_pow(level);
  const double separation = top ? forest.t : kPackFactor * tau_pow(level);

  for (PointId p = 0; p < cloud.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (PointId r : reps) best = std::min(best, distance(cloud[p], cloud[r]));
    if (!at_most(best, cover)) {
      report.violations.push_back("point " + std::to_string(p) + " is not covered at level " +
                                  std::to_string(level));
    }
  }
  const auto canon = canonical_copies(cloud);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      if (canon[reps[i]] == canon[reps[j]]) continue;
      double d = distance(cloud[reps[i]], cloud[reps[j]]);
      if (d >= separation * (1.0 - kTol)) continue;
      bool same_tree = forest.root_of(forest.leaf_of[reps[i]]) ==
                       forest.root_of(forest.leaf_of[reps[j]]);
      if (same_tree || top) {
        report.violations.push_back("reps " + std::to_string(reps[i]) + " and " +
                                    std::to_string(reps[j]) + " are too close");
      } else {
        ++report.cross_cluster_packing;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string join_ids(const std::vector<NodeId>& ids) {
  if (ids.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<NodeId> parse_ids(std::string_view text) {
  std::vector<NodeId> ids;
  if (text == "-" || text.empty()) return ids;
  for (auto part : split(text, ',')) ids.push_back(static_cast<NodeId>(parse_int(part)));
  return ids;
}

}  // namespace

void write_forest(std::ostream& out, const NetForest& forest) {
  out << "netforest v1 n=" << forest.point_count << " dim=" << forest.dim
      << " t=" << format_real(forest.t) << " tau=11 root_level=" << forest.root_level << '\n';
  for (const NetNode& v : forest.nodes) {
    out << "node " << v.id << " parent=" << (v.parent ? std::to_string(*v.parent) : "-")
        << " level=" << v.level << " rep=" << v.rep << " children=" << join_ids(v.children)
        << " rel=" << join_ids(v.rel) << '\n';
  }
}

NetForest read_forest(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("netforest v1")) {
    throw InputError("forest: missing 'netforest v1' header");
  }
  NetForest forest;
  forest.point_count = static_cast<std::size_t>(parse_int(require_field(line, "n")));
  forest.dim = static_cast<std::size_t>(parse_int(require_field(line, "dim")));
  forest.t = parse_real(require_field(line, "t"));
  if (parse_int(require_field(line, "tau")) != 11) throw InputError("forest: tau must be 11");
  forest.root_level = static_cast<int>(parse_int(require_field(line, "root_level")));

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tokens = split(line, ' ');
    if (tokens.size() < 2 || tokens[0] != "node") throw InputError("forest: bad line '" + line + "'");
    NetNode v;
    v.id = static_cast<NodeId>(parse_int(tokens[1]));
    if (v.id != forest.nodes.size()) throw InputError("forest: node ids must be consecutive");
    auto parent = require_field(line, "parent");
    if (parent != "-") v.parent = static_cast<NodeId>(parse_int(parent));
    v.level = static_cast<int>(parse_int(require_field(line, "level")));
    v.rep = static_cast<PointId>(parse_int(require_field(line, "rep")));
    v.children = parse_ids(require_field(line, "children"));
    v.rel = parse_ids(require_field(line, "rel"));
    forest.nodes.push_back(std::move(v));
  }
  for (const NetNode& v : forest.nodes) {
    if (!v.parent) {
      forest.roots.push_back(v.id);
    } else if (*v.parent >= forest.nodes.size()) {
      throw InputError("forest: parent id out of range");
    }
    for (NodeId c : v.children) {
      if (c >= forest.nodes.size() || forest.nodes[c].parent != v.id) {
        throw InputError("forest: inconsistent child link at node " + std::to_string(v.id));
      }
    }
    for (NodeId r : v.rel) {
      if (r >= forest.nodes.size()) throw InputError("forest: Rel id out of range");
    }
  }
  forest.rebuild_ranges();
  return forest;
}

void save_forest(const std::string& path, const NetForest& forest) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_forest(out, forest);
}

NetForest load_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  return read_forest(in);
}

}  // namespace scalenet
