#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalenet/geometry.hpp"
#include "scalenet/neighbours.hpp"

namespace scalenet {

inline constexpr double kTau = 11.0;
/// Covering radius of a node at level l is kCoverFactor * tau^l.
inline constexpr double kCoverFactor = 2.0 * kTau / (kTau - 1.0);
/// Packing radius of a node is kPackFactor * tau^{level of parent}.
inline constexpr double kPackFactor = (kTau - 5.0) / (2.0 * kTau * (kTau - 1.0));
/// Rel(u) holds nodes within kRelFactor * tau^{level(u)} of rep_u.
inline constexpr double kRelFactor = 14.0;

using NodeId = std::uint32_t;

double tau_pow(int level);

/// floor(log_tau(t / kCoverFactor)). Throws InputError unless t > 0.
int root_level(double t);

struct NetAssignment {
  std::vector<PointId> netpoint;    // N(p) for every input point
  std::vector<PointId> net_points;  // in the order they were chosen
};

/// Greedy (t,t)-net. `nn` must answer radius-t queries over `cloud`.
NetAssignment build_net(const PointCloud& cloud, double t, const NeighbourIndex& nn);

struct NetNode {
  NodeId id = 0;
  PointId rep = 0;
  int level = 0;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::vector<NodeId> rel;
  // P_v is leaf_order[begin, end) of the owning forest.
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  bool is_leaf() const { return children.empty(); }
  bool is_root() const { return !parent.has_value(); }
  std::size_t size() const { return end - begin; }
};

/// Forest of net-trees over one point cloud, truncated at scale t.
///
/// `roots` lists the trees in net order. Every non-root leaf carries the
/// same nominal level, one below the lowest internal level, which keeps
/// level(v) < level(parent(v)) and lets Rel(u) see leaves hanging from any
/// scale above u. A cluster of one point is a single root that is also a leaf.
class NetForest {
 public:
  std::size_t point_count = 0;
  std::size_t dim = 0;
  double t = 0.0;
  int root_level = 0;
  std::vector<NetNode> nodes;
  std::vector<NodeId> roots;
  std::vector<PointId> leaf_order;
  std::vector<NodeId> leaf_of;  // point -> its leaf node

  const NetNode& node(NodeId id) const { return nodes.at(id); }
  std::span<const PointId> points(NodeId id) const;

  /// Radius around rep_v containing P_v: t for roots, 2.2 tau^l otherwise.
  double covering_radius(NodeId id) const;
  /// Upper bound on diam(P_v): zero for leaves, twice the covering radius otherwise.
  double diameter_bound(NodeId id) const;
  /// Distance threshold defining Rel(v).
  double rel_radius(NodeId id) const;
  NodeId root_of(NodeId id) const;

  /// Recomputes leaf_order, ranges and leaf_of from the parent/child links.
  void rebuild_ranges();
};

struct ForestOptions {
  /// Factor applied to tau^{level(u)} when augmenting Rel below the roots.
  double rel_factor = kRelFactor;
  std::uint64_t stream = 0;  // offsets the near-neighbour streams of this build
};

/// Full pipeline: greedy net, root Rel via a 7t index over the net points,
/// one tree per cluster, top-down Rel augmentation.
NetForest build_forest(const PointCloud& cloud, double t, const NeighbourFactory& factory,
                       const ForestOptions& options = {});

/// Rel lists for roots (indexed like `net_points`), using `nn7t` built over
/// the net points only at radius 7t.
std::vector<std::vector<NodeId>> build_root_rel(const PointCloud& cloud,
                                                std::span<const PointId> net_points, double t,
                                                const NeighbourIndex& nn7t);

/// Appends the tree of one cluster to `forest`; returns the root id.
NodeId build_cluster_tree(NetForest& forest, const PointCloud& cloud,
                          std::span<const PointId> cluster, PointId root_rep);

/// Fills Rel of every non-root node top-down from the roots' Rel.
void augment_rel(NetForest& forest, const PointCloud& cloud, double rel_factor = kRelFactor);

/// Rel by direct evaluation of the defining predicate over all node pairs.
std::vector<std::vector<NodeId>> brute_force_rel(const NetForest& forest, const PointCloud& cloud);

/// Reps of nodes whose level range contains l. Leaves extend downward
/// without limit. l == root_level yields the roots.
std::vector<PointId> extract_net(const NetForest& forest, int level);

/// Node of the forest containing p whose level range contains h (h < root_level).
NodeId cell_of(const NetForest& forest, PointId p, int h);

struct ForestReport {
  std::vector<std::string> violations;
  /// Points of another cluster inside a node's packing ball; the greedy
  /// Voronoi split of the roots cannot rule these out.
  std::size_t cross_cluster_packing = 0;
  bool ok() const { return violations.empty(); }
};

/// Exhaustive structural check: net, partition, covering, packing (within
/// the node's own tree), rep inheritance, levels, and Rel against brute force.
ForestReport check_forest(const NetForest& forest, const PointCloud& cloud);

/// max over p in P_v of |rep_v - p|, per node. Never above covering_radius.
std::vector<double> measured_radii(const NetForest& forest, const PointCloud& cloud);

/// Covering and separation check of extract_net(level).
ForestReport check_extracted_net(const NetForest& forest, const PointCloud& cloud, int level);

void write_forest(std::ostream& out, const NetForest& forest);
NetForest read_forest(std::istream& in);
void save_forest(const std::string& path, const NetForest& forest);
NetForest load_forest(const std::string& path);

}  // namespace scalenet
