#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scalenet/netforest.hpp"

namespace scalenet {

struct WsPair {
  NodeId u = 0;
  NodeId v = 0;  // u <= v
  auto operator<=>(const WsPair&) const = default;
};

struct Wspd {
  std::vector<WsPair> pairs;  // sorted, unique
  double epsilon = 0.0;
  double t = 0.0;
};

/// 2 * max(radii[u], radii[v]) <= eps * |rep_u - rep_v|, with radii from
/// measured_radii (each at least half the node's diameter).
bool well_separated(const NetForest& forest, const PointCloud& cloud, std::span<const double> radii,
                    NodeId u, NodeId v, double epsilon);

/// t-restricted epsilon-WSPD from every related root pair. The forest must
/// have been built at scale t. Throws InputError unless 0 < epsilon < 1.
Wspd gen_wspd(const NetForest& forest, const PointCloud& cloud, double epsilon, double t);

struct WspdReport {
  std::size_t separation_failures = 0;  // pairs failing exact-diameter separation
  std::size_t coverage_failures = 0;    // point pairs within the radius left uncovered
  std::size_t required_pairs = 0;
  std::vector<std::string> examples;    // first few failures, human readable
  bool ok() const { return separation_failures == 0 && coverage_failures == 0; }
};

/// Exhaustive check with exact diameters and all O(n^2) point pairs. Point
/// pairs at distance <= radius must be covered; radius defaults to wspd.t.
WspdReport verify_wspd(const PointCloud& cloud, const NetForest& forest, const Wspd& wspd,
                       double radius = -1.0);

/// Exact diameter of P_v.
double node_diameter(const NetForest& forest, const PointCloud& cloud, NodeId v);

void write_wspd(std::ostream& out, const Wspd& wspd);
Wspd read_wspd(std::istream& in);

}  // namespace scalenet
