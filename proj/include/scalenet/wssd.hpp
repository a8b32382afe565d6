#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "scalenet/netforest.hpp"

namespace scalenet {

/// Ball containing all points with radius at most (1 + delta) times the
/// optimum, by farthest-point steps from the first point. Deterministic.
/// Throws InputError on empty input or delta outside (0, 1/2].
Ball approx_meb(std::span<const std::vector<double>> points, double delta = 0.05);
Ball approx_meb(const PointCloud& cloud, std::span<const PointId> ids, double delta = 0.05);

struct WsTuple {
  std::vector<NodeId> nodes;  // ascending; a node may repeat
  /// Lower bound on the radius of any ball meeting every node.
  double lower_bound = 0.0;
  Ball meb_cache;  // approximate ball of the representatives
};

/// Tier j (1-based) holds tuples of j + 1 nodes.
struct Wssd {
  std::vector<std::vector<WsTuple>> tiers;
  double epsilon = 0.0;
  double t = 0.0;
  int k = 0;

  const std::vector<WsTuple>& tier(int j) const { return tiers.at(j - 1); }
};

/// t-restricted (epsilon, k)-WSSD. `forest` must be built at scale 2t.
/// Throws InputError unless 0 < epsilon <= 1 and k >= 1.
Wssd gen_wssd(const NetForest& forest, const PointCloud& cloud, double epsilon, int k, double t);

struct WssdReport {
  std::size_t simplices_checked = 0;
  std::size_t coverage_failures = 0;
  std::size_t tuples_checked = 0;
  std::size_t separation_failures = 0;
  std::size_t tuples_skipped = 0;  // too many transversals to check separation
  std::vector<std::string> examples;
  bool ok() const { return coverage_failures == 0 && separation_failures == 0; }
};

struct WssdCheckOptions {
  /// Also require multisets with at least two distinct points to be covered.
  bool degenerate = false;
  /// Skip the transversal separation check for tuples with more transversals.
  std::size_t max_transversals = 2'000'000;
};

/// Coverage of every simplex of up to k + 1 points with exact MEB radius
/// <= t, and for every tuple and transversal T: all node points lie in
/// (1 + epsilon) MEB(T).
WssdReport verify_wssd(const PointCloud& cloud, const NetForest& forest, const Wssd& wssd,
                       const WssdCheckOptions& options = {});

void write_wssd(std::ostream& out, const Wssd& wssd);
Wssd read_wssd(std::istream& in);

}  // namespace scalenet
