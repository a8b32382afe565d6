#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "scalenet/geometry.hpp"

namespace scalenet {

/// Parameters of the amplified p-stable scheme. r1 is the report radius,
/// r2 = r1 / rho the far radius; p1 and p2 are the single-hash collision
/// probabilities at those distances for bucket width w.
struct LshParams {
  std::size_t n = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  double rho = 0.5;
  double delta = 0.1;
  double w = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  std::size_t k = 1;  // hashes concatenated per table
  std::size_t l = 1;  // number of tables
};

/// Probability that two points at distance c share a bucket under one base
/// hash floor((a.x + b) / w) with Gaussian a and b uniform in [0, w).
double collision_probability(double c, double w);

/// k = ceil(-log_{p2} n) and l = ceil(2 n^rho ln(n / sqrt(delta))).
std::size_t lsh_concatenation_length(std::size_t n, double p2);
std::size_t lsh_table_count(std::size_t n, double rho, double delta);

/// Picks w minimising log p1 / log p2 at distance ratio 1/rho, then derives
/// k and l. Throws InputError when parameters are out of range or the
/// requested rho is not reachable by any bucket width.
LshParams derive_params(std::size_t n, double r, double rho, double delta);

struct QueryReport {
  std::vector<PointId> neighbours;     // ascending, deduplicated
  std::size_t candidates_scanned = 0;  // summed occupancy of the l buckets of q
};

/// All-near-neighbour index over a fixed point cloud. Immutable after build.
class LshIndex {
 public:
  static LshIndex build(const PointCloud& cloud, const LshParams& params, std::uint64_t seed);

  /// Neighbours of indexed point q within r (which must equal params().r1).
  QueryReport query(PointId q, double r) const;
  QueryReport query(PointId q) const { return query(q, params_.r1); }

  const LshParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return cloud_.size(); }
  const PointCloud& cloud() const { return cloud_; }

  std::size_t table_count() const { return tables_.size(); }
  std::size_t bucket_count(std::size_t table) const;
  std::span<const PointId> bucket(std::size_t table, PointId p) const;
  /// Total number of (point, table) entries; always n * l.
  std::size_t total_entries() const;
  bool share_bucket(PointId a, PointId b) const;

 private:
  struct Table {
    std::vector<PointId> order;          // points grouped by bucket
    std::vector<std::uint32_t> start;    // bucket b occupies order[start[b], start[b+1])
    std::vector<std::uint32_t> bucket_of;
  };

  PointCloud cloud_;
  LshParams params_;
  std::uint64_t seed_ = 0;
  std::vector<Table> tables_;
};

}  // namespace scalenet
