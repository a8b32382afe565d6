#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "scalenet/geometry.hpp"
#include "scalenet/lsh.hpp"

namespace scalenet {

/// Fixed-radius near-neighbour primitive over the cloud it was built on.
/// Returned indices refer to that cloud and always include the query point.
class NeighbourIndex {
 public:
  virtual ~NeighbourIndex() = default;
  virtual std::vector<PointId> neighbours(PointId q) const = 0;
  virtual double radius() const = 0;
};

class ExactNeighbourIndex final : public NeighbourIndex {
 public:
  ExactNeighbourIndex(PointCloud cloud, double r);
  std::vector<PointId> neighbours(PointId q) const override;
  double radius() const override { return r_; }

 private:
  PointCloud cloud_;
  double r_;
};

class LshNeighbourIndex final : public NeighbourIndex {
 public:
  explicit LshNeighbourIndex(LshIndex index) : index_(std::move(index)) {}
  std::vector<PointId> neighbours(PointId q) const override;
  double radius() const override { return index_.params().r1; }
  const LshIndex& index() const { return index_; }

 private:
  LshIndex index_;
};

/// Builds a primitive for (cloud, radius). `stream` distinguishes the
/// independent indices one pipeline needs (e.g. radius t and radius 7t).
using NeighbourFactory =
    std::function<std::unique_ptr<NeighbourIndex>(const PointCloud&, double, std::uint64_t stream)>;

NeighbourFactory exact_neighbour_factory();
/// LSH-backed factory; clouds with fewer than two points fall back to the
/// exact scan since the hashing parameters need n >= 2.
NeighbourFactory lsh_neighbour_factory(double rho, double delta, std::uint64_t seed);

}  // namespace scalenet
