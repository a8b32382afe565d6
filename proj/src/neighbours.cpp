#include "scalenet/neighbours.hpp"

#include "scalenet/errors.hpp"
#include "scalenet/random.hpp"

namespace scalenet {

ExactNeighbourIndex::ExactNeighbourIndex(PointCloud cloud, double r)
    : cloud_(std::move(cloud)), r_(r) {
  if (!(r >= 0.0)) throw InputError("near-neighbour radius must be nonnegative");
}

std::vector<PointId> ExactNeighbourIndex::neighbours(PointId q) const {
  return brute_near_neighbours(cloud_, q, r_);
}

std::vector<PointId> LshNeighbourIndex::neighbours(PointId q) const {
  return index_.query(q).neighbours;
}

NeighbourFactory exact_neighbour_factory() {
  return [](const PointCloud& cloud, double r, std::uint64_t) -> std::unique_ptr<NeighbourIndex> {
    return std::make_unique<ExactNeighbourIndex>(cloud, r);
  };
}

NeighbourFactory lsh_neighbour_factory(double rho, double delta, std::uint64_t seed) {
  return [rho, delta, seed](const PointCloud& cloud, double r,
                            std::uint64_t stream) -> std::unique_ptr<NeighbourIndex> {
    if (cloud.size() < 2) return std::make_unique<ExactNeighbourIndex>(cloud, r);
    LshParams params = derive_params(cloud.size(), r, rho, delta);
    std::uint64_t table_seed = SeedTree(seed).child("lsh").child(stream).value();
    return std::make_unique<LshNeighbourIndex>(LshIndex::build(cloud, params, table_seed));
  };
}

}  // namespace scalenet
