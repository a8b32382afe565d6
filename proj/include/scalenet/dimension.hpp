#pragma once

#include "scalenet/netforest.hpp"

namespace scalenet {

struct DimEstimate {
  std::size_t max_out_degree = 1;  // x
  double estimate = 0.0;           // log2 x
  double t = 0.0;
  std::size_t max_rel_size = 0;    // diagnostic only
};

/// Largest child count over all nodes; log2 of it approximates the
/// t-restricted doubling dimension. Throws InputError on an empty forest.
DimEstimate estimate_dim(const NetForest& forest);

}  // namespace scalenet
