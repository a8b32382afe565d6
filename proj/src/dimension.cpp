#include "scalenet/dimension.hpp"

#include <algorithm>
#include <cmath>

#include "scalenet/errors.hpp"

namespace scalenet {

DimEstimate estimate_dim(const NetForest& forest) {
  if (forest.nodes.empty()) throw InputError("estimate_dim: empty forest");
  DimEstimate e;
  e.t = forest.t;
  for (const NetNode& v : forest.nodes) {
    e.max_out_degree = std::max(e.max_out_degree, v.children.size());
    e.max_rel_size = std::max(e.max_rel_size, v.rel.size());
  }
  e.estimate = std::log2(static_cast<double>(e.max_out_degree));
  return e;
}

}  // namespace scalenet
