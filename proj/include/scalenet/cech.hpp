#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scalenet/wssd.hpp"

namespace scalenet {

/// Largest h with 2.2 tau^h <= (epsilon / 7) alpha.
int coarsening_level(double alpha, double epsilon);

/// The cell representing p at level h. Same rule as cell_of.
NodeId vcell(const NetForest& forest, PointId p, int h);

struct FiltrationSlice {
  double alpha = 0.0;
  int h = 0;
  std::vector<PointId> vertex_map;  // point -> rep of its level-h cell
  /// Sorted vertex lists over reps, closed under faces, in lexicographic order.
  std::vector<std::vector<PointId>> simplices;
};

struct FiltrationOutput {
  std::vector<FiltrationSlice> slices;  // ascending alpha
  double epsilon = 0.0;
  double t = 0.0;
  int k = 0;
};

/// alpha_min (1 + epsilon/7)^i for i = 0, 1, ... while <= t, with alpha_min
/// half the smallest positive pairwise distance. Falls back to {t}.
std::vector<double> default_grid(const PointCloud& cloud, double epsilon, double t);

/// One slice per grid value from a WSSD built on `forest` (scale 2t).
/// Throws InputError if the grid is not strictly increasing inside (0, t]
/// or the forest does not match the WSSD.
FiltrationOutput build_filtration(const NetForest& forest, const PointCloud& cloud, const Wssd& wssd,
                                  const std::vector<double>& grid);

struct SandwichReport {
  std::size_t lower_failures = 0;   // Cech simplex whose image is missing
  std::size_t upper_failures = 0;   // simplex with MEB above (1 + epsilon) alpha
  std::size_t vertex_failures = 0;  // simplex vertex outside the vertex map image
  std::size_t cech_simplices = 0;
  std::vector<std::string> examples;
  bool ok() const { return lower_failures == 0 && upper_failures == 0 && vertex_failures == 0; }
};

/// Exhaustive check of both containments per slice, for subsets of up to
/// k + 1 points. Exponential in k; meant for about 30 points.
SandwichReport verify_sandwich(const PointCloud& cloud, const FiltrationOutput& output);

void write_filtration(std::ostream& out, const FiltrationOutput& output);
FiltrationOutput read_filtration(std::istream& in);

}  // namespace scalenet
