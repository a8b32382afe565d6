#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace scalenet {

using PointId = std::uint32_t;
using PointView = std::span<const double>;

/// Finite point set in R^d. Points are addressed by their 0-based index.
class PointCloud {
 public:
  PointCloud() = default;

  /// Builds a cloud from row-major coordinates; throws InputError if the
  /// cloud is empty, the size is not a multiple of dim, or a coordinate is
  /// not finite.
  PointCloud(std::size_t dim, std::vector<double> coords);
  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return coords_.empty(); }

  PointView operator[](std::size_t i) const {
    return PointView(coords_.data() + i * dim_, dim_);
  }
  const std::vector<double>& coords() const { return coords_; }

  /// Cloud restricted to `ids`, in the given order.
  PointCloud subset(std::span<const PointId> ids) const;

  bool operator==(const PointCloud&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

struct Ball {
  std::vector<double> center;
  double radius = 0.0;

  bool contains(PointView p, double rel_tol = 1e-9) const;
};

/// Euclidean distance. Throws InputError on a dimension mismatch.
double distance(PointView p, PointView q);
double squared_distance(PointView p, PointView q);

/// Exact reference near-neighbour query: all i with |P[i] - P[q]| <= r,
/// including q itself, in ascending order.
std::vector<PointId> brute_near_neighbours(const PointCloud& cloud, PointId q, double r);

/// Minimum enclosing ball by exhaustive search over support sets of size
/// at most d + 1. Exponential; meant for oracle-scale inputs (about 20 points).
Ball exact_meb(std::span<const std::vector<double>> points);
Ball exact_meb(const PointCloud& cloud, std::span<const PointId> ids);

struct DoublingResult {
  std::uint64_t lambda = 1;  // restricted doubling constant
  int dimension = 0;         // ceil(log2 lambda)
};

/// Brute-force t-restricted doubling constant. Covering balls are discrete
/// balls centred at points of the cloud. Exact set cover over bitmasks, so
/// the cloud must have at most 20 points.
DoublingResult brute_restricted_doubling(const PointCloud& cloud, double t);

double diameter(const PointCloud& cloud);
/// Smallest positive pairwise distance, or 0 if all points coincide.
double closest_pair_distance(const PointCloud& cloud);

// ---------------------------------------------------------------------------
// Dataset generators

enum class GeneratorKind { kAffine, kSphere, kCurve, kClustered, kUniform };

GeneratorKind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorKind kind);

struct GeneratorParams {
  std::size_t n = 100;
  std::size_t dim = 3;
  std::size_t flat_dim = 2;   // affine: dimension k of the flat
  double radius = 1.0;        // sphere radius
  double noise = 0.0;         // sphere: radial noise bound
  double spacing = 0.05;      // curve: distance between consecutive vertices
  std::size_t clusters = 4;   // clustered: number of blobs
  double cluster_sigma = 0.05;
  double extent = 1.0;        // affine/uniform/clustered: side length of sampled region
  std::uint64_t seed = 0;
};

/// Deterministic given params.seed. Throws InputError on invalid params.
PointCloud generate(GeneratorKind kind, const GeneratorParams& params);

// ---------------------------------------------------------------------------
// Point file format: optional "# dim=<d>" header, then one point per line
// with coordinates separated by single spaces.

void write_points(std::ostream& out, const PointCloud& cloud);
PointCloud read_points(std::istream& in);
void save_points(const std::string& path, const PointCloud& cloud);
PointCloud load_points(const std::string& path);

}  // namespace scalenet
