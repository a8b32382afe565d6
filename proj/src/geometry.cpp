#include "scalenet/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "scalenet/errors.hpp"
#include "scalenet/random.hpp"
#include "scalenet/text.hpp"

namespace scalenet {

namespace {

constexpr double kRelTol = 1e-9;

bool within(double d, double r) { return d <= r * (1.0 + kRelTol) + 1e-300; }

}  // namespace

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw InputError("point dimension must be positive");
  if (coords_.empty()) throw InputError("point cloud must contain at least one point");
  if (coords_.size() % dim_ != 0) throw InputError("coordinate count is not a multiple of dim");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw InputError("non-finite coordinate");
  }
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InputError("point cloud must contain at least one point");
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw InputError("inconsistent point dimensions");
    coords.insert(coords.end(), row.begin(), row.end());
  }
  return PointCloud(dim, std::move(coords));
}

PointCloud PointCloud::subset(std::span<const PointId> ids) const {
  std::vector<double> coords;
  coords.reserve(ids.size() * dim_);
  for (PointId id : ids) {
    if (id >= size()) throw InputError("subset index out of range");
    auto p = (*this)[id];
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointCloud(dim_, std::move(coords));
}

bool Ball::contains(PointView p, double rel_tol) const {
  double d = distance(PointView(center), p);
  return d <= radius * (1.0 + rel_tol) + 1e-12;
}

double squared_distance(PointView p, PointView q) {
  if (p.size() != q.size()) throw InputError("dimension mismatch in distance");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double diff = p[i] - q[i];
    s += diff * diff;
  }
  return s;
}

double distance(PointView p, PointView q) { return std::sqrt(squared_distance(p, q)); }

std::vector<PointId> brute_near_neighbours(const PointCloud& cloud, PointId q, double r) {
  if (q >= cloud.size()) throw InputError("query index out of range");
  if (!(r >= 0.0)) throw InputError("radius must be nonnegative");
  std::vector<PointId> out;
  auto center = cloud[q];
  for (PointId i = 0; i < cloud.size(); ++i) {
    if (distance(center, cloud[i]) <= r) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimum enclosing ball

namespace {

// Centre of the smallest sphere through the given points inside their affine
// hull; nullopt when the points are affinely dependent.
std::optional<Eigen::VectorXd> circumcenter(const std::vector<const std::vector<double>*>& support) {
  const std::size_t dim = support.front()->size();
  Eigen::Map<const Eigen::VectorXd> origin(support.front()->data(), dim);
  const std::size_t m = support.size() - 1;
  if (m == 0) return Eigen::VectorXd(origin);
  Eigen::MatrixXd dirs(dim, m);
  for (std::size_t i = 0; i < m; ++i) {
    dirs.col(i) = Eigen::Map<const Eigen::VectorXd>(support[i + 1]->data(), dim) - origin;
  }
  Eigen::MatrixXd gram = dirs.transpose() * dirs;
  Eigen::VectorXd rhs = 0.5 * gram.diagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-12);
  if (lu.rank() < static_cast<Eigen::Index>(m)) return std::nullopt;
  Eigen::VectorXd lambda = lu.solve(rhs);
  return Eigen::VectorXd(origin + dirs * lambda);
}

}  // namespace

Ball exact_meb(std::span<const std::vector<double>> points) {
  if (points.empty()) throw InputError("minimum enclosing ball of an empty set");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw InputError("dimension mismatch in exact_meb");
  }
  const std::size_t m = points.size();
  const std::size_t max_support = std::min(m, dim + 1);

  Ball best;
  best.radius = std::numeric_limits<double>::infinity();

  auto farthest = [&](const Eigen::VectorXd& c) {
    double r = 0.0;
    for (const auto& p : points) {
      r = std::max(r, (Eigen::Map<const Eigen::VectorXd>(p.data(), dim) - c).norm());
    }
    return r;
  };

  std::vector<std::size_t> idx;
  std::vector<const std::vector<double>*> support;
  for (std::size_t size = 1; size <= max_support; ++size) {
    idx.resize(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      support.clear();
      for (std::size_t i : idx) support.push_back(&points[i]);
      if (auto center = circumcenter(support)) {
        Eigen::Map<const Eigen::VectorXd> p0(points[idx.front()].data(), dim);
        // The support radius is a lower bound on the enclosing radius.
        if ((*center - p0).norm() < best.radius) {
          double r = farthest(*center);
          if (r < best.radius) {
            best.radius = r;
            best.center.assign(center->data(), center->data() + dim);
          }
        }
      }
      // next combination
      std::size_t k = size;
      while (k > 0 && idx[k - 1] == m - size + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return best;
}

Ball exact_meb(const PointCloud& cloud, std::span<const PointId> ids) {
  std::vector<std::vector<double>> pts;
  pts.reserve(ids.size());
  for (PointId id : ids) {
    auto p = cloud[id];
    pts.emplace_back(p.begin(), p.end());
  }
  return exact_meb(pts);
}

// ---------------------------------------------------------------------------
// Restricted doubling constant

namespace {

// Smallest number of masks from `sets` whose union covers `target`.
int min_cover(std::uint32_t target, const std::vector<std::uint32_t>& sets) {
  int best = std::popcount(target);  // singletons always suffice when centres are in P
  auto search = [&](auto&& self, std::uint32_t uncovered, int used) -> void {
    if (uncovered == 0) {
      best = std::min(best, used);
      return;
    }
    if (used + 1 >= best) return;
    const std::uint32_t lowest = uncovered & (~uncovered + 1);
    for (std::uint32_t s : sets) {
      if (s & lowest) self(self, uncovered & ~s, used + 1);
    }
  };
  search(search, target, 0);
  return best;
}

}  // namespace

DoublingResult brute_restricted_doubling(const PointCloud& cloud, double t) {
  if (!(t > 0.0)) throw InputError("scale t must be positive");
  const std::size_t n = cloud.size();
  if (n > 20) throw InputError("brute_restricted_doubling supports at most 20 points");

  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = distance(cloud[i], cloud[j]);
  }

  std::uint64_t lambda = 1;
  std::vector<std::uint32_t> sets;
  for (std::size_t p = 0; p < n; ++p) {
    // The ball content only changes at distances from p; within an interval
    // the covering is hardest at its left end, so those radii suffice.
    std::vector<double> radii{t};
    for (std::size_t q = 0; q < n; ++q) {
      double d = dist[p * n + q];
      if (d > 0.0 && within(d, t)) radii.push_back(d);
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    for (double r : radii) {
      std::uint32_t ball = 0;
      for (std::size_t q = 0; q < n; ++q) {
        if (within(dist[p * n + q], r)) ball |= 1u << q;
      }
      sets.clear();
      for (std::size_t c = 0; c < n; ++c) {
        std::uint32_t s = 0;
        for (std::size_t q = 0; q < n; ++q) {
          if ((ball >> q & 1u) && within(dist[c * n + q], r / 2)) s |= 1u << q;
        }
        if (s != 0) sets.push_back(s);
      }
      std::sort(sets.begin(), sets.end());
      sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
      lambda = std::max<std::uint64_t>(lambda, static_cast<std::uint64_t>(min_cover(ball, sets)));
    }
  }

  DoublingResult result;
  result.lambda = lambda;
  result.dimension = lambda <= 1 ? 0 : static_cast<int>(std::bit_width(lambda - 1));
  return result;
}

double diameter(const PointCloud& cloud) {
  double d = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = i + 1; j < cloud.size(); ++j) d = std::max(d, distance(cloud[i], cloud[j]));
  }
  return d;
}

double closest_pair_distance(const PointCloud& cloud) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      double dij = distance(cloud[i], cloud[j]);
      if (dij > 0.0) d = std::min(d, dij);
    }
  }
  return std::isfinite(d) ? d : 0.0;
}

// ---------------------------------------------------------------------------
// Generators

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "affine") return GeneratorKind::kAffine;
  if (name == "sphere") return GeneratorKind::kSphere;
  if (name == "curve") return GeneratorKind::kCurve;
  if (name == "clustered") return GeneratorKind::kClustered;
  if (name == "uniform") return GeneratorKind::kUniform;
  throw InputError("unknown generator kind '" + name + "'");
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kAffine: return "affine";
    case GeneratorKind::kSphere: return "sphere";
    case GeneratorKind::kCurve: return "curve";
    case GeneratorKind::kClustered: return "clustered";
    case GeneratorKind::kUniform: return "uniform";
  }
  return "unknown";
}

namespace {

std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = normal(rng);
  return v;
}

double norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

void normalize(std::vector<double>& v) {
  double len = norm(v);
  for (double& x : v) x /= len;
}

std::vector<double> unit_vector(std::mt19937_64& rng, std::size_t dim) {
  while (true) {
    auto v = gaussian_vector(rng, dim);
    if (norm(v) > 1e-12) {
      normalize(v);
      return v;
    }
  }
}

PointCloud gen_affine(const GeneratorParams& p, std::mt19937_64& rng) {
  if (p.flat_dim == 0 || p.flat_dim > p.dim) throw InputError("affine: need 1 <= k <= d");
  std::vector<std::vector<double>> basis;
  while (basis.size() < p.flat_dim) {
    auto v = gaussian_vector(rng, p.dim);
    for (const auto& b : basis) {
      double dot = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
      for (std::size_t i = 0; i < p.dim; ++i) v[i] -= dot * b[i];
    }
    if (norm(v) < 1e-9) continue;
    normalize(v);
    basis.push_back(std::move(v));
  }
  auto origin = gaussian_vector(rng, p.dim);
  std::uniform_real_distribution<double> unif(0.0, p.extent);
  std::vector<double> coords;
  coords.reserve(p.n * p.dim);
  for (std::size_t i = 0; i < p.n; ++i) {
    std::vector<double> x = origin;
    for (const auto& b : basis) {
      double u = unif(rng);
      for (std::size_t j = 0; j < p.dim; ++j) x[j] += u * b[j];
    }
    coords.insert(coords.end(), x.begin(), x.end());
  }
  return PointCloud(p.dim, std::move(coords));
}

PointCloud gen_sphere(const GeneratorParams& p, std::mt19937_64& rng) {
  if (p.dim < 2) throw InputError("sphere: need d >= 2");
  if (!(p.radius > 0.0) || p.noise < 0.0 || p.noise >= p.radius) {
    throw InputError("sphere: need radius > 0 and 0 <= noise < radius");
  }
  std::uniform_real_distribution<double> jitter(-p.noise, p.noise);
  std::vector<double> coords;
  coords.reserve(p.n * p.dim);
  for (std::size_t i = 0; i < p.n; ++i) {
    auto u = unit_vector(rng, p.dim);
    double r = p.radius + (p.noise > 0.0 ? jitter(rng) : 0.0);
    for (double x : u) coords.push_back(r * x);
  }
  return PointCloud(p.dim, std::move(coords));
}

// Polyline through the unit ball whose direction wiggles a little at each
// vertex and turns back towards the origin when it would leave the ball.
// The n points sit at uniformly random arc-length positions along it.
PointCloud gen_curve(const GeneratorParams& p, std::mt19937_64& rng) {
  if (!(p.spacing > 0.0) || p.spacing >= 1.0) throw InputError("curve: need 0 < spacing < 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t segments = std::max<std::size_t>(p.n, 1);
  std::vector<std::vector<double>> vertices{std::vector<double>(p.dim, 0.0)};
  auto dir = unit_vector(rng, p.dim);
  for (std::size_t i = 0; i < segments; ++i) {
    const auto& pos = vertices.back();
    for (double& x : dir) x += 0.15 * normal(rng);
    normalize(dir);
    std::vector<double> next(p.dim);
    for (std::size_t j = 0; j < p.dim; ++j) next[j] = pos[j] + p.spacing * dir[j];
    if (norm(next) > 1.0) {
      for (std::size_t j = 0; j < p.dim; ++j) dir[j] = -pos[j] / std::max(norm(pos), 1e-12);
      for (double& x : dir) x += 0.15 * normal(rng);
      normalize(dir);
      for (std::size_t j = 0; j < p.dim; ++j) next[j] = pos[j] + p.spacing * dir[j];
    }
    vertices.push_back(std::move(next));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> arc(p.n);
  for (double& a : arc) a = unit(rng) * static_cast<double>(segments);
  std::sort(arc.begin(), arc.end());
  std::vector<double> coords;
  coords.reserve(p.n * p.dim);
  for (double a : arc) {
    auto seg = std::min(static_cast<std::size_t>(a), segments - 1);
    double f = a - static_cast<double>(seg);
    for (std::size_t j = 0; j < p.dim; ++j) {
      coords.push_back((1.0 - f) * vertices[seg][j] + f * vertices[seg + 1][j]);
    }
  }
  return PointCloud(p.dim, std::move(coords));
}

PointCloud gen_clustered(const GeneratorParams& p, std::mt19937_64& rng) {
  if (p.clusters == 0 || !(p.cluster_sigma > 0.0)) {
    throw InputError("clustered: need clusters >= 1 and sigma > 0");
  }
  const double separation = 8.0 * p.cluster_sigma * std::sqrt(static_cast<double>(p.dim));
  std::uniform_real_distribution<double> unif(0.0, p.extent);
  std::vector<std::vector<double>> centers;
  for (int attempt = 0; centers.size() < p.clusters; ++attempt) {
    if (attempt > 100000) throw InputError("clustered: cannot place well-separated centres");
    std::vector<double> c(p.dim);
    for (double& x : c) x = unif(rng);
    bool ok = std::all_of(centers.begin(), centers.end(), [&](const auto& o) {
      return distance(PointView(c), PointView(o)) >= separation;
    });
    if (ok) centers.push_back(std::move(c));
  }
  std::normal_distribution<double> normal(0.0, p.cluster_sigma);
  std::vector<double> coords;
  coords.reserve(p.n * p.dim);
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto& c = centers[i % p.clusters];
    for (std::size_t j = 0; j < p.dim; ++j) coords.push_back(c[j] + normal(rng));
  }
  return PointCloud(p.dim, std::move(coords));
}

PointCloud gen_uniform(const GeneratorParams& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, p.extent);
  std::vector<double> coords(p.n * p.dim);
  for (double& x : coords) x = unif(rng);
  return PointCloud(p.dim, std::move(coords));
}

}  // namespace

PointCloud generate(GeneratorKind kind, const GeneratorParams& params) {
  if (params.n == 0) throw InputError("generator: n must be positive");
  if (params.dim == 0) throw InputError("generator: dimension must be positive");
  if (!(params.extent > 0.0)) throw InputError("generator: extent must be positive");
  auto rng = SeedTree(params.seed).child(to_string(kind)).engine();
  switch (kind) {
    case GeneratorKind::kAffine: return gen_affine(params, rng);
    case GeneratorKind::kSphere: return gen_sphere(params, rng);
    case GeneratorKind::kCurve: return gen_curve(params, rng);
    case GeneratorKind::kClustered: return gen_clustered(params, rng);
    case GeneratorKind::kUniform: return gen_uniform(params, rng);
  }
  throw InputError("unknown generator kind");
}

// ---------------------------------------------------------------------------
// Point files

void write_points(std::ostream& out, const PointCloud& cloud) {
  out << "# dim=" << cloud.dim() << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out << ' ';
      out << format_real(p[j]);
    }
    out << '\n';
  }
}

PointCloud read_points(std::istream& in) {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line_no == 1) {
        auto value = find_field(std::string_view(line).substr(1), "dim");
        if (!value) {
          std::string_view rest = std::string_view(line).substr(1);
          while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
          if (rest.substr(0, 4) == "dim=") value = rest.substr(4);
        }
        if (value) dim = static_cast<std::size_t>(parse_int(*value));
      }
      continue;
    }
    std::size_t count = 0;
    for (std::string_view tok : split(line, ' ')) {
      if (tok.empty()) continue;
      coords.push_back(parse_real(tok));
      ++count;
    }
    if (dim == 0) dim = count;
    if (count != dim) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                       " coordinates, got " + std::to_string(count));
    }
  }
  return PointCloud(dim, std::move(coords));
}

void save_points(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_points(out, cloud);
}

PointCloud load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_points(in);
}

}  // namespace scalenet
