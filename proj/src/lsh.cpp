#include "scalenet/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "scalenet/errors.hpp"
#include "scalenet/random.hpp"

namespace scalenet {

double collision_probability(double c, double w) {
  if (!(c >= 0.0) || !(w > 0.0)) throw InputError("collision_probability: need c >= 0, w > 0");
  if (c == 0.0) return 1.0;
  const double x = w / c;
  const double tail = 0.5 * std::erfc(x / std::numbers::sqrt2);  // Phi(-x)
  return 1.0 - 2.0 * tail -
         2.0 / (std::sqrt(2.0 * std::numbers::pi) * x) * (1.0 - std::exp(-0.5 * x * x));
}

std::size_t lsh_concatenation_length(std::size_t n, double p2) {
  if (!(p2 > 0.0 && p2 < 1.0)) throw InputError("p2 must lie in (0, 1)");
  double k = std::ceil(std::log(static_cast<double>(n)) / -std::log(p2));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

std::size_t lsh_table_count(std::size_t n, double rho, double delta) {
  const double nd = static_cast<double>(n);
  double l = std::ceil(2.0 * std::pow(nd, rho) * std::log(nd / std::sqrt(delta)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(l));
}

LshParams derive_params(std::size_t n, double r, double rho, double delta) {
  if (n < 2) throw InputError("derive_params: need n >= 2");
  if (!(r > 0.0)) throw InputError("derive_params: need r > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("derive_params: need 0 < rho < 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("derive_params: need 0 < delta < 1");

  const double ratio_far = 1.0 / rho;
  // log p1 / log p2 as a function of the bucket width in units of r.
  auto exponent = [&](double u) {
    return std::log(collision_probability(1.0, u)) / std::log(collision_probability(ratio_far, u));
  };

  constexpr int kGrid = 2000;
  const double lo = std::log(0.05), hi = std::log(200.0);
  int best = 0;
  double best_val = exponent(std::exp(lo));
  for (int i = 1; i <= kGrid; ++i) {
    double v = exponent(std::exp(lo + (hi - lo) * i / kGrid));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section refinement around the best grid cell.
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kGrid;
  double b = lo + (hi - lo) * std::min(best + 1, kGrid) / kGrid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    double c = b - g * (b - a), d = a + g * (b - a);
    if (exponent(std::exp(c)) < exponent(std::exp(d))) b = d; else a = c;
  }
  const double u = std::exp(0.5 * (a + b));
  if (exponent(u) > rho) {
    throw InputError("derive_params: rho=" + std::to_string(rho) +
                     " is below what any bucket width achieves");
  }

  LshParams p;
  p.n = n;
  p.r1 = r;
  p.r2 = r / rho;
  p.rho = rho;
  p.delta = delta;
  p.w = u * r;
  p.p1 = collision_probability(p.r1, p.w);
  p.p2 = collision_probability(p.r2, p.w);
  p.k = lsh_concatenation_length(n, p.p2);
  p.l = lsh_table_count(n, rho, delta);
  return p;
}

LshIndex LshIndex::build(const PointCloud& cloud, const LshParams& params, std::uint64_t seed) {
  if (params.k == 0 || params.l == 0 || !(params.w > 0.0)) {
    throw InputError("LshIndex::build: invalid parameters");
  }
  LshIndex index;
  index.cloud_ = cloud;
  index.params_ = params;
  index.seed_ = seed;

  const std::size_t n = cloud.size();
  const std::size_t dim = cloud.dim();
  const std::size_t k = params.k;
  const SeedTree root(seed);

  std::vector<double> directions(k * dim);
  std::vector<double> offsets(k);
  std::vector<std::int64_t> keys(n * k);
  std::vector<PointId> order(n);

  index.tables_.resize(params.l);
  for (std::size_t t = 0; t < params.l; ++t) {
    auto rng = root.child(t).engine();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, params.w);
    for (double& a : directions) a = normal(rng);
    for (double& b : offsets) b = unif(rng);

    for (std::size_t i = 0; i < n; ++i) {
      auto x = cloud[i];
      for (std::size_t j = 0; j < k; ++j) {
        const double* a = directions.data() + j * dim;
        double dot = offsets[j];
        for (std::size_t c = 0; c < dim; ++c) dot += a[c] * x[c];
        keys[i * k + j] = static_cast<std::int64_t>(std::floor(dot / params.w));
      }
    }

    // Buckets are runs of identical k-tuples after a lexicographic sort, so
    // grouping compares the full key and never merges distinct buckets.
    std::iota(order.begin(), order.end(), PointId{0});
    auto key_less = [&](PointId lhs, PointId rhs) {
      const auto* a = keys.data() + lhs * k;
      const auto* b = keys.data() + rhs * k;
      for (std::size_t j = 0; j < k; ++j) {
        if (a[j] != b[j]) return a[j] < b[j];
      }
      return lhs < rhs;
    };
    std::sort(order.begin(), order.end(), key_less);

    Table& table = index.tables_[t];
    table.order = order;
    table.bucket_of.assign(n, 0);
    table.start.clear();
    for (std::size_t pos = 0; pos < n; ++pos) {
      bool fresh = pos == 0 || !std::equal(keys.begin() + order[pos] * k,
                                           keys.begin() + (order[pos] + 1) * k,
                                           keys.begin() + order[pos - 1] * k);
      if (fresh) table.start.push_back(static_cast<std::uint32_t>(pos));
      table.bucket_of[order[pos]] = static_cast<std::uint32_t>(table.start.size() - 1);
    }
    table.start.push_back(static_cast<std::uint32_t>(n));
  }
  return index;
}

std::size_t LshIndex::bucket_count(std::size_t table) const {
  return tables_.at(table).start.size() - 1;
}

std::span<const PointId> LshIndex::bucket(std::size_t table, PointId p) const {
  const Table& t = tables_.at(table);
  std::uint32_t b = t.bucket_of.at(p);
  return std::span<const PointId>(t.order.data() + t.start[b], t.start[b + 1] - t.start[b]);
}

std::size_t LshIndex::total_entries() const {
  std::size_t total = 0;
  for (const Table& t : tables_) total += t.order.size();
  return total;
}

bool LshIndex::share_bucket(PointId a, PointId b) const {
  for (const Table& t : tables_) {
    if (t.bucket_of[a] == t.bucket_of[b]) return true;
  }
  return false;
}

QueryReport LshIndex::query(PointId q, double r) const {
  if (q >= cloud_.size()) throw InputError("LshIndex::query: point was not indexed");
  if (r != params_.r1) throw InputError("LshIndex::query: radius differs from the indexed r1");
  QueryReport report;
  std::vector<std::uint8_t> seen(cloud_.size(), 0);
  auto center = cloud_[q];
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    auto members = bucket(t, q);
    report.candidates_scanned += members.size();
    for (PointId p : members) {
      if (seen[p]) continue;
      seen[p] = 1;
      if (distance(center, cloud_[p]) <= r) report.neighbours.push_back(p);
    }
  }
  std::sort(report.neighbours.begin(), report.neighbours.end());
  return report;
}

}  // namespace scalenet
