#include "scalenet/cech.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <functional>
#include <set>

#include "scalenet/errors.hpp"
#include "scalenet/text.hpp"

namespace scalenet {

int coarsening_level(double alpha, double epsilon) {
  if (!(alpha > 0) || !(epsilon > 0)) throw InputError("coarsening_level: alpha and epsilon must be positive");
  return root_level(epsilon * alpha / 7.0);
}

NodeId vcell(const NetForest& forest, PointId p, int h) { return cell_of(forest, p, h); }

std::vector<double> default_grid(const PointCloud& cloud, double epsilon, double t) {
  if (!(epsilon > 0) || !(t > 0)) throw InputError("default_grid: epsilon and t must be positive");
  double closest = 0.0;
  for (PointId i = 0; i < cloud.size(); ++i) {
    for (PointId j = i + 1; j < cloud.size(); ++j) {
      double d = distance(cloud[i], cloud[j]);
      if (d > 0 && (closest == 0 || d < closest)) closest = d;
    }
  }
  std::vector<double> grid;
  if (closest > 0) {
    for (double a = closest / 2; a <= t; a *= 1.0 + epsilon / 7.0) grid.push_back(a);
  }
  if (grid.empty()) grid.push_back(t);
  return grid;
}

namespace {

// Level-h cells inside v: v's own cell if v already lies below h, else the
// descendants whose level range contains h.
void cells_inside(const NetForest& f, NodeId v, int h, std::vector<NodeId>& out) {
  const NetNode& node = f.node(v);
  if (node.is_leaf() || node.level < h) {
    out.push_back(vcell(f, node.rep, h));
    return;
  }
  for (NodeId c : node.children) cells_inside(f, c, h, out);
}

class SliceBuilder {
 public:
  SliceBuilder(const NetForest& f, const PointCloud& cloud, double theta, double delta)
      : f_(f), cloud_(cloud), theta_(theta), delta_(delta) {}

  void add_tuple(const WsTuple& g, int h) {
    choices_.clear();
    for (NodeId v : g.nodes) {
      std::vector<NodeId> cells;
      cells_inside(f_, v, h, cells);
      std::vector<PointId> reps;
      for (NodeId c : cells) reps.push_back(f_.node(c).rep);
      std::sort(reps.begin(), reps.end());
      reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
      choices_.push_back(std::move(reps));
    }
    picked_.clear();
    search(0);
  }

  std::set<std::vector<PointId>>& accepted() { return accepted_; }

 private:
  void search(std::size_t pos) {
    if (pos == choices_.size()) {
      std::vector<PointId> s = picked_;
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      if (!tested_.insert(s).second) return;
      if (approx_meb(cloud_, s, delta_).radius <= theta_) accepted_.insert(std::move(s));
      return;
    }
    for (PointId r : choices_[pos]) {
      bool close = true;
      for (PointId q : picked_) {
        if (distance(cloud_[r], cloud_[q]) > 2 * theta_) {
          close = false;
          break;
        }
      }
      if (!close) continue;
      picked_.push_back(r);
      search(pos + 1);
      picked_.pop_back();
    }
  }

  const NetForest& f_;
  const PointCloud& cloud_;
  double theta_;
  double delta_;
  std::vector<std::vector<PointId>> choices_;
  std::vector<PointId> picked_;
  std::set<std::vector<PointId>> tested_;
  std::set<std::vector<PointId>> accepted_;
};

void close_under_faces(std::set<std::vector<PointId>>& simplices) {
  std::vector<std::vector<PointId>> todo(simplices.begin(), simplices.end());
  while (!todo.empty()) {
    std::vector<PointId> s = std::move(todo.back());
    todo.pop_back();
    if (s.size() < 2) continue;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      std::vector<PointId> face;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i != drop) face.push_back(s[i]);
      }
      if (simplices.insert(face).second) todo.push_back(std::move(face));
    }
  }
}

}  // namespace

FiltrationOutput build_filtration(const NetForest& forest, const PointCloud& cloud, const Wssd& wssd,
                                  const std::vector<double>& grid) {
  if (forest.point_count != cloud.size()) throw InputError("build_filtration: forest and cloud differ in size");
  if (forest.t != 2 * wssd.t) throw InputError("build_filtration: forest must be built at twice the WSSD scale");
  if (grid.empty()) throw InputError("build_filtration: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || grid[i] > wssd.t) throw InputError("build_filtration: grid values must lie in (0, t]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InputError("build_filtration: grid must be strictly increasing");
  }

  const double eps = wssd.epsilon;
  FiltrationOutput out;
  out.epsilon = eps;
  out.t = wssd.t;
  out.k = wssd.k;
  for (double alpha : grid) {
    FiltrationSlice slice;
    slice.alpha = alpha;
    slice.h = coarsening_level(alpha, eps);
    if (slice.h >= forest.root_level) throw StateError("build_filtration: coarsening level reaches the roots");
    const double theta = (1.0 + eps / 2.0) * alpha;

    slice.vertex_map.resize(cloud.size());
    std::set<std::vector<PointId>> simplices;
    for (PointId p = 0; p < cloud.size(); ++p) {
      slice.vertex_map[p] = forest.node(vcell(forest, p, slice.h)).rep;
      simplices.insert({slice.vertex_map[p]});
    }

    SliceBuilder builder(forest, cloud, theta, eps / 14.0);
    for (const auto& tier : wssd.tiers) {
      for (const WsTuple& g : tier) {
        if (g.lower_bound > theta) continue;
        builder.add_tuple(g, slice.h);
      }
    }
    simplices.merge(builder.accepted());
    close_under_faces(simplices);
    slice.simplices.assign(simplices.begin(), simplices.end());
    out.slices.push_back(std::move(slice));
  }
  return out;
}

namespace {

void for_each_subset(std::size_t n, std::size_t max_size, std::vector<PointId>& cur, PointId from,
                     const std::function<void(const std::vector<PointId>&)>& fn) {
  if (!cur.empty()) fn(cur);
  if (cur.size() == max_size) return;
  for (PointId p = from; p < n; ++p) {
    cur.push_back(p);
    for_each_subset(n, max_size, cur, p + 1, fn);
    cur.pop_back();
  }
}

std::string show(const std::vector<PointId>& s) {
  std::string text = "{";
  for (std::size_t i = 0; i < s.size(); ++i) text += (i ? "," : "") + std::to_string(s[i]);
  return text + "}";
}

}  // namespace

SandwichReport verify_sandwich(const PointCloud& cloud, const FiltrationOutput& output) {
  SandwichReport report;
  auto note = [&](std::string msg) {
    if (report.examples.size() < 20) report.examples.push_back(std::move(msg));
  };

  // Exact MEB radius of every subset of up to k + 1 distinct points.
  std::vector<std::pair<std::vector<PointId>, double>> subsets;
  std::vector<PointId> cur;
  for_each_subset(cloud.size(), static_cast<std::size_t>(output.k) + 1, cur, 0,
                  [&](const std::vector<PointId>& s) { subsets.emplace_back(s, exact_meb(cloud, s).radius); });

  for (const FiltrationSlice& slice : output.slices) {
    const double alpha = slice.alpha;
    std::set<std::vector<PointId>> present(slice.simplices.begin(), slice.simplices.end());
    std::set<PointId> image(slice.vertex_map.begin(), slice.vertex_map.end());

    for (const auto& [s, radius] : subsets) {
      if (radius > alpha * (1 + 1e-12)) continue;
      ++report.cech_simplices;
      std::vector<PointId> mapped;
      for (PointId p : s) mapped.push_back(slice.vertex_map.at(p));
      std::sort(mapped.begin(), mapped.end());
      mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
      if (!present.contains(mapped)) {
        ++report.lower_failures;
        note("alpha=" + format_real(alpha) + ": image of " + show(s) + " missing");
      }
    }

    for (const auto& s : slice.simplices) {
      for (PointId v : s) {
        if (!image.contains(v)) {
          ++report.vertex_failures;
          note("alpha=" + format_real(alpha) + ": vertex " + std::to_string(v) + " not a rep");
        }
      }
      double r = exact_meb(cloud, s).radius;
      if (r > (1 + output.epsilon) * alpha * (1 + 1e-9)) {
        ++report.upper_failures;
        note("alpha=" + format_real(alpha) + ": " + show(s) + " radius " + format_real(r));
      }
    }
  }
  return report;
}

void write_filtration(std::ostream& out, const FiltrationOutput& output) {
  out << "cechapprox v1 epsilon=" << format_real(output.epsilon) << " t=" << format_real(output.t)
      << " k=" << output.k << '\n';
  for (const FiltrationSlice& slice : output.slices) {
    out << "slice alpha=" << format_real(slice.alpha) << " h=" << slice.h << '\n';
    for (PointId p = 0; p < slice.vertex_map.size(); ++p) out << "vmap " << p << ' ' << slice.vertex_map[p] << '\n';
    for (const auto& s : slice.simplices) {
      out << "simplex " << s.size() - 1;
      for (PointId v : s) out << ' ' << v;
      out << '\n';
    }
  }
}

FiltrationOutput read_filtration(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("cechapprox v1")) {
    throw InputError("filtration: missing 'cechapprox v1' header");
  }
  FiltrationOutput out;
  out.epsilon = parse_real(require_field(line, "epsilon"));
  out.t = parse_real(require_field(line, "t"));
  out.k = static_cast<int>(parse_int(require_field(line, "k")));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tok = split(line, ' ');
    if (tok[0] == "slice") {
      FiltrationSlice s;
      s.alpha = parse_real(require_field(line, "alpha"));
      s.h = static_cast<int>(parse_int(require_field(line, "h")));
      out.slices.push_back(std::move(s));
      continue;
    }
    if (out.slices.empty()) throw InputError("filtration: '" + line + "' before any slice");
    FiltrationSlice& s = out.slices.back();
    if (tok[0] == "vmap" && tok.size() == 3) {
      if (parse_int(tok[1]) != static_cast<long long>(s.vertex_map.size())) {
        throw InputError("filtration: vmap lines out of order");
      }
      s.vertex_map.push_back(static_cast<PointId>(parse_int(tok[2])));
    } else if (tok[0] == "simplex" && tok.size() >= 3) {
      if (parse_int(tok[1]) + 3 != static_cast<long long>(tok.size())) {
        throw InputError("filtration: bad simplex arity in '" + line + "'");
      }
      std::vector<PointId> v;
      for (std::size_t i = 2; i < tok.size(); ++i) v.push_back(static_cast<PointId>(parse_int(tok[i])));
      s.simplices.push_back(std::move(v));
    } else {
      throw InputError("filtration: bad line '" + line + "'");
    }
  }
  return out;
}

}  // namespace scalenet
