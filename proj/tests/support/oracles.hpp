// Independent reference implementations. Deliberately naive: std::set / std::map
// containers, full scans, exhaustive enumeration. Nothing here calls into the
// library code it is used to check.
#ifndef RAVEN_TESTS_ORACLES_HPP
#define RAVEN_TESTS_ORACLES_HPP

#include "raven/core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

namespace oracle {

using raven::GridIndex;
using raven::Vec3;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::vector<GridIndex> neighbors26(GridIndex c) {
  std::vector<GridIndex> out;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int d = -1; d <= 1; ++d)
        if (a || b || d) out.push_back({c.i + a, c.j + b, c.k + d});
  return out;
}

/// Connected components of a cell set under 26-adjacency, by repeated flood fill.
/// Each component is sorted; components are returned in order of their smallest cell.
inline std::vector<std::vector<GridIndex>> flood_fill_components(const std::set<GridIndex>& cells) {
  std::set<GridIndex> left = cells;
  std::vector<std::vector<GridIndex>> out;
  while (!left.empty()) {
    std::vector<GridIndex> comp;
    std::vector<GridIndex> stack{*left.begin()};
    left.erase(left.begin());
    while (!stack.empty()) {
      const GridIndex c = stack.back();
      stack.pop_back();
      comp.push_back(c);
      for (const GridIndex& n : neighbors26(c)) {
        auto it = left.find(n);
        if (it != left.end()) {
          left.erase(it);
          stack.push_back(n);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

/// Uniform-cost search over a predicate-defined grid with 26 moves and Euclidean
/// step lengths. Distances from every source (0 at each source) to every cell.
inline std::map<GridIndex, double> uniform_cost(const std::function<bool(GridIndex)>& passable,
                                                const std::vector<GridIndex>& sources) {
  std::map<GridIndex, double> dist;
  std::set<std::pair<double, GridIndex>> frontier;
  for (const GridIndex& s : sources) {
    if (!passable(s)) continue;
    dist[s] = 0.0;
    frontier.insert({0.0, s});
  }
  while (!frontier.empty()) {
    const auto [d, c] = *frontier.begin();
    frontier.erase(frontier.begin());
    for (const GridIndex& n : neighbors26(c)) {
      if (!passable(n)) continue;
      const int manhattan = std::abs(n.i - c.i) + std::abs(n.j - c.j) + std::abs(n.k - c.k);
      const double nd = d + std::sqrt(double(manhattan));
      auto it = dist.find(n);
      if (it != dist.end() && it->second <= nd) continue;
      if (it != dist.end()) frontier.erase({it->second, n});
      dist[n] = nd;
      frontier.insert({nd, n});
    }
  }
  return dist;
}

inline double min_over(const std::map<GridIndex, double>& dist, const std::vector<GridIndex>& cells) {
  double best = kInf;
  for (const GridIndex& c : cells) {
    auto it = dist.find(c);
    if (it != dist.end()) best = std::min(best, it->second);
  }
  return best;
}

/// Minimum over every ordering of every K-subset, enumerated as prefixes of all
/// permutations. legs[0][g+1] is start -> g, legs[a+1][b+1] is a -> b.
inline double best_visit_length(const std::vector<std::vector<double>>& legs, int k) {
  const int n = int(legs.size()) - 1;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double acc = 0.0;
    int at = -1;
    for (int step = 0; step < k; ++step) {
      acc += legs[std::size_t(at + 1)][std::size_t(perm[std::size_t(step)] + 1)];
      at = perm[std::size_t(step)];
    }
    best = std::min(best, acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Nearest-neighbor tour length for comparison with the optimum.
inline double greedy_visit_length(const std::vector<std::vector<double>>& legs, int k) {
  const int n = int(legs.size()) - 1;
  std::vector<char> used(std::size_t(n), 0);
  int at = -1;
  double acc = 0.0;
  for (int step = 0; step < k; ++step) {
    int pick = -1;
    for (int g = 0; g < n; ++g)
      if (!used[std::size_t(g)] &&
          (pick < 0 || legs[std::size_t(at + 1)][std::size_t(g + 1)] < legs[std::size_t(at + 1)][std::size_t(pick + 1)]))
        pick = g;
    acc += legs[std::size_t(at + 1)][std::size_t(pick + 1)];
    used[std::size_t(pick)] = 1;
    at = pick;
  }
  return acc;
}

/// Cells pierced by a ray, found by dense sampling along it. The sampling step is
/// small enough that only cells clipped over a sliver shorter than `step` can be
/// missed; callers compare on rays that avoid grazing corners.
inline std::vector<GridIndex> sampled_cells(const Vec3& origin, const Vec3& dir, double max_t, double step = 1e-3) {
  std::vector<GridIndex> out;
  for (double t = 0.0; t <= max_t; t += step) {
    const Vec3 p = origin + t * dir;
    const GridIndex c{int(std::floor(p.x())), int(std::floor(p.y())), int(std::floor(p.z()))};
    if (out.empty() || !(out.back() == c)) out.push_back(c);
  }
  return out;
}

/// Entry point of the segment origin -> target into the box [lo, hi], found by
/// bisection on the inside/outside predicate. Assumes origin outside, target inside.
inline Vec3 bisect_box_entry(const Vec3& origin, const Vec3& target, const Vec3& lo, const Vec3& hi) {
  auto inside = [&](const Vec3& p) {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y() && p.z() >= lo.z() &&
           p.z() <= hi.z();
  };
  double a = 0.0, b = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (inside(origin + m * (target - origin))) b = m;
    else a = m;
  }
  return origin + b * (target - origin);
}

/// Textbook O(n^2) DBSCAN. Border points join the first cluster that reaches
/// them; clusters are numbered by the input position of their seeding core point.
inline std::vector<int> dbscan(const std::vector<Vec3>& pts, double eps, int min_samples) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> nb(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if ((pts[a] - pts[b]).norm() <= eps) nb[a].push_back(b);
  std::vector<int> label(n, -2);  // -2 unvisited, -1 noise
  int next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != -2) continue;
    if (int(nb[p].size()) < min_samples) {
      label[p] = -1;
      continue;
    }
    const int c = next++;
    label[p] = c;
    std::vector<std::size_t> queue(nb[p].begin(), nb[p].end());
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t x = queue[q];
      if (label[x] == -1) label[x] = c;
      if (label[x] != -2) continue;
      label[x] = c;
      if (int(nb[x].size()) >= min_samples) queue.insert(queue.end(), nb[x].begin(), nb[x].end());
    }
  }
  return label;
}

}  // namespace oracle

#endif
