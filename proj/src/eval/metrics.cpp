#include "raven/eval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace raven {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Multi-source Dijkstra; returns, per target mask bit, the distance at which it
/// was first settled. Stops once every bit is settled.
std::vector<double> settle(const WorldModel& world, const std::vector<GridIndex>& sources,
                           const std::vector<std::uint8_t>& region_bits, int n_bits) {
  const GridBounds& b = world.bounds();
  std::vector<double> dist(b.size(), kInf);
  std::vector<double> out(std::size_t(n_bits), kInf);
  using Entry = std::pair<double, std::int64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  for (const GridIndex& s : sources) {
    if (!b.contains(s) || world.occupied(s)) continue;
    const auto idx = b.linear(s);
    if (dist[idx] > 0.0) {
      dist[idx] = 0.0;
      open.emplace(0.0, idx);
    }
  }
  static const std::array<double, 4> kStep = {0.0, 1.0, std::sqrt(2.0), std::sqrt(3.0)};
  std::uint8_t pending = std::uint8_t((1u << n_bits) - 1u);
  while (!open.empty() && pending) {
    const auto [d, idx] = open.top();
    open.pop();
    if (d > dist[idx]) continue;
    if (const std::uint8_t hit = region_bits[idx] & pending) {
      for (int bit = 0; bit < n_bits; ++bit)
        if (hit & (1u << bit)) out[bit] = d;
      pending &= std::uint8_t(~hit);
    }
    const GridIndex c = b.unlinear(idx);
    for (const GridIndex& o : kAllNeighbors) {
      const GridIndex n = c + o;
      if (!b.contains(n) || world.occupied(n)) continue;
      const auto ni = b.linear(n);
      const double nd = d + kStep[std::abs(o.i) + std::abs(o.j) + std::abs(o.k)];
      if (nd < dist[ni]) {
        dist[ni] = nd;
        open.emplace(nd, ni);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<GridIndex> dilated_region(const WorldModel& world, const SemanticObject& obj, double r_succ) {
  std::vector<GridIndex> out;
  const int r = static_cast<int>(std::ceil(r_succ)) + 1;
  for (int k = obj.min.k - r; k <= obj.max.k + r; ++k)
    for (int j = obj.min.j - r; j <= obj.max.j + r; ++j)
      for (int i = obj.min.i - r; i <= obj.max.i + r; ++i) {
        const GridIndex c{i, j, k};
        if (!world.bounds().contains(c) || world.occupied(c)) continue;
        if (distance_to_box(cell_center(c), obj.lo(), obj.hi()) <= r_succ) out.push_back(c);
      }
  return out;
}

GoalDistances goal_distances(const WorldModel& world, const Vec3& start,
                             const std::vector<const SemanticObject*>& goals, double r_succ) {
  if (goals.size() > 8) throw std::invalid_argument("goal_distances: at most 8 goals");
  const int n = int(goals.size());
  GoalDistances out;
  std::vector<std::vector<GridIndex>> regions;
  std::vector<std::uint8_t> bits(world.bounds().size(), 0);
  for (int g = 0; g < n; ++g) {
    out.goal_ids.push_back(goals[g]->id);
    regions.push_back(dilated_region(world, *goals[g], r_succ));
    for (const GridIndex& c : regions.back()) bits[world.bounds().linear(c)] |= std::uint8_t(1u << g);
  }
  if (n == 0) return out;
  out.from_start = settle(world, {cell_of(start)}, bits, n);
  out.between.assign(std::size_t(n), std::vector<double>(std::size_t(n), kInf));
  for (int g = 0; g < n; ++g) {
    out.between[g] = settle(world, regions[g], bits, n);
    if (!regions[g].empty()) out.between[g][g] = 0.0;
  }
  return out;
}

double optimal_visit_length(const GoalDistances& d, int k) {
  const int n = int(d.goal_ids.size());
  if (k < 0 || k > n) throw std::invalid_argument("optimal_visit_length: K out of range");
  if (k == 0) return 0.0;
  double best = kInf;
  std::vector<char> used(std::size_t(n), 0);
  std::function<void(int, int, double)> dfs = [&](int depth, int last, double acc) {
    if (acc >= best) return;
    if (depth == k) {
      best = acc;
      return;
    }
    for (int g = 0; g < n; ++g) {
      if (used[g]) continue;
      const double leg = last < 0 ? d.from_start[g] : d.between[last][g];
      if (leg == kInf) continue;
      used[g] = 1;
      dfs(depth + 1, g, acc + leg);
      used[g] = 0;
    }
  };
  dfs(0, -1, 0.0);
  if (best == kInf) throw std::runtime_error("optimal_visit_length: no reachable ordering of " + std::to_string(k) + " goals");
  return best;
}

double optimal_visit_length(const WorldModel& world, const Vec3& start,
                            const std::vector<const SemanticObject*>& goals, int k, double r_succ) {
  return optimal_visit_length(goal_distances(world, start, goals, r_succ), k);
}

double progress(const EpisodeResult& result, const Scenario& scenario) {
  const auto goals = goal_instances(scenario.task, scenario.world);
  if (goals.empty()) throw std::invalid_argument("scenario has no goal instances");
  return double(result.reach_events.size()) / double(goals.size());
}

EpisodeMetrics compute_metrics(const EpisodeResult& result, const Scenario& scenario,
                               const GoalDistances* distances) {
  EpisodeMetrics m;
  const auto goals = goal_instances(scenario.task, scenario.world);
  if (goals.empty()) throw std::invalid_argument("scenario has no goal instances");
  m.total = int(goals.size());
  m.reached = int(result.reach_events.size());
  m.progress = double(m.reached) / double(m.total);
  if (m.reached == 0) return m;
  GoalDistances local;
  if (!distances) {
    local = goal_distances(scenario.world, scenario.start.position, goals, scenario.r_succ);
    distances = &local;
  }
  m.optimal_length = optimal_visit_length(*distances, m.reached);
  m.path_at_kth = result.reach_events.back().path_length;
  double ratio = 1.0;
  if (m.path_at_kth > 0.0) ratio = std::min(1.0, m.optimal_length / m.path_at_kth);
  m.ppl = ratio * m.progress;
  return m;
}

double ppl(const EpisodeResult& result, const Scenario& scenario, const GoalDistances* distances) {
  return compute_metrics(result, scenario, distances).ppl;
}

}  // namespace raven
