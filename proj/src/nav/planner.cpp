#include "raven/nav/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace raven {

void NavConfig::validate() const {
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
  if (!(arrival_radius >= 0.0)) throw std::invalid_argument("arrival_radius must be non-negative");
  if (!(retarget_radius >= 0.0)) throw std::invalid_argument("retarget_radius must be non-negative");
}

bool plannable(const SemanticVoxelMap& mem, GridIndex c, const NavConfig& cfg) {
  if (!mem.bounds().contains(c)) return false;
  switch (mem.at(c)) {
    case Occupancy::Free: return true;
    case Occupancy::Unknown: return cfg.unknown_traversable;
    case Occupancy::Occupied: return false;
  }
  return false;
}

std::optional<GridIndex> retarget_cell(const SemanticVoxelMap& mem, const Vec3& goal, double radius,
                                       const NavConfig& cfg) {
  const GridIndex g = cell_of(goal);
  const int r = static_cast<int>(std::ceil(radius)) + 1;
  std::optional<GridIndex> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int di = -r; di <= r; ++di)
    for (int dj = -r; dj <= r; ++dj)
      for (int dk = -r; dk <= r; ++dk) {
        const GridIndex c{g.i + di, g.j + dj, g.k + dk};
        if (!plannable(mem, c, cfg)) continue;
        const double d = (cell_center(c) - goal).norm();
        if (d > radius) continue;
        if (d < best_d || (d == best_d && c < *best)) {
          best = c;
          best_d = d;
        }
      }
  return best;
}

std::optional<PathResult> GridPlanner::plan(const SemanticVoxelMap& mem, const Vec3& start, const Vec3& goal,
                                            const NavConfig& cfg) {
  cfg.validate();
  expanded_ = 0;
  const GridBounds& b = mem.bounds();
  const GridIndex s = cell_of(start);
  if (!b.contains(s) || mem.is_occupied(s)) return std::nullopt;

  PathResult result;
  GridIndex t = cell_of(goal);
  if (!plannable(mem, t, cfg) && t != s) {
    const auto alt = retarget_cell(mem, goal, cfg.retarget_radius, cfg);
    if (!alt) return std::nullopt;
    t = *alt;
    result.retargeted = true;
  }
  result.goal_cell = t;
  if (t == s) return result;

  const std::size_t n = b.size();
  if (g_.size() != n) {
    g_.assign(n, 0.0);
    parent_.assign(n, -1);
    stamp_.assign(n, 0);
    closed_.assign(n, 0);
    epoch_ = 0;
  }
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0u);
    epoch_ = 1;
  }

  // lexicographic key so that equal-f ties resolve by (i, j, k)
  auto lex_key = [&](GridIndex c) { return (std::int64_t(c.i) * b.ny + c.j) * b.nz + c.k; };
  const Vec3 tc = cell_center(t);
  auto h = [&](GridIndex c) { return (cell_center(c) - tc).norm(); };

  // min-heap of (f, lex key, linear idx)
  auto& open = open_;
  open.clear();
  auto push = [&](double f, std::int64_t key, std::int64_t idx) {
    open.emplace_back(f, key, idx);
    std::push_heap(open.begin(), open.end(), std::greater<>());
  };
  const std::int64_t si = b.linear(s), ti = b.linear(t);
  stamp_[si] = epoch_;
  g_[si] = 0.0;
  parent_[si] = -1;
  closed_[si] = 0;
  push(h(s), lex_key(s), si);

  static const std::array<double, 4> kStepCost = {0.0, 1.0, std::sqrt(2.0), std::sqrt(3.0)};
  bool found = false;
  while (!open.empty()) {
    std::pop_heap(open.begin(), open.end(), std::greater<>());
    const auto [f, key, idx] = open.back();
    open.pop_back();
    if (closed_[idx]) continue;
    closed_[idx] = 1;
    ++expanded_;
    if (idx == ti) {
      found = true;
      break;
    }
    const GridIndex c = b.unlinear(idx);
    const double gc = g_[idx];
    for (const GridIndex& d : kAllNeighbors) {
      const GridIndex nb = c + d;
      if (!plannable(mem, nb, cfg)) continue;
      const std::int64_t ni = b.linear(nb);
      const double ng = gc + kStepCost[std::abs(d.i) + std::abs(d.j) + std::abs(d.k)];
      if (stamp_[ni] == epoch_) {
        if (closed_[ni] || ng >= g_[ni]) continue;
      } else {
        stamp_[ni] = epoch_;
        closed_[ni] = 0;
      }
      g_[ni] = ng;
      parent_[ni] = idx;
      push(ng + h(nb), lex_key(nb), ni);
    }
  }
  if (!found) return std::nullopt;

  result.cost = g_[ti];
  for (std::int64_t idx = ti; idx != si; idx = parent_[idx]) result.waypoints.push_back(cell_center(b.unlinear(idx)));
  std::reverse(result.waypoints.begin(), result.waypoints.end());
  return result;
}

std::optional<PathResult> plan_path(const SemanticVoxelMap& mem, const Vec3& start, const Vec3& goal,
                                    const NavConfig& cfg) {
  GridPlanner planner;
  return planner.plan(mem, start, goal, cfg);
}

PathFollower::PathFollower(PathResult path, NavConfig cfg) : path_(std::move(path)), cfg_(cfg) {
  cfg_.validate();
}

bool PathFollower::blocked(const SemanticVoxelMap& mem) const {
  for (std::size_t idx = next_; idx < path_.waypoints.size(); ++idx)
    if (mem.is_occupied(cell_of(path_.waypoints[idx]))) return true;
  return false;
}

bool PathFollower::arrived(const Pose& pose) const {
  if (done()) return true;
  return (pose.position - path_.waypoints.back()).norm() < cfg_.arrival_radius;
}

AdvanceResult PathFollower::advance(Pose& pose, const SemanticVoxelMap& mem,
                                    const std::function<void(const Pose&)>& before_step) {
  AdvanceResult res;
  if (arrived(pose)) {
    res.arrived = true;
    return res;
  }
  credit_ += cfg_.speed;
  while (credit_ >= 1.0 - 1e-12 && !done()) {
    if (before_step) before_step(pose);
    if (blocked(mem)) {
      res.replan = true;
      credit_ = 0.0;
      return res;
    }
    const Vec3 next = path_.waypoints[next_++];
    const Vec3 motion = next - pose.position;
    // a purely vertical move keeps the previous bearing so the camera does not snap
    if (std::hypot(motion.x(), motion.y()) > 1e-12) pose.heading = motion.normalized();
    pose.position = next;
    credit_ -= 1.0;
    ++res.steps;
    if (arrived(pose)) break;
  }
  if (arrived(pose)) {
    res.arrived = true;
    credit_ = 0.0;
  }
  return res;
}

}  // namespace raven
