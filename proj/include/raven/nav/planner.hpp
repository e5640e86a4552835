#ifndef RAVEN_NAV_PLANNER_HPP
#define RAVEN_NAV_PLANNER_HPP

#include "raven/memory/voxel_map.hpp"

#include <functional>
#include <optional>
#include <tuple>
#include <vector>

namespace raven {

struct NavConfig {
  double speed = 1.0;  // cells per tick
  bool unknown_traversable = true;
  double arrival_radius = 1.0;
  double retarget_radius = 3.0;

  void validate() const;
};

struct PathResult {
  std::vector<Vec3> waypoints;  // cell centers after the start cell, ending at the goal cell
  double cost = 0.0;
  GridIndex goal_cell;
  bool retargeted = false;
};

/// Optimal 26-connected A* through memory. Returns nullopt when unreachable.
/// Keeps its search buffers between calls, so reuse one planner per episode.
class GridPlanner {
 public:
  std::optional<PathResult> plan(const SemanticVoxelMap& mem, const Vec3& start, const Vec3& goal,
                                 const NavConfig& cfg);

  /// Cells popped by the last search.
  std::size_t expanded() const { return expanded_; }

 private:
  std::vector<double> g_;
  std::vector<std::int64_t> parent_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint8_t> closed_;
  std::vector<std::tuple<double, std::int64_t, std::int64_t>> open_;  // heap storage, reused
  std::uint32_t epoch_ = 0;
  std::size_t expanded_ = 0;
};

std::optional<PathResult> plan_path(const SemanticVoxelMap& mem, const Vec3& start, const Vec3& goal,
                                    const NavConfig& cfg);

bool plannable(const SemanticVoxelMap& mem, GridIndex c, const NavConfig& cfg);

/// Nearest plannable cell whose center lies within `radius` of `goal`, lexicographic on ties.
std::optional<GridIndex> retarget_cell(const SemanticVoxelMap& mem, const Vec3& goal, double radius,
                                       const NavConfig& cfg);

struct AdvanceResult {
  bool arrived = false;
  bool replan = false;
  int steps = 0;
};

/// Walks a planned path cell by cell, `speed` cells per tick (fractional speeds
/// accumulate across ticks).
class PathFollower {
 public:
  PathFollower() = default;
  PathFollower(PathResult path, NavConfig cfg);

  const PathResult& path() const { return path_; }
  std::size_t next_index() const { return next_; }
  bool done() const { return next_ >= path_.waypoints.size(); }

  /// One tick. `before_step` runs ahead of every single-cell move so the caller can
  /// refresh memory; when any remaining path cell is occupied in memory the pose is
  /// left untouched and replan is raised.
  AdvanceResult advance(Pose& pose, const SemanticVoxelMap& mem,
                        const std::function<void(const Pose&)>& before_step = {});

 private:
  bool blocked(const SemanticVoxelMap& mem) const;
  bool arrived(const Pose& pose) const;

  PathResult path_;
  NavConfig cfg_;
  std::size_t next_ = 0;
  double credit_ = 0.0;
};

}  // namespace raven

#endif  // RAVEN_NAV_PLANNER_HPP
