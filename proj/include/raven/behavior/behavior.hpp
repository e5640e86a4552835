#ifndef RAVEN_BEHAVIOR_BEHAVIOR_HPP
#define RAVEN_BEHAVIOR_BEHAVIOR_HPP

#include "raven/behavior/aux_cues.hpp"
#include "raven/memory/search.hpp"
#include "raven/sensor/sensor.hpp"
#include "raven/world/task.hpp"

#include <optional>
#include <string>
#include <vector>

namespace raven {

enum class Behavior { VoxelSearch, RaySearch, AuxSearch, FrontierExplore };

std::string to_string(Behavior b);

struct BehaviorConfig {
  double epsilon_vox = 0.98;
  int tau_min = 30;
  double omega = 1.0;
  double epsilon_ray = 0.95;
  double theta_deg = 45.0;
  double alpha = 1.0;
  double beta = 5.0;
  double omega_ray = 6.0;
  int t_aux_steps = 200;
  int j_aux = 3;
  double z_thresh = 3.0;
  double dbscan_eps = 2.7;
  int dbscan_min_samples = 3;
  double alpha_dist = 1.0;
  double alpha_head = 5.0;
  double ascend_height = 10.0;
  int blacklist_ticks = 50;
  double blacklist_radius = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Which branches of the tree are live; the ablations switch some off.
struct BranchSet {
  bool voxel = true;
  bool ray = true;
  bool aux = true;
  bool frontier = true;
  /// Frontier choice by semantic similarity instead of distance/heading scoring.
  bool semantic_frontier = false;
};

/// Box of a cluster rounded to integer cell corners.
struct ClusterFingerprint {
  GridIndex lo;
  GridIndex hi;

  static ClusterFingerprint of(const VoxelCluster& c) { return {c.min_cell, c.max_cell}; }
  bool overlaps(const ClusterFingerprint& o) const;
  friend bool operator==(const ClusterFingerprint&, const ClusterFingerprint&) = default;
};

struct Waypoint {
  Vec3 point = Vec3::Zero();
  Behavior source = Behavior::FrontierExplore;
  std::optional<ClusterFingerprint> cluster;
};

struct BlacklistEntry {
  Vec3 point = Vec3::Zero();
  std::optional<ClusterFingerprint> cluster;
  int until = 0;
};

/// Frontier cluster candidates keyed by the frontier set they were computed from.
struct FrontierCandidateCache {
  const SemanticVoxelMap* map = nullptr;
  std::uint64_t version = 0;
  double z_thresh = 0.0;
  double eps = 0.0;
  int min_samples = 0;
  std::vector<Vec3> candidates;
  int hits = 0;
  int misses = 0;
};

struct BehaviorState {
  std::vector<ClusterFingerprint> visited_clusters;
  std::optional<Waypoint> current_waypoint;
  std::vector<std::string> aux_queries;
  int last_aux_step = 0;
  int step_clock = 0;
  std::vector<BlacklistEntry> blacklist;
  mutable FrontierCandidateCache frontier_cache;

  explicit BehaviorState(const BehaviorConfig& cfg = {}) : last_aux_step(-cfg.t_aux_steps) {}

  bool is_visited(const ClusterFingerprint& fp) const;
  void mark_visited(const ClusterFingerprint& fp);
  bool is_blacklisted(const Vec3& p, double radius) const;
  bool is_blacklisted(const ClusterFingerprint& fp) const;
  void add_blacklist(const Waypoint& w, int ticks);
  void expire_blacklist();
};

/// Everything a tick reads. The semantic space turns class names into query vectors.
struct BehaviorContext {
  const SemanticVoxelMap& mem;
  const RayStore& rays;
  const TaskSpec& task;
  const TaskProgress& progress;
  const Pose& pose;
  const SemanticSpace& space;
  /// Classes present in the scenario, offered to the aux provider.
  const std::vector<std::string>& palette;
};

std::vector<Query> make_queries(const SemanticSpace& space, const std::vector<std::string>& names);

/// Nearest intersection of the segment origin -> box_center with the box surface;
/// the origin itself when it is already inside.
Vec3 ray_box_intersect(const Vec3& origin, const Vec3& box_center, const Vec3& box_size);

struct VoxelCandidate {
  Vec3 waypoint;
  ClusterFingerprint cluster;
};

std::optional<VoxelCandidate> voxel_search(const BehaviorState& state, const SemanticVoxelMap& mem,
                                           const std::vector<Query>& queries, const Pose& pose,
                                           const BehaviorConfig& cfg);

std::optional<Vec3> ray_search(const BehaviorState& state, const RayStore& rays, const std::vector<Query>& queries,
                               const Pose& pose, const GridBounds& bounds, const BehaviorConfig& cfg);

/// Rate-limited; refreshes state.aux_queries on every attempt that passes the limit.
std::optional<Vec3> aux_search(BehaviorState& state, const BehaviorContext& ctx, const BehaviorConfig& cfg,
                               const AuxCueProvider& provider);

/// Frontier cells kept for exploration (centers above z_thresh), in linear-index order.
std::vector<GridIndex> filtered_frontier_cells(const SemanticVoxelMap& mem, const BehaviorConfig& cfg);
std::vector<Vec3> filtered_frontier_points(const SemanticVoxelMap& mem, const BehaviorConfig& cfg);

/// Snapped DBSCAN centroids of the filtered frontier set; every filtered point
/// when all of them are noise.
std::vector<Vec3> frontier_candidates(const SemanticVoxelMap& mem, const BehaviorConfig& cfg);

std::optional<Vec3> frontier_explore(const BehaviorState& state, const SemanticVoxelMap& mem, const Pose& pose,
                                     const BehaviorConfig& cfg);

/// Frontier cell whose projected feature best matches the queries.
std::optional<Vec3> semantic_frontier(const BehaviorState& state, const SemanticVoxelMap& mem,
                                      const std::vector<Query>& queries, const Pose& pose,
                                      const BehaviorConfig& cfg);

struct InitPlan {
  Pose pose;
  int sweep_views = 0;
  /// Cells passed through on the way up, in order, ending at pose.
  std::vector<Vec3> ascent;
};

/// Climbs ascend_height (plus up to 5 extra cells if the target cell is blocked)
/// along a column that is free in the ground truth. Throws std::runtime_error otherwise.
InitPlan initialize(const Pose& start, const WorldModel& world, const BehaviorConfig& cfg,
                    const SensorConfig& sensor);

struct TickDecision {
  Behavior behavior = Behavior::FrontierExplore;
  Waypoint waypoint;
  std::vector<std::string> queries;
};

/// One arbitration pass, in the fixed order voxel, ray, aux, frontier. Returns
/// nullopt when nothing can run (the episode stalls).
std::optional<TickDecision> tick(BehaviorState& state, const BehaviorContext& ctx, const BehaviorConfig& cfg,
                                 const AuxCueProvider& provider, const BranchSet& branches = {});

}  // namespace raven

#endif  // RAVEN_BEHAVIOR_BEHAVIOR_HPP
