#ifndef RAVEN_EVAL_EPISODE_HPP
#define RAVEN_EVAL_EPISODE_HPP

#include "raven/eval/policy.hpp"
#include "raven/memory/integrate.hpp"
#include "raven/nav/planner.hpp"
#include "raven/world/scenario.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace raven {

enum class Termination { Budget, AllGoals, Stall };

std::string to_string(Termination t);
std::optional<Termination> termination_from_string(const std::string& s);

struct TrajectoryPoint {
  int tick = 0;
  Pose pose;
};

struct ReachEvent {
  int tick = 0;
  int goal_id = 0;
  double path_length = 0.0;
};

/// One line per tick. `issued` marks the tick a new waypoint was chosen.
struct BehaviorRecord {
  int tick = 0;
  std::optional<Behavior> behavior;
  std::optional<Vec3> waypoint;
  bool issued = false;
  std::vector<std::string> queries;
};

/// Invariant checks run during an episode when auditing is on. Each entry of
/// `failures` names the broken property and the tick.
struct EpisodeAudit {
  int frontier_rescans = 0;
  int occupancy_checks = 0;
  int bin_checks = 0;
  int visited_checks = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

struct EpisodeResult {
  std::vector<TrajectoryPoint> trajectory;
  std::vector<ReachEvent> reach_events;
  std::vector<BehaviorRecord> behavior_log;
  Termination terminated_by = Termination::Budget;
  int steps = 0;
  double path_length = 0.0;
  std::optional<EpisodeAudit> audit;
};

struct EpisodeOptions {
  BehaviorConfig behavior;
  SensorConfig sensor;
  NavConfig nav;
  SemanticSpaceConfig space;
  /// Cue source for AuxSearch; the built-in co-occurrence table when null.
  const AuxCueProvider* provider = nullptr;
  bool audit = false;
  /// Full frontier rescans happen every this many integrations (and at the end).
  int audit_rescan_every = 5;
  /// Called after every tick with the live memory, for replay tools.
  std::function<void(int tick, const SemanticVoxelMap&, const RayStore&)> on_tick;
};

/// Deterministic in (scenario, policy, seed, options).
EpisodeResult run_episode(const Scenario& scenario, PolicyKind policy, std::uint64_t seed,
                          const EpisodeOptions& options = {});

/// Marks the 26-neighborhood of the pose from the ground truth; this is the
/// robot's proximity sense and keeps motion collision-free.
void probe_neighborhood(SemanticVoxelMap& mem, const WorldModel& world, const Pose& pose);

/// Classes the semantic space is primed with for a scenario, in encoding order.
std::vector<std::string> scenario_vocabulary(const Scenario& scenario);

}  // namespace raven

#endif  // RAVEN_EVAL_EPISODE_HPP
