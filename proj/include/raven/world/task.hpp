#ifndef RAVEN_WORLD_TASK_HPP
#define RAVEN_WORLD_TASK_HPP

#include "raven/world/world_model.hpp"

#include <set>
#include <string>
#include <vector>

namespace raven {

enum class TaskKind { TypeI, TypeII, TypeIII };

std::string to_string(TaskKind kind);  // "I", "II", "III"
TaskKind task_kind_from_string(const std::string& text);

/// Goal classes of a task. Type I/II carry one set; Type III carries two, the
/// second of which stays hidden until a goal of the first set is reached.
struct TaskSpec {
  TaskKind kind = TaskKind::TypeI;
  std::vector<std::vector<std::string>> class_sets;

  /// Every class of every set, sorted.
  std::vector<std::string> all_classes() const;
  /// Which class set `name` belongs to, or -1.
  int set_of(const std::string& name) const;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Throws ValidationError if the set structure does not match the kind.
void validate_task(const TaskSpec& task);

struct TaskProgress {
  std::set<int> reached;
  int revealed_sets = 1;
};

/// Class names the robot is currently asked to find.
std::set<std::string> active_queries(const TaskSpec& task, const TaskProgress& progress);

/// Objects of the world whose class belongs to any task set (the M goal instances).
std::vector<const SemanticObject*> goal_instances(const TaskSpec& task, const WorldModel& world);

/// True iff the distance from the pose to the object's box is at most r_succ.
bool is_reached(const Pose& pose, const SemanticObject& object, double r_succ);

/// Records a newly reached goal and applies the Type III reveal rule.
void mark_reached(const TaskSpec& task, const WorldModel& world, TaskProgress& progress, int goal_id);

}  // namespace raven

#endif  // RAVEN_WORLD_TASK_HPP
