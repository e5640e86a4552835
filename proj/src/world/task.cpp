#include "raven/world/task.hpp"

#include <algorithm>

namespace raven {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::TypeI: return "I";
    case TaskKind::TypeII: return "II";
    case TaskKind::TypeIII: return "III";
  }
  return "?";
}

TaskKind task_kind_from_string(const std::string& text) {
  if (text == "I") return TaskKind::TypeI;
  if (text == "II") return TaskKind::TypeII;
  if (text == "III") return TaskKind::TypeIII;
  throw ValidationError("unknown task kind '" + text + "' (expected I, II or III)");
}

std::vector<std::string> TaskSpec::all_classes() const {
  std::vector<std::string> out;
  for (const auto& s : class_sets) out.insert(out.end(), s.begin(), s.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int TaskSpec::set_of(const std::string& name) const {
  for (std::size_t s = 0; s < class_sets.size(); ++s)
    if (std::find(class_sets[s].begin(), class_sets[s].end(), name) != class_sets[s].end())
      return static_cast<int>(s);
  return -1;
}

void validate_task(const TaskSpec& task) {
  for (const auto& s : task.class_sets) {
    if (s.empty()) throw ValidationError("task has an empty class set");
    for (const auto& c : s)
      if (c.empty()) throw ValidationError("task has an empty class name");
  }
  switch (task.kind) {
    case TaskKind::TypeI:
      if (task.class_sets.size() != 1 || task.class_sets[0].size() != 1)
        throw ValidationError("Type I task needs exactly one set with one class");
      break;
    case TaskKind::TypeII:
      if (task.class_sets.size() != 1)
        throw ValidationError("Type II task needs exactly one class set");
      break;
    case TaskKind::TypeIII:
      if (task.class_sets.size() != 2)
        throw ValidationError("Type III task needs exactly two class sets");
      break;
  }
}

std::set<std::string> active_queries(const TaskSpec& task, const TaskProgress& progress) {
  std::set<std::string> out;
  const std::size_t visible =
      task.kind == TaskKind::TypeIII
          ? std::min<std::size_t>(task.class_sets.size(), std::size_t(std::max(progress.revealed_sets, 1)))
          : task.class_sets.size();
  for (std::size_t s = 0; s < visible; ++s) out.insert(task.class_sets[s].begin(), task.class_sets[s].end());
  return out;
}

std::vector<const SemanticObject*> goal_instances(const TaskSpec& task, const WorldModel& world) {
  std::vector<const SemanticObject*> out;
  for (const auto& o : world.objects())
    if (task.set_of(o.class_name) >= 0) out.push_back(&o);
  return out;
}

bool is_reached(const Pose& pose, const SemanticObject& object, double r_succ) {
  return distance_to_box(pose.position, object.lo(), object.hi()) <= r_succ;
}

void mark_reached(const TaskSpec& task, const WorldModel& world, TaskProgress& progress, int goal_id) {
  progress.reached.insert(goal_id);
  if (task.kind != TaskKind::TypeIII || progress.revealed_sets >= 2) return;
  if (const SemanticObject* o = world.find_object(goal_id); o && task.set_of(o->class_name) == 0)
    progress.revealed_sets = 2;
}

}  // namespace raven
