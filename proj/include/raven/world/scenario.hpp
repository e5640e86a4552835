#ifndef RAVEN_WORLD_SCENARIO_HPP
#define RAVEN_WORLD_SCENARIO_HPP

#include "raven/world/task.hpp"
#include "raven/world/world_model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace raven {

/// Malformed scenario text. The message starts with "line N:".
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline constexpr double kDefaultSuccessRadius = 2.0;
/// Upper bound on goal instances so the optimal-path oracle stays exhaustive.
inline constexpr std::size_t kMaxGoalInstances = 7;

struct Scenario {
  WorldModel world;
  TaskSpec task;
  Pose start;
  int budget_steps = 0;
  std::uint64_t seed = 0;
  double r_succ = kDefaultSuccessRadius;

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.world == b.world && a.task == b.task && a.start.position == b.start.position &&
           a.start.heading == b.start.heading && a.budget_steps == b.budget_steps &&
           a.seed == b.seed && a.r_succ == b.r_succ;
  }
};

/// Checks cross-object constraints: start in free space, heading unit, task
/// well-formed, 1 <= goal instances <= kMaxGoalInstances.
void validate_scenario(const Scenario& s);

/// Parses a scenario document (sections [world] [occupied] [object] [task] [episode]).
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// Canonical text form: sorted ids, lowercase class names, LF line endings.
std::string save_scenario(const Scenario& s);
void save_scenario_file(const Scenario& s, const std::string& path);

}  // namespace raven

#endif  // RAVEN_WORLD_SCENARIO_HPP
