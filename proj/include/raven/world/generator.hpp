#ifndef RAVEN_WORLD_GENERATOR_HPP
#define RAVEN_WORLD_GENERATOR_HPP

#include "raven/world/cooccurrence.hpp"
#include "raven/world/scenario.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace raven {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SizeRange {
  int min = 1;
  int max = 1;
};

/// Parameters of the procedural world generator. Every scenario places a flat
/// ground plane at k = 0, box clutter, `featured_classes` goal-capable classes with
/// `instances` objects each, one auxiliary object beside each featured object
/// (drawn from the co-occurrence row of its class), and `distractors` objects of
/// other classes.
struct GeneratorConfig {
  GridBounds dims{160, 160, 20};
  double voxel_size = 0.5;
  double r_succ = kDefaultSuccessRadius;
  int budget_steps = 1200;

  std::vector<std::string> goal_palette{"water tower", "radio tower", "fuel tank", "house",
                                        "bus stop",    "helicopter",  "bankomat"};
  std::vector<std::string> distractor_palette{"car", "container", "truck", "billboard", "silo"};
  CooccurrenceTable cooccurrence = default_cooccurrence();

  int featured_classes = 3;
  SizeRange instances{1, 2};
  int distractors = 6;
  bool aux_objects = true;

  SizeRange goal_footprint{4, 6};
  SizeRange goal_height{8, 14};
  SizeRange aux_footprint{6, 10};
  SizeRange aux_height{10, 16};
  SizeRange clutter_footprint{1, 4};
  SizeRange clutter_height{1, 7};
  /// Fraction of the ground area covered by clutter boxes.
  double clutter_density = 0.02;

  /// Minimum horizontal distance from start to any goal object's box.
  double min_start_goal_distance = 40.0;
  /// Free column height required above the start (ascent clearance).
  int start_clearance = 16;

  /// Documents per world: every start index is combined with every task kind.
  int starts_per_world = 1;
  std::vector<TaskKind> task_kinds{TaskKind::TypeI};

  int max_retries = 50;
};

/// Parses "key = value" lines; unknown keys and bad values raise ValidationError
/// naming the field.
GeneratorConfig parse_generator_config(std::string_view text);
std::string format_generator_config(const GeneratorConfig& cfg);
void validate_generator_config(const GeneratorConfig& cfg);

/// One scenario: world layout from `seed`, start index 0, first task kind.
Scenario generate_world(const GeneratorConfig& cfg, std::uint64_t seed);

/// Scenario for a given start index and task kind over the layout of `world_seed`.
Scenario generate_scenario(const GeneratorConfig& cfg, std::uint64_t world_seed, int start_index,
                           TaskKind kind);

/// `count` scenarios; document n uses world n / (starts * kinds), then start, then kind.
std::vector<Scenario> generate_suite(const GeneratorConfig& cfg, int count, std::uint64_t seed);

/// Ground-truth reachability: true iff a 26-connected free path joins `start` to a
/// cell whose center lies within r_succ of the object's box.
bool goal_reachable(const WorldModel& world, const Vec3& start, const SemanticObject& goal, double r_succ);

}  // namespace raven

#endif  // RAVEN_WORLD_GENERATOR_HPP
