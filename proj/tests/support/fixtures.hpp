// Small hand-built worlds shared by the module tests.
#ifndef RAVEN_TESTS_FIXTURES_HPP
#define RAVEN_TESTS_FIXTURES_HPP

#include "raven/world/scenario.hpp"

#include <string>
#include <vector>

namespace fixtures {

using namespace raven;

inline std::vector<GridIndex> ground_plane(GridBounds d) {
  std::vector<GridIndex> out;
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) out.push_back({i, j, 0});
  return out;
}

inline SemanticObject box(int id, std::string cls, GridIndex lo, GridIndex hi) {
  SemanticObject o;
  o.id = id;
  o.class_name = std::move(cls);
  o.min = lo;
  o.max = hi;
  return o;
}

inline WorldModel world_with_ground(GridBounds d, std::vector<SemanticObject> objects,
                                    std::vector<GridIndex> extra = {}) {
  std::vector<GridIndex> occ = ground_plane(d);
  occ.insert(occ.end(), extra.begin(), extra.end());
  return WorldModel(d, 0.5, occ, std::move(objects));
}

inline Scenario scenario(WorldModel world, TaskSpec task, Vec3 start, int budget, std::uint64_t seed = 1,
                         Vec3 heading = Vec3::UnitX()) {
  Scenario s;
  s.world = std::move(world);
  s.task = std::move(task);
  s.start.position = start;
  s.start.heading = heading;
  s.budget_steps = budget;
  s.seed = seed;
  return s;
}

inline TaskSpec type1(std::string cls) { return {TaskKind::TypeI, {{std::move(cls)}}}; }

}  // namespace fixtures

#endif
