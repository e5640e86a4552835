#ifndef RAVEN_MEMORY_INTEGRATE_HPP
#define RAVEN_MEMORY_INTEGRATE_HPP

#include "raven/memory/ray_store.hpp"
#include "raven/memory/voxel_map.hpp"
#include "raven/sensor/sensor.hpp"

#include <optional>
#include <string>

namespace raven {

struct IntegrateStats {
  std::size_t cells_changed = 0;
  std::size_t rays_added = 0;
  std::size_t rays_merged = 0;
  std::size_t rays_pruned = 0;
};

/// Fuses one frame into memory. `step` stamps new rays. Depth limits come from `sensor`.
IntegrateStats integrate(SemanticVoxelMap& mem, RayStore& store, const Observation& obs, int step,
                         const SensorConfig& sensor);

/// Last cell that memory knows to be free when walking from `from` along `dir`.
std::optional<GridIndex> last_known_free(const SemanticVoxelMap& mem, const Vec3& from, const Vec3& dir,
                                         double max_t);

/// True once the first `length` units ahead of the ray contain no unknown cell
/// (walk ends early at a known occupied cell or at the world edge).
bool corridor_observed(const SemanticVoxelMap& mem, const SemanticRay& ray, double length);

/// Canonical, byte-stable text dump of the whole memory state.
std::string serialize_memory(const SemanticVoxelMap& mem, const RayStore& store);

}  // namespace raven

#endif  // RAVEN_MEMORY_INTEGRATE_HPP
