#ifndef RAVEN_SENSOR_SENSOR_HPP
#define RAVEN_SENSOR_SENSOR_HPP

#include "raven/core/semantic_space.hpp"
#include "raven/world/world_model.hpp"

#include <optional>
#include <vector>

namespace raven {

/// Depth-limited camera model. Distances are in world units (one voxel edge).
struct SensorConfig {
  double h_fov_deg = 90.0;
  double v_fov_deg = 60.0;
  int n_h = 48;
  int n_v = 24;
  double max_depth = 60.0;
  double max_visibility = 300.0;
  int integrate_period = 10;

  /// Throws std::invalid_argument when a field is out of its domain.
  void validate() const;
};

struct HitCell {
  GridIndex cell;
  Embedding feature;
  /// Last free cell the ray crossed before the hit, if any.
  std::optional<GridIndex> approach;
};

struct FarHit {
  Vec3 direction;
  Embedding feature;
};

/// One frame. Free cells are sorted and unique; hits keep one entry per ray.
struct Observation {
  Pose origin;
  std::vector<GridIndex> free_cells;
  std::vector<HitCell> hit_cells;
  std::vector<FarHit> far_hits;
};

/// Unit directions of the n_h x n_v ray fan around the yaw of `pose` (the camera is
/// kept level), row-major with azimuth fastest.
std::vector<Vec3> ray_directions(const Pose& pose, const SensorConfig& cfg);

/// Casts the ray fan through the ground-truth world. Cells are reported only when
/// their centers lie within max_depth of the origin; the first occupied cell ends a
/// ray. An object cell first hit beyond max_depth but within max_visibility yields a
/// far hit carrying only the bearing and the object's noisy embedding.
Observation sense(const WorldModel& world, const Pose& pose, const SensorConfig& cfg,
                  const SemanticSpace& space, Rng& rng);

/// `n_yaw` frames at evenly spaced yaws starting from the pose heading.
/// Throws std::invalid_argument if n_yaw < ceil(360 / h_fov).
std::vector<Observation> panoramic_sense(const WorldModel& world, const Pose& pose,
                                         const SensorConfig& cfg, const SemanticSpace& space,
                                         Rng& rng, int n_yaw);

}  // namespace raven

#endif  // RAVEN_SENSOR_SENSOR_HPP
