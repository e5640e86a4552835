#include "raven/sensor/sensor.hpp"

#include "raven/core/voxel_traversal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace raven {

void SensorConfig::validate() const {
  if (!(h_fov_deg > 0.0 && h_fov_deg <= 360.0)) throw std::invalid_argument("h_fov must lie in (0, 360]");
  if (!(v_fov_deg > 0.0 && v_fov_deg <= 360.0)) throw std::invalid_argument("v_fov must lie in (0, 360]");
  if (n_h < 1 || n_v < 1) throw std::invalid_argument("rays_per_frame must be positive");
  if (!(max_depth > 0.0)) throw std::invalid_argument("max_depth must be positive");
  if (!(max_visibility >= max_depth)) throw std::invalid_argument("max_visibility must be >= max_depth");
  if (integrate_period < 1) throw std::invalid_argument("integrate_period must be positive");
}

std::vector<Vec3> ray_directions(const Pose& pose, const SensorConfig& cfg) {
  const double yaw0 = pose.yaw();
  const double h = deg2rad(cfg.h_fov_deg);
  const double v = deg2rad(cfg.v_fov_deg);
  std::vector<Vec3> dirs;
  dirs.reserve(std::size_t(cfg.n_h) * std::size_t(cfg.n_v));
  for (int b = 0; b < cfg.n_v; ++b) {
    const double pitch = -0.5 * v + (b + 0.5) * v / cfg.n_v;
    for (int a = 0; a < cfg.n_h; ++a) {
      const double yaw = yaw0 - 0.5 * h + (a + 0.5) * h / cfg.n_h;
      dirs.emplace_back(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch));
    }
  }
  return dirs;
}

Observation sense(const WorldModel& world, const Pose& pose, const SensorConfig& cfg,
                  const SemanticSpace& space, Rng& rng) {
  cfg.validate();
  const GridBounds& bounds = world.bounds();
  if (!bounds.contains(cell_of(pose.position))) throw std::invalid_argument("sense: pose outside the world");

  Observation obs;
  obs.origin = pose;
  const double depth2 = cfg.max_depth * cfg.max_depth;
  const double vis2 = cfg.max_visibility * cfg.max_visibility;
  std::vector<std::int64_t> free_ids;

  for (const Vec3& dir : ray_directions(pose, cfg)) {
    std::optional<GridIndex> last_free;
    traverse_voxels(pose.position, dir, cfg.max_visibility + 2.0, bounds, [&](GridIndex c, double) {
      const double d2 = (cell_center(c) - pose.position).squaredNorm();
      if (!world.occupied(c)) {
        if (d2 <= depth2) {
          free_ids.push_back(bounds.linear(c));
          last_free = c;
        }
        return d2 <= vis2;
      }
      const SemanticObject* obj = world.object_at(c);
      if (d2 <= depth2) {
        const std::string_view cls = obj ? std::string_view(obj->class_name) : kBackgroundClass;
        obs.hit_cells.push_back({c, space.observe(cls, rng), last_free});
      } else if (obj && d2 <= vis2) {
        obs.far_hits.push_back({dir, space.observe(obj->class_name, rng)});
      }
      return false;
    });
  }

  std::sort(free_ids.begin(), free_ids.end());
  free_ids.erase(std::unique(free_ids.begin(), free_ids.end()), free_ids.end());
  obs.free_cells.reserve(free_ids.size());
  for (auto id : free_ids) obs.free_cells.push_back(bounds.unlinear(id));
  return obs;
}

std::vector<Observation> panoramic_sense(const WorldModel& world, const Pose& pose,
                                         const SensorConfig& cfg, const SemanticSpace& space,
                                         Rng& rng, int n_yaw) {
  cfg.validate();
  const int needed = static_cast<int>(std::ceil(360.0 / cfg.h_fov_deg - 1e-9));
  if (n_yaw < needed)
    throw std::invalid_argument("panoramic_sense: n_yaw " + std::to_string(n_yaw) + " < ceil(360/h_fov) = " +
                                std::to_string(needed));
  std::vector<Observation> out;
  out.reserve(std::size_t(n_yaw));
  const double yaw0 = pose.yaw();
  for (int n = 0; n < n_yaw; ++n) {
    const Pose view = Pose::from_yaw(pose.position, yaw0 + 2.0 * kPi * n / n_yaw);
    out.push_back(sense(world, view, cfg, space, rng));
  }
  return out;
}

}  // namespace raven
