#include "raven/memory/integrate.hpp"

#include "raven/core/text.hpp"
#include "raven/core/voxel_traversal.hpp"

#include <algorithm>
#include <sstream>

namespace raven {

std::optional<GridIndex> last_known_free(const SemanticVoxelMap& mem, const Vec3& from, const Vec3& dir,
                                         double max_t) {
  std::optional<GridIndex> last;
  traverse_voxels(from, dir, max_t, mem.bounds(), [&](GridIndex c, double) {
    if (!mem.is_free(c)) return false;
    last = c;
    return true;
  });
  return last;
}

bool corridor_observed(const SemanticVoxelMap& mem, const SemanticRay& ray, double length) {
  bool observed = true;
  traverse_voxels(ray.origin, ray.direction, length, mem.bounds(), [&](GridIndex c, double) {
    switch (mem.at(c)) {
      case Occupancy::Free: return true;
      case Occupancy::Occupied: return false;
      case Occupancy::Unknown: observed = false; return false;
    }
    return false;
  });
  return observed;
}

IntegrateStats integrate(SemanticVoxelMap& mem, RayStore& store, const Observation& obs, int step,
                         const SensorConfig& sensor) {
  IntegrateStats stats;
  std::vector<GridIndex> changed;
  for (const HitCell& h : obs.hit_cells) {
    if (mem.mark_occupied(h.cell)) changed.push_back(h.cell);
    if (mem.is_occupied(h.cell)) mem.add_feature(h.cell, h.feature);
  }
  for (const GridIndex& c : obs.free_cells)
    if (mem.mark_free(c)) changed.push_back(c);
  mem.update_frontiers(changed);
  stats.cells_changed = changed.size();

  for (const HitCell& h : obs.hit_cells)
    if (h.approach && mem.is_frontier(*h.approach)) mem.add_frontier_feature(*h.approach, h.feature);

  for (const FarHit& far : obs.far_hits) {
    const auto edge = last_known_free(mem, obs.origin.position, far.direction, sensor.max_visibility);
    if (!edge) continue;
    if (mem.is_frontier(*edge)) mem.add_frontier_feature(*edge, far.feature);
    SemanticRay ray;
    ray.origin = cell_center(*edge);
    ray.direction = far.direction;
    ray.feature = far.feature;
    ray.birth_step = step;
    const std::size_t before = store.size();
    store.add(std::move(ray));
    if (store.size() > before) ++stats.rays_added;
    else ++stats.rays_merged;
  }

  const double corridor = 2.0 * sensor.max_depth;
  stats.rays_pruned = store.prune_if([&](const SemanticRay& r) {
    return !mem.is_frontier(cell_of(r.origin)) && corridor_observed(mem, r, corridor);
  });
  return stats;
}

namespace {

void write_vec(std::ostream& os, const Embedding& v) {
  for (Eigen::Index r = 0; r < v.size(); ++r) os << (r ? " " : "") << text::fmt(v(r));
}

void write_accums(std::ostream& os, const char* tag, const GridBounds& bounds,
                  const std::unordered_map<std::int64_t, FeatureAccum>& m) {
  std::vector<std::int64_t> keys;
  keys.reserve(m.size());
  for (const auto& [k, _] : m) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  os << tag << ' ' << keys.size() << '\n';
  for (auto k : keys) {
    const GridIndex c = bounds.unlinear(k);
    const FeatureAccum& a = m.at(k);
    os << c.i << ' ' << c.j << ' ' << c.k << ' ' << a.count << " : ";
    write_vec(os, a.sum);
    os << '\n';
  }
}

}  // namespace

std::string serialize_memory(const SemanticVoxelMap& mem, const RayStore& store) {
  std::ostringstream os;
  const GridBounds& b = mem.bounds();
  os << "memory v1\n";
  os << "dims " << b.nx << ' ' << b.ny << ' ' << b.nz << '\n';
  // run-length occupancy in linear order
  const auto& occ = mem.raw_occupancy();
  os << "occupancy";
  std::size_t idx = 0;
  while (idx < occ.size()) {
    std::size_t end = idx;
    while (end < occ.size() && occ[end] == occ[idx]) ++end;
    os << ' ' << int(occ[idx]) << 'x' << (end - idx);
    idx = end;
  }
  os << '\n';
  os << "frontiers " << mem.frontier_count() << '\n';
  for (const GridIndex& c : mem.frontiers()) os << c.i << ' ' << c.j << ' ' << c.k << '\n';
  write_accums(os, "features", b, mem.features());
  write_accums(os, "frontier_features", b, mem.frontier_features());
  os << "rays " << store.size() << '\n';
  for (const SemanticRay& r : store.rays()) {
    os << r.birth_step << ' ' << r.count << " o " << text::fmt(r.origin.x()) << ' ' << text::fmt(r.origin.y())
       << ' ' << text::fmt(r.origin.z()) << " d " << text::fmt(r.direction.x()) << ' '
       << text::fmt(r.direction.y()) << ' ' << text::fmt(r.direction.z()) << " : ";
    write_vec(os, r.feature_sum);
    os << '\n';
  }
  return os.str();
}

}  // namespace raven
