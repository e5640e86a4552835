#include "raven/world/world_model.hpp"

#include <algorithm>

namespace raven {

WorldModel::WorldModel(GridBounds dims, double voxel_size, const std::vector<GridIndex>& occupied,
                       std::vector<SemanticObject> objects)
    : dims_(dims), voxel_size_(voxel_size), objects_(std::move(objects)) {
  if (dims_.nx <= 0 || dims_.ny <= 0 || dims_.nz <= 0)
    throw ValidationError("world dims must be positive");
  if (!(voxel_size_ > 0.0)) throw ValidationError("voxel_size must be positive");

  std::sort(objects_.begin(), objects_.end(),
            [](const SemanticObject& a, const SemanticObject& b) { return a.id < b.id; });
  occ_.assign(dims_.size(), 0);
  owner_.assign(dims_.size(), -1);

  for (const GridIndex& c : occupied) {
    if (!dims_.contains(c))
      throw ValidationError("occupied cell (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                            "," + std::to_string(c.k) + ") is outside the world");
    occ_[dims_.linear(c)] = 1;
  }

  for (std::size_t n = 0; n < objects_.size(); ++n) {
    const SemanticObject& o = objects_[n];
    const std::string tag = "object " + std::to_string(o.id);
    if (n > 0 && objects_[n - 1].id == o.id) throw ValidationError("duplicate " + tag);
    if (o.class_name.empty()) throw ValidationError(tag + " has an empty class name");
    if (o.max.i < o.min.i || o.max.j < o.min.j || o.max.k < o.min.k)
      throw ValidationError(tag + " has empty volume");
    if (!dims_.contains(o.min) || !dims_.contains(o.max))
      throw ValidationError(tag + " aabb exceeds world dims");
    for (int k = o.min.k; k <= o.max.k; ++k)
      for (int j = o.min.j; j <= o.max.j; ++j)
        for (int i = o.min.i; i <= o.max.i; ++i) {
          const auto idx = dims_.linear({i, j, k});
          if (owner_[idx] >= 0)
            throw ValidationError(tag + " overlaps object " +
                                  std::to_string(objects_[owner_[idx]].id));
          owner_[idx] = static_cast<std::int32_t>(n);
          occ_[idx] = 1;
        }
  }
}

const SemanticObject* WorldModel::find_object(int id) const {
  auto it = std::lower_bound(objects_.begin(), objects_.end(), id,
                             [](const SemanticObject& o, int v) { return o.id < v; });
  return (it != objects_.end() && it->id == id) ? &*it : nullptr;
}

std::vector<GridIndex> WorldModel::occupied_cells() const {
  std::vector<GridIndex> out;
  out.reserve(occupied_count());
  for (std::size_t idx = 0; idx < occ_.size(); ++idx)
    if (occ_[idx]) out.push_back(dims_.unlinear(static_cast<std::int64_t>(idx)));
  return out;
}

std::size_t WorldModel::occupied_count() const {
  return static_cast<std::size_t>(std::count(occ_.begin(), occ_.end(), std::uint8_t{1}));
}

std::vector<std::string> WorldModel::class_palette() const {
  std::vector<std::string> names;
  for (const auto& o : objects_) names.push_back(o.class_name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

}  // namespace raven
