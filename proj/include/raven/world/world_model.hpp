#ifndef RAVEN_WORLD_WORLD_MODEL_HPP
#define RAVEN_WORLD_WORLD_MODEL_HPP

#include "raven/core/geometry.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace raven {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A semantic object occupying the inclusive cell box [min, max].
struct SemanticObject {
  int id = 0;
  std::string class_name;
  GridIndex min;
  GridIndex max;

  /// Continuous world-space extent of the box.
  Vec3 lo() const { return to_vec(min); }
  Vec3 hi() const { return to_vec(max) + Vec3::Ones(); }
  Vec3 center() const { return 0.5 * (lo() + hi()); }
  long long volume() const {
    return (long long)(max.i - min.i + 1) * (max.j - min.j + 1) * (max.k - min.k + 1);
  }
  bool contains(GridIndex c) const {
    return c.i >= min.i && c.i <= max.i && c.j >= min.j && c.j <= max.j && c.k >= min.k &&
           c.k <= max.k;
  }

  friend bool operator==(const SemanticObject&, const SemanticObject&) = default;
};

/// Static ground-truth scene: dense occupancy plus the object that owns each cell.
class WorldModel {
 public:
  WorldModel() = default;

  /// Builds the dense lookup tables. Object cells are added to the occupied set.
  /// Throws ValidationError if an object leaves the bounds, has empty volume,
  /// overlaps another object, or if an occupied cell is out of bounds.
  WorldModel(GridBounds dims, double voxel_size, const std::vector<GridIndex>& occupied,
             std::vector<SemanticObject> objects);

  const GridBounds& bounds() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  const std::vector<SemanticObject>& objects() const { return objects_; }

  bool occupied(GridIndex c) const { return dims_.contains(c) && occ_[dims_.linear(c)] != 0; }
  bool free(GridIndex c) const { return dims_.contains(c) && occ_[dims_.linear(c)] == 0; }

  /// Object owning cell `c`, or nullptr.
  const SemanticObject* object_at(GridIndex c) const {
    if (!dims_.contains(c)) return nullptr;
    const int idx = owner_[dims_.linear(c)];
    return idx < 0 ? nullptr : &objects_[static_cast<std::size_t>(idx)];
  }

  const SemanticObject* find_object(int id) const;

  /// All occupied cells in linear-index order.
  std::vector<GridIndex> occupied_cells() const;
  std::size_t occupied_count() const;

  /// Sorted, de-duplicated class names of all objects.
  std::vector<std::string> class_palette() const;

  friend bool operator==(const WorldModel& a, const WorldModel& b) {
    return a.dims_ == b.dims_ && a.voxel_size_ == b.voxel_size_ && a.occ_ == b.occ_ &&
           a.objects_ == b.objects_;
  }

 private:
  GridBounds dims_;
  double voxel_size_ = 0.5;
  std::vector<std::uint8_t> occ_;
  std::vector<std::int32_t> owner_;
  std::vector<SemanticObject> objects_;
};

}  // namespace raven

#endif  // RAVEN_WORLD_WORLD_MODEL_HPP
