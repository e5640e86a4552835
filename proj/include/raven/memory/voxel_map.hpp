#ifndef RAVEN_MEMORY_VOXEL_MAP_HPP
#define RAVEN_MEMORY_VOXEL_MAP_HPP

#include "raven/core/geometry.hpp"
#include "raven/core/semantic_space.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace raven {

enum class Occupancy : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

/// Running sum of unit embeddings; the stored feature is the renormalized mean.
struct FeatureAccum {
  Embedding sum;
  int count = 0;

  void add(const Embedding& v) {
    if (count == 0) sum = v;
    else sum += v;
    ++count;
  }
  Embedding mean() const {
    Embedding m = sum / double(count);
    normalize_embedding(m);
    return m;
  }
};

/// The robot's persistent occupancy + semantic memory. Dense over the world bounds;
/// features live only on occupied cells. Frontier cells are exactly the free cells
/// with at least one in-bounds unknown 6-neighbor.
class SemanticVoxelMap {
 public:
  SemanticVoxelMap() = default;
  explicit SemanticVoxelMap(GridBounds bounds);

  const GridBounds& bounds() const { return bounds_; }

  Occupancy at(GridIndex c) const {
    return bounds_.contains(c) ? static_cast<Occupancy>(occ_[bounds_.linear(c)]) : Occupancy::Unknown;
  }
  bool is_free(GridIndex c) const { return at(c) == Occupancy::Free; }
  bool is_occupied(GridIndex c) const { return at(c) == Occupancy::Occupied; }
  bool is_frontier(GridIndex c) const { return bounds_.contains(c) && frontier_[bounds_.linear(c)] != 0; }

  /// Frontier cells in linear-index order.
  const std::vector<GridIndex>& frontiers() const;
  std::size_t frontier_count() const { return frontier_count_; }
  /// Bumped on every frontier flag change; equal versions mean an equal frontier set.
  std::uint64_t frontier_version() const { return frontier_version_; }
  /// Full recomputation of the frontier set from occupancy, for audits.
  std::vector<GridIndex> rescan_frontiers() const;

  /// unknown -> free. Returns true if the cell changed.
  bool mark_free(GridIndex c);
  /// unknown/free -> occupied. Returns true if the cell changed.
  bool mark_occupied(GridIndex c);
  /// Accumulates a feature on an occupied cell.
  void add_feature(GridIndex c, const Embedding& f);
  void add_frontier_feature(GridIndex c, const Embedding& f);
  /// Recomputes the frontier flag of every changed cell and its 6-neighbors.
  void update_frontiers(const std::vector<GridIndex>& changed);

  const std::unordered_map<std::int64_t, FeatureAccum>& features() const { return features_; }
  const std::unordered_map<std::int64_t, FeatureAccum>& frontier_features() const { return frontier_features_; }
  std::optional<Embedding> mean_feature(GridIndex c) const;
  std::optional<Embedding> frontier_feature(GridIndex c) const;

  const std::vector<std::uint8_t>& raw_occupancy() const { return occ_; }

 private:
  bool frontier_rule(GridIndex c) const;

  GridBounds bounds_;
  std::vector<std::uint8_t> occ_;
  std::vector<std::uint8_t> frontier_;
  std::size_t frontier_count_ = 0;
  std::uint64_t frontier_version_ = 0;
  std::unordered_map<std::int64_t, FeatureAccum> features_;
  std::unordered_map<std::int64_t, FeatureAccum> frontier_features_;
  mutable std::vector<GridIndex> frontier_cache_;
  mutable bool frontier_dirty_ = true;
};

}  // namespace raven

#endif  // RAVEN_MEMORY_VOXEL_MAP_HPP
