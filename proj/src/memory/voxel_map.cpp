#include "raven/memory/voxel_map.hpp"

#include <stdexcept>

namespace raven {

SemanticVoxelMap::SemanticVoxelMap(GridBounds bounds)
    : bounds_(bounds), occ_(bounds.size(), 0), frontier_(bounds.size(), 0) {}

bool SemanticVoxelMap::frontier_rule(GridIndex c) const {
  if (at(c) != Occupancy::Free) return false;
  for (const GridIndex& d : kFaceNeighbors) {
    const GridIndex n = c + d;
    if (bounds_.contains(n) && occ_[bounds_.linear(n)] == std::uint8_t(Occupancy::Unknown)) return true;
  }
  return false;
}

const std::vector<GridIndex>& SemanticVoxelMap::frontiers() const {
  if (frontier_dirty_) {
    frontier_cache_.clear();
    frontier_cache_.reserve(frontier_count_);
    for (std::size_t idx = 0; idx < frontier_.size(); ++idx)
      if (frontier_[idx]) frontier_cache_.push_back(bounds_.unlinear(std::int64_t(idx)));
    frontier_dirty_ = false;
  }
  return frontier_cache_;
}

std::vector<GridIndex> SemanticVoxelMap::rescan_frontiers() const {
  std::vector<GridIndex> out;
  for (std::size_t idx = 0; idx < occ_.size(); ++idx) {
    const GridIndex c = bounds_.unlinear(std::int64_t(idx));
    if (frontier_rule(c)) out.push_back(c);
  }
  return out;
}

bool SemanticVoxelMap::mark_free(GridIndex c) {
  if (!bounds_.contains(c)) return false;
  auto& v = occ_[bounds_.linear(c)];
  if (v != std::uint8_t(Occupancy::Unknown)) return false;
  v = std::uint8_t(Occupancy::Free);
  return true;
}

bool SemanticVoxelMap::mark_occupied(GridIndex c) {
  if (!bounds_.contains(c)) return false;
  auto& v = occ_[bounds_.linear(c)];
  if (v == std::uint8_t(Occupancy::Occupied)) return false;
  v = std::uint8_t(Occupancy::Occupied);
  return true;
}

void SemanticVoxelMap::add_feature(GridIndex c, const Embedding& f) {
  if (!is_occupied(c)) throw std::logic_error("features are only stored on occupied cells");
  features_[bounds_.linear(c)].add(f);
}

void SemanticVoxelMap::add_frontier_feature(GridIndex c, const Embedding& f) {
  if (!bounds_.contains(c)) return;
  frontier_features_[bounds_.linear(c)].add(f);
}

void SemanticVoxelMap::update_frontiers(const std::vector<GridIndex>& changed) {
  auto refresh = [&](GridIndex c) {
    if (!bounds_.contains(c)) return;
    auto& flag = frontier_[bounds_.linear(c)];
    const std::uint8_t now = frontier_rule(c) ? 1 : 0;
    if (now == flag) return;
    if (now) ++frontier_count_;
    else --frontier_count_;
    flag = now;
    frontier_dirty_ = true;
    ++frontier_version_;
  };
  for (const GridIndex& c : changed) {
    refresh(c);
    for (const GridIndex& d : kFaceNeighbors) refresh(c + d);
  }
}

std::optional<Embedding> SemanticVoxelMap::mean_feature(GridIndex c) const {
  if (!bounds_.contains(c)) return std::nullopt;
  auto it = features_.find(bounds_.linear(c));
  if (it == features_.end()) return std::nullopt;
  return it->second.mean();
}

std::optional<Embedding> SemanticVoxelMap::frontier_feature(GridIndex c) const {
  if (!bounds_.contains(c)) return std::nullopt;
  auto it = frontier_features_.find(bounds_.linear(c));
  if (it == frontier_features_.end()) return std::nullopt;
  return it->second.mean();
}

}  // namespace raven
