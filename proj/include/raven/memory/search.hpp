#ifndef RAVEN_MEMORY_SEARCH_HPP
#define RAVEN_MEMORY_SEARCH_HPP

#include "raven/memory/ray_store.hpp"
#include "raven/memory/voxel_map.hpp"

#include <span>
#include <string>
#include <vector>

namespace raven {

struct Query {
  std::string name;
  Embedding vector;
};

/// Occupied cells whose mean feature beats eps against some query (strict >).
/// Sorted lexicographically.
std::vector<GridIndex> query_voxels(const SemanticVoxelMap& mem, std::span<const Query> queries, double eps);

struct VoxelCluster {
  std::vector<GridIndex> cells;  // lexicographic
  GridIndex min_cell;
  GridIndex max_cell;
  /// Box [min_cell, max_cell + 1) in world units.
  Vec3 bbox_min() const { return to_vec(min_cell); }
  Vec3 bbox_max() const { return to_vec(max_cell) + Vec3::Ones(); }
  Vec3 center() const { return 0.5 * (bbox_min() + bbox_max()); }
  std::size_t size() const { return cells.size(); }
};

/// 26-connected components of `filtered` with at least tau_min cells, sorted by
/// size descending then by lexicographic min cell.
std::vector<VoxelCluster> cluster_voxels(std::span<const GridIndex> filtered, int tau_min);

/// Rays whose best query similarity reaches eps (inclusive). Store order is kept.
std::vector<SemanticRay> query_rays(const RayStore& store, std::span<const Query> queries, double eps);

struct RayBin {
  std::vector<SemanticRay> members;
  Vec3 centroid_dir = Vec3::UnitX();
  Vec3 representative_origin = Vec3::Zero();
  Vec3 direction_sum = Vec3::Zero();
};

struct BinAssignment {
  std::size_t ray = 0;  // index into the sorted valid rays
  std::size_t bin = 0;
  double cos_to_centroid = 1.0;  // against the centroid before the update
  bool seeded = false;
};

struct BinningResult {
  std::vector<RayBin> bins;
  std::vector<BinAssignment> log;
  std::vector<SemanticRay> ordered;  // valid rays in binning order
  std::size_t dropped_invalid = 0;
};

/// Horizontal-plane check that the ray points away from the robot:
/// d . (o + d - p) > 0 over xy.
bool ray_forward_valid(const SemanticRay& ray, const Pose& cur);

BinningResult bin_rays(std::span<const SemanticRay> filtered, const Pose& cur, double theta_deg);

double bin_score(const RayBin& bin, std::size_t max_size, const Pose& cur, double alpha, double beta);

/// Index of the best bin under alpha * 1/(1 + dist) + beta * |B| / max|B|.
std::size_t best_bin(std::span<const RayBin> bins, const Pose& cur, double alpha, double beta);
const RayBin& score_bins(std::span<const RayBin> bins, const Pose& cur, double alpha, double beta);

}  // namespace raven

#endif  // RAVEN_MEMORY_SEARCH_HPP
