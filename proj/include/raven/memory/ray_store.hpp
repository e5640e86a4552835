#ifndef RAVEN_MEMORY_RAY_STORE_HPP
#define RAVEN_MEMORY_RAY_STORE_HPP

#include "raven/core/geometry.hpp"
#include "raven/core/semantic_space.hpp"

#include <cstddef>
#include <vector>

namespace raven {

/// A bearing to semantics seen beyond the depth limit, anchored at the edge of known space.
struct SemanticRay {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  Embedding feature;
  int birth_step = 0;
  // merge bookkeeping
  Embedding feature_sum;
  int count = 1;
};

class RayStore {
 public:
  explicit RayStore(double merge_angle_deg = 10.0, double merge_radius = 2.0);

  const std::vector<SemanticRay>& rays() const { return rays_; }
  std::size_t size() const { return rays_.size(); }
  bool empty() const { return rays_.empty(); }
  double merge_angle_deg() const { return merge_angle_deg_; }
  double merge_radius() const { return merge_radius_; }

  /// Merges into the first near-duplicate (origin within merge_radius and direction
  /// within merge_angle), averaging features; otherwise appends. Returns the index.
  std::size_t add(SemanticRay ray);

  /// Removes every ray for which pred(ray) holds, keeping order. Returns how many.
  template <typename Pred>
  std::size_t prune_if(Pred pred) {
    const std::size_t before = rays_.size();
    std::erase_if(rays_, pred);
    return before - rays_.size();
  }

  bool near_duplicate(const SemanticRay& a, const SemanticRay& b) const;
  /// True when no pair of stored rays is a near-duplicate.
  bool invariant_holds() const;

 private:
  double merge_angle_deg_;
  double merge_radius_;
  double cos_merge_;
  std::vector<SemanticRay> rays_;
};

}  // namespace raven

#endif  // RAVEN_MEMORY_RAY_STORE_HPP
