#include "raven/memory/ray_store.hpp"

#include <cmath>
#include <stdexcept>

namespace raven {

RayStore::RayStore(double merge_angle_deg, double merge_radius)
    : merge_angle_deg_(merge_angle_deg),
      merge_radius_(merge_radius),
      cos_merge_(std::cos(deg2rad(merge_angle_deg))) {
  if (!(merge_angle_deg >= 0.0 && merge_angle_deg < 180.0)) throw std::invalid_argument("merge_angle must lie in [0, 180)");
  if (!(merge_radius >= 0.0)) throw std::invalid_argument("merge_radius must be non-negative");
}

bool RayStore::near_duplicate(const SemanticRay& a, const SemanticRay& b) const {
  if ((a.origin - b.origin).norm() > merge_radius_) return false;
  return a.direction.dot(b.direction) >= cos_merge_ - 1e-12;
}

std::size_t RayStore::add(SemanticRay ray) {
  const double n = ray.direction.norm();
  if (!(n > 0.0)) throw std::invalid_argument("ray direction must be nonzero");
  ray.direction /= n;
  normalize_embedding(ray.feature);
  for (std::size_t idx = 0; idx < rays_.size(); ++idx) {
    SemanticRay& r = rays_[idx];
    if (!near_duplicate(r, ray)) continue;
    r.feature_sum += ray.feature;
    ++r.count;
    r.feature = r.feature_sum / double(r.count);
    normalize_embedding(r.feature);
    return idx;
  }
  ray.feature_sum = ray.feature;
  ray.count = 1;
  rays_.push_back(std::move(ray));
  return rays_.size() - 1;
}

bool RayStore::invariant_holds() const {
  for (std::size_t a = 0; a < rays_.size(); ++a)
    for (std::size_t b = a + 1; b < rays_.size(); ++b)
      if (near_duplicate(rays_[a], rays_[b])) return false;
  return true;
}

}  // namespace raven
