#include "raven/core/semantic_space.hpp"

#include "raven/core/geometry.hpp"

#include <cmath>

namespace raven {

std::uint64_t stable_hash(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void normalize_embedding(Embedding& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw SemanticSpaceError("cannot normalize a zero embedding");
  v /= n;
}

SemanticSpace::SemanticSpace(SemanticSpaceConfig cfg) : cfg_(cfg) {
  if (cfg_.dimension <= 0) throw SemanticSpaceError("embedding dimension must be positive");
  if (cfg_.noise_sigma < 0.0) throw SemanticSpaceError("noise_sigma must be nonnegative");
  if (cfg_.max_cross_sim < -1.0 || cfg_.max_cross_sim > 1.0)
    throw SemanticSpaceError("max_cross_sim must lie in [-1, 1]");
}

SemanticSpace::SemanticSpace(const SemanticSpace& other) : cfg_(other.cfg_) {
  std::lock_guard lock(other.mutex_);
  cache_ = other.cache_;
}

std::size_t SemanticSpace::cached_classes() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

Embedding SemanticSpace::encode(std::string_view name) const {
  if (name.empty()) throw SemanticSpaceError("class name must be nonempty");
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(name); it != cache_.end()) return it->second;

  Rng gen(stable_hash(name, cfg_.seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < cfg_.max_retries; ++attempt) {
    Embedding v(cfg_.dimension);
    for (Eigen::Index r = 0; r < v.size(); ++r) v(r) = normal(gen);
    const double n = v.norm();
    if (!(n > 0.0)) continue;
    v /= n;
    bool ok = true;
    for (const auto& [other, u] : cache_) {
      if (v.dot(u) > cfg_.max_cross_sim) {
        ok = false;
        break;
      }
    }
    if (ok) {
      cache_.emplace(std::string(name), v);
      return v;
    }
  }
  throw SemanticSpaceError("rejection sampling for class '" + std::string(name) +
                           "' exceeded the retry cap; max_cross_sim is infeasible for dimension " +
                           std::to_string(cfg_.dimension));
}

Embedding SemanticSpace::observe(std::string_view name, Rng& rng) const {
  Embedding v = encode(name);
  if (cfg_.noise_sigma == 0.0) return v;
  std::normal_distribution<double> normal(0.0, cfg_.noise_sigma / std::sqrt(double(cfg_.dimension)));
  for (Eigen::Index r = 0; r < v.size(); ++r) v(r) += normal(rng);
  normalize_embedding(v);
  return v;
}

}  // namespace raven
