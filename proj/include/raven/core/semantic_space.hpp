#ifndef RAVEN_CORE_SEMANTIC_SPACE_HPP
#define RAVEN_CORE_SEMANTIC_SPACE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace raven {

using Embedding = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Class label emitted for occupied cells that belong to no semantic object.
inline constexpr std::string_view kBackgroundClass = "background";

struct SemanticSpaceConfig {
  int dimension = 64;
  /// Expected norm of the additive observation noise before renormalization.
  double noise_sigma = 0.05;
  double max_cross_sim = 0.6;
  std::uint64_t seed = 0;
  int max_retries = 10000;
};

class SemanticSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a, stable across platforms and runs.
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0);

/// Synthetic open-vocabulary embedding space.
///
/// Every class name maps to a canonical unit vector drawn from a generator keyed by
/// hash(seed, name), so the vector for a name does not depend on which other names
/// were encoded first. A candidate is rejected (and the next draw for the same key
/// taken) while its cosine with any cached vector exceeds `max_cross_sim`.
class SemanticSpace {
 public:
  explicit SemanticSpace(SemanticSpaceConfig cfg = {});

  SemanticSpace(const SemanticSpace& other);
  SemanticSpace& operator=(const SemanticSpace&) = delete;

  const SemanticSpaceConfig& config() const { return cfg_; }
  int dimension() const { return cfg_.dimension; }

  /// Canonical vector of `name`. Thread-safe.
  Embedding encode(std::string_view name) const;

  /// Canonical vector plus isotropic Gaussian noise, renormalized.
  Embedding observe(std::string_view name, Rng& rng) const;

  std::size_t cached_classes() const;

 private:
  SemanticSpaceConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Embedding, std::less<>> cache_;
};

/// Normalize in place; throws on a zero vector.
void normalize_embedding(Embedding& v);

}  // namespace raven

#endif  // RAVEN_CORE_SEMANTIC_SPACE_HPP
