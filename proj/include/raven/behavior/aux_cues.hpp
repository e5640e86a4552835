#ifndef RAVEN_BEHAVIOR_AUX_CUES_HPP
#define RAVEN_BEHAVIOR_AUX_CUES_HPP

#include "raven/world/cooccurrence.hpp"

#include <string>
#include <vector>

namespace raven {

/// Source of auxiliary classes likely to sit near the targets. Implementations must
/// be safe to call from several episodes at once.
class AuxCueProvider {
 public:
  virtual ~AuxCueProvider() = default;
  /// At most `count` class names drawn from `palette`, never one of `targets`.
  virtual std::vector<std::string> suggest(const std::vector<std::string>& targets,
                                           const std::vector<std::string>& palette, int count) const = 0;
};

/// Table lookup: the first target (in the given order) with a row supplies the cues.
class CooccurrenceOracle final : public AuxCueProvider {
 public:
  explicit CooccurrenceOracle(CooccurrenceTable table) : table_(std::move(table)) {}

  std::vector<std::string> suggest(const std::vector<std::string>& targets,
                                   const std::vector<std::string>& palette, int count) const override;

  const CooccurrenceTable& table() const { return table_; }

 private:
  CooccurrenceTable table_;
};

}  // namespace raven

#endif  // RAVEN_BEHAVIOR_AUX_CUES_HPP
