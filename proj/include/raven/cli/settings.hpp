#ifndef RAVEN_CLI_SETTINGS_HPP
#define RAVEN_CLI_SETTINGS_HPP

#include "raven/eval/episode.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace raven {

/// Bad configuration input: unknown key, unparsable or out-of-domain value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every tunable of an episode under one flat key space.
struct RunSettings {
  BehaviorConfig behavior;
  SensorConfig sensor;
  NavConfig nav;
  SemanticSpaceConfig space;

  /// Sets one field from text. Throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  /// Field-domain checks of all parts; ConfigError on failure.
  void validate() const;
  /// Sorted "key = value" lines for every field.
  std::string dump() const;

  static const std::vector<std::string>& keys();
};

/// "key=value" (spaces around '=' allowed). Throws ConfigError.
std::pair<std::string, std::string> split_assignment(std::string_view text);

/// Applies a config file body of "key = value" lines ('#' comments).
void apply_config_text(RunSettings& settings, std::string_view text);

}  // namespace raven

#endif  // RAVEN_CLI_SETTINGS_HPP
