#ifndef RAVEN_CLI_COMMANDS_HPP
#define RAVEN_CLI_COMMANDS_HPP

#include "raven/eval/benchmark.hpp"
#include "raven/world/cooccurrence.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace raven {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitEpisode = 2;
inline constexpr int kExitIo = 3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path);
/// Truncates and writes; parent directories are created.
void write_text_file(const std::string& path, const std::string& body);

/// A suite manifest: "# ravenbench suite v1", then "cooccurrence <file>" (optional,
/// at most once) and "scenario <file>" lines, paths relative to the manifest.
struct SuiteManifest {
  std::optional<std::string> cooccurrence;
  std::vector<std::string> scenarios;
};

SuiteManifest parse_manifest(std::string_view text);
std::string format_manifest(const SuiteManifest& m);

struct LoadedSuite {
  std::vector<SuiteEntry> entries;
  std::optional<CooccurrenceTable> cooccurrence;
};
/// Scenario ids are file stems.
LoadedSuite load_suite(const std::string& manifest_path);

/// Entry point behind the ravenbench binary; args exclude the program name.
/// `env_out` is the value of RAVENBENCH_OUT, if set.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::optional<std::string>& env_out = std::nullopt);

}  // namespace raven

#endif  // RAVEN_CLI_COMMANDS_HPP
