#ifndef RAVEN_WORLD_COOCCURRENCE_HPP
#define RAVEN_WORLD_COOCCURRENCE_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace raven {

/// Target class -> ordered auxiliary classes that tend to appear near it.
/// Text form: one "target: aux1, aux2, aux3" line per row; '#' starts a comment.
struct CooccurrenceTable {
  std::map<std::string, std::vector<std::string>> rows;

  const std::vector<std::string>* row(const std::string& target) const {
    auto it = rows.find(target);
    return it == rows.end() ? nullptr : &it->second;
  }

  friend bool operator==(const CooccurrenceTable&, const CooccurrenceTable&) = default;
};

/// Throws ParseError with the offending line number.
CooccurrenceTable parse_cooccurrence(std::string_view text);
CooccurrenceTable load_cooccurrence_file(const std::string& path);
std::string format_cooccurrence(const CooccurrenceTable& table);

/// Rows covering the built-in generator palette.
const CooccurrenceTable& default_cooccurrence();

}  // namespace raven

#endif  // RAVEN_WORLD_COOCCURRENCE_HPP
