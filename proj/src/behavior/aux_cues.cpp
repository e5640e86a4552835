#include "raven/behavior/aux_cues.hpp"

#include <algorithm>

namespace raven {

std::vector<std::string> CooccurrenceOracle::suggest(const std::vector<std::string>& targets,
                                                     const std::vector<std::string>& palette, int count) const {
  std::vector<std::string> out;
  auto has = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  for (const std::string& t : targets) {
    const auto* row = table_.row(t);
    if (!row) continue;
    for (const std::string& aux : *row) {
      if (int(out.size()) >= count) break;
      if (has(targets, aux) || !has(palette, aux) || has(out, aux)) continue;
      out.push_back(aux);
    }
    break;
  }
  return out;
}

}  // namespace raven
