#include "raven/world/cooccurrence.hpp"

#include "raven/core/text.hpp"
#include "raven/world/scenario.hpp"

#include <fstream>
#include <sstream>

namespace raven {

CooccurrenceTable parse_cooccurrence(std::string_view textIn) {
  CooccurrenceTable table;
  std::istringstream in{std::string(textIn)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = text::trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto colon = body.find(':');
    if (colon == std::string::npos) throw ParseError(line, "expected 'target: aux1, aux2, ...'");
    const std::string target = text::lower(text::trim(body.substr(0, colon)));
    if (target.empty()) throw ParseError(line, "empty target class");
    if (table.rows.count(target)) throw ParseError(line, "duplicate row for '" + target + "'");
    std::vector<std::string> aux;
    for (auto& a : text::split(body.substr(colon + 1), ',')) {
      if (a.empty()) throw ParseError(line, "empty auxiliary class");
      aux.push_back(text::lower(a));
    }
    table.rows.emplace(target, std::move(aux));
  }
  return table;
}

CooccurrenceTable load_cooccurrence_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open co-occurrence table '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cooccurrence(ss.str());
}

std::string format_cooccurrence(const CooccurrenceTable& table) {
  std::string out;
  for (const auto& [target, aux] : table.rows) {
    out += target + ":";
    for (std::size_t n = 0; n < aux.size(); ++n) out += (n ? ", " : " ") + aux[n];
    out += "\n";
  }
  return out;
}

const CooccurrenceTable& default_cooccurrence() {
  static const CooccurrenceTable table = parse_cooccurrence(
      "bankomat: sidewalk, building, street\n"
      "bus stop: street, sidewalk, billboard\n"
      "cafe table: sidewalk, building, street\n"
      "fire hydrant: sidewalk, street, building\n"
      "fuel tank: pipe rack, warehouse, street\n"
      "helicopter: helipad, hangar, street\n"
      "house: street, garden, sidewalk\n"
      "radio tower: antenna mast, warehouse, street\n"
      "water tower: warehouse, pipe rack, street\n");
  return table;
}

}  // namespace raven
