#ifndef RAVEN_CORE_TEXT_HPP
#define RAVEN_CORE_TEXT_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace raven::text {

/// Shortest round-trip decimal form of `v` ("-0" is printed as "0").
std::string fmt(double v);

std::string trim(std::string_view s);
std::string lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
/// Splits on runs of spaces/tabs.
std::vector<std::string> tokens(std::string_view s);

/// Strict full-string numeric parses; return false on any trailing garbage.
bool parse_int(std::string_view s, long long& out);
bool parse_double(std::string_view s, double& out);

}  // namespace raven::text

#endif  // RAVEN_CORE_TEXT_HPP
