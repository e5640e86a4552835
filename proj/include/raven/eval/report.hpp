#ifndef RAVEN_EVAL_REPORT_HPP
#define RAVEN_EVAL_REPORT_HPP

#include "raven/eval/metrics.hpp"

#include <map>
#include <string>

namespace raven {

/// Free-form key/value header written as the first behavior log record.
using RunHeader = std::map<std::string, std::string>;

/// Single JSON document: outcome, metrics and reach events.
std::string episode_summary_json(const EpisodeResult& result, const EpisodeMetrics& metrics,
                                 const std::string& policy, std::uint64_t seed, const Scenario& scenario);
/// One {"tick", "position", "heading"} record per line.
std::string trajectory_jsonl(const EpisodeResult& result);
/// Header record, then one record per tick.
std::string behavior_log_jsonl(const EpisodeResult& result, const RunHeader& header);

/// Top-down view of the run: objects, goals, and the path colored by behavior.
std::string trajectory_svg(const EpisodeResult& result, const Scenario& scenario);

}  // namespace raven

#endif  // RAVEN_EVAL_REPORT_HPP
