#include "raven/eval/report.hpp"

#include "raven/core/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace raven {

namespace {

using nlohmann::ordered_json;

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

const char* behavior_color(const Behavior* b) {
  if (!b) return "#888888";
  switch (*b) {
    case Behavior::VoxelSearch: return "#d62728";
    case Behavior::RaySearch: return "#1f77b4";
    case Behavior::AuxSearch: return "#9467bd";
    case Behavior::FrontierExplore: return "#2ca02c";
  }
  return "#888888";
}

}  // namespace

std::string episode_summary_json(const EpisodeResult& result, const EpisodeMetrics& metrics,
                                 const std::string& policy, std::uint64_t seed, const Scenario& scenario) {
  ordered_json j;
  j["policy"] = policy;
  j["seed"] = seed;
  j["task_type"] = to_string(scenario.task.kind);
  j["terminated_by"] = to_string(result.terminated_by);
  j["steps"] = result.steps;
  j["path_length"] = result.path_length;
  j["goals_total"] = metrics.total;
  j["goals_reached"] = metrics.reached;
  j["progress"] = metrics.progress;
  j["ppl"] = metrics.ppl;
  j["optimal_length"] = metrics.optimal_length;
  j["path_at_last_reach"] = metrics.path_at_kth;
  j["path_length_convention"] = "includes the initial ascent";
  ordered_json events = ordered_json::array();
  for (const ReachEvent& e : result.reach_events)
    events.push_back({{"tick", e.tick}, {"goal_id", e.goal_id}, {"path_length", e.path_length}});
  j["reach_events"] = events;
  if (result.audit) {
    j["audit"] = {{"frontier_rescans", result.audit->frontier_rescans},
                  {"occupancy_checks", result.audit->occupancy_checks},
                  {"bin_checks", result.audit->bin_checks},
                  {"visited_checks", result.audit->visited_checks},
                  {"failures", result.audit->failures}};
  }
  return j.dump(2) + "\n";
}

std::string trajectory_jsonl(const EpisodeResult& result) {
  std::ostringstream os;
  for (const TrajectoryPoint& p : result.trajectory) {
    ordered_json j;
    j["tick"] = p.tick;
    j["position"] = vec_json(p.pose.position);
    j["heading"] = vec_json(p.pose.heading);
    os << j.dump() << '\n';
  }
  return os.str();
}

std::string behavior_log_jsonl(const EpisodeResult& result, const RunHeader& header) {
  std::ostringstream os;
  ordered_json h;
  h["type"] = "header";
  for (const auto& [k, v] : header) h[k] = v;
  os << h.dump() << '\n';
  for (const BehaviorRecord& r : result.behavior_log) {
    ordered_json j;
    j["step"] = r.tick;
    j["behavior"] = r.behavior ? ordered_json(to_string(*r.behavior)) : ordered_json(nullptr);
    j["waypoint"] = r.waypoint ? vec_json(*r.waypoint) : ordered_json(nullptr);
    j["issued"] = r.issued;
    j["queries"] = r.queries;
    os << j.dump() << '\n';
  }
  return os.str();
}

std::string trajectory_svg(const EpisodeResult& result, const Scenario& scenario) {
  const GridBounds& b = scenario.world.bounds();
  const double scale = 4.0;
  const double w = b.nx * scale, h = b.ny * scale;
  auto X = [&](double x) { return text::fmt(x * scale); };
  auto Y = [&](double y) { return text::fmt(h - y * scale); };  // y up

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << text::fmt(w) << "\" height=\"" << text::fmt(h)
     << "\" viewBox=\"0 0 " << text::fmt(w) << ' ' << text::fmt(h) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  const auto goals = goal_instances(scenario.task, scenario.world);
  for (const SemanticObject& o : scenario.world.objects()) {
    const bool goal = std::find(goals.begin(), goals.end(), &o) != goals.end();
    os << "<rect x=\"" << X(o.lo().x()) << "\" y=\"" << Y(o.hi().y()) << "\" width=\""
       << text::fmt((o.hi().x() - o.lo().x()) * scale) << "\" height=\"" << text::fmt((o.hi().y() - o.lo().y()) * scale)
       << "\" fill=\"" << (goal ? "#ffbf00" : "#cccccc") << "\" stroke=\"#444444\"><title>" << o.id << ' '
       << o.class_name << "</title></rect>\n";
  }
  // tick -> behavior in charge
  std::map<int, std::optional<Behavior>> tag;
  for (const BehaviorRecord& r : result.behavior_log) tag[r.tick] = r.behavior;
  for (std::size_t i = 1; i < result.trajectory.size(); ++i) {
    const Vec3& a = result.trajectory[i - 1].pose.position;
    const Vec3& c = result.trajectory[i].pose.position;
    auto it = tag.find(result.trajectory[i].tick);
    const Behavior* beh = it != tag.end() && it->second ? &*it->second : nullptr;
    os << "<line x1=\"" << X(a.x()) << "\" y1=\"" << Y(a.y()) << "\" x2=\"" << X(c.x()) << "\" y2=\"" << Y(c.y())
       << "\" stroke=\"" << behavior_color(beh) << "\" stroke-width=\"2\"/>\n";
  }
  const Vec3& s = scenario.start.position;
  os << "<circle cx=\"" << X(s.x()) << "\" cy=\"" << Y(s.y()) << "\" r=\"5\" fill=\"#000000\"/>\n";
  int row = 0;
  for (auto b2 : {Behavior::VoxelSearch, Behavior::RaySearch, Behavior::AuxSearch, Behavior::FrontierExplore}) {
    os << "<text x=\"8\" y=\"" << 16 + 16 * row++ << "\" font-family=\"monospace\" font-size=\"12\" fill=\""
       << behavior_color(&b2) << "\">" << to_string(b2) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace raven
