#ifndef RAVEN_EVAL_METRICS_HPP
#define RAVEN_EVAL_METRICS_HPP

#include "raven/eval/episode.hpp"

#include <vector>

namespace raven {

/// Shortest free-space distances (26-connected, Euclidean steps, ground truth)
/// between the start cell and the r_succ-dilated boxes of the goals. Infinity
/// marks an unreachable pair.
struct GoalDistances {
  std::vector<int> goal_ids;
  std::vector<double> from_start;
  std::vector<std::vector<double>> between;
};

/// Free cells whose centers lie within r_succ of the object's box.
std::vector<GridIndex> dilated_region(const WorldModel& world, const SemanticObject& obj, double r_succ);

GoalDistances goal_distances(const WorldModel& world, const Vec3& start,
                             const std::vector<const SemanticObject*>& goals, double r_succ);

/// Minimum over ordered K-subsets of start -> g1 -> ... -> gK. Throws
/// std::runtime_error if every subset contains an unreachable leg.
double optimal_visit_length(const GoalDistances& d, int k);
double optimal_visit_length(const WorldModel& world, const Vec3& start,
                            const std::vector<const SemanticObject*>& goals, int k, double r_succ);

struct EpisodeMetrics {
  int reached = 0;  // K
  int total = 0;    // M
  double progress = 0.0;
  double ppl = 0.0;
  double optimal_length = 0.0;  // d_K, 0 when K = 0
  double path_at_kth = 0.0;     // p
};

double progress(const EpisodeResult& result, const Scenario& scenario);
/// Pass precomputed distances to skip the searches.
EpisodeMetrics compute_metrics(const EpisodeResult& result, const Scenario& scenario,
                               const GoalDistances* distances = nullptr);
double ppl(const EpisodeResult& result, const Scenario& scenario, const GoalDistances* distances = nullptr);

}  // namespace raven

#endif  // RAVEN_EVAL_METRICS_HPP
