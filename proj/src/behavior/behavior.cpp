#include "raven/behavior/behavior.hpp"

#include "raven/behavior/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace raven {

std::string to_string(Behavior b) {
  switch (b) {
    case Behavior::VoxelSearch: return "VoxelSearch";
    case Behavior::RaySearch: return "RaySearch";
    case Behavior::AuxSearch: return "AuxSearch";
    case Behavior::FrontierExplore: return "FrontierExplore";
  }
  return "?";
}

void BehaviorConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  auto cosine_threshold = [](double v, const char* name) {
    if (!(v > -1.0 && v < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (-1, 1)");
  };
  cosine_threshold(epsilon_vox, "epsilon_vox");
  cosine_threshold(epsilon_ray, "epsilon_ray");
  if (tau_min < 1) throw std::invalid_argument("tau_min must be >= 1");
  positive(omega, "omega");
  if (!(theta_deg > 0.0 && theta_deg < 180.0)) throw std::invalid_argument("theta_deg must lie in (0, 180)");
  positive(alpha, "alpha");
  positive(beta, "beta");
  positive(omega_ray, "omega_ray");
  if (t_aux_steps < 1) throw std::invalid_argument("t_aux_steps must be >= 1");
  if (j_aux < 1) throw std::invalid_argument("j_aux must be >= 1");
  positive(z_thresh, "z_thresh");
  positive(dbscan_eps, "dbscan_eps");
  if (dbscan_min_samples < 1) throw std::invalid_argument("dbscan_min_samples must be >= 1");
  positive(alpha_dist, "alpha_dist");
  positive(alpha_head, "alpha_head");
  positive(ascend_height, "ascend_height");
  if (blacklist_ticks < 1) throw std::invalid_argument("blacklist_ticks must be >= 1");
  positive(blacklist_radius, "blacklist_radius");
}

bool ClusterFingerprint::overlaps(const ClusterFingerprint& o) const {
  return lo.i <= o.hi.i && o.lo.i <= hi.i && lo.j <= o.hi.j && o.lo.j <= hi.j && lo.k <= o.hi.k && o.lo.k <= hi.k;
}

bool BehaviorState::is_visited(const ClusterFingerprint& fp) const {
  return std::any_of(visited_clusters.begin(), visited_clusters.end(),
                     [&](const ClusterFingerprint& v) { return v.overlaps(fp); });
}

void BehaviorState::mark_visited(const ClusterFingerprint& fp) {
  if (std::find(visited_clusters.begin(), visited_clusters.end(), fp) == visited_clusters.end())
    visited_clusters.push_back(fp);
}

bool BehaviorState::is_blacklisted(const Vec3& p, double radius) const {
  return std::any_of(blacklist.begin(), blacklist.end(), [&](const BlacklistEntry& e) {
    return !e.cluster && e.until > step_clock && (e.point - p).norm() <= radius;
  });
}

bool BehaviorState::is_blacklisted(const ClusterFingerprint& fp) const {
  return std::any_of(blacklist.begin(), blacklist.end(), [&](const BlacklistEntry& e) {
    return e.cluster && e.until > step_clock && e.cluster->overlaps(fp);
  });
}

void BehaviorState::add_blacklist(const Waypoint& w, int ticks) {
  blacklist.push_back({w.point, w.cluster, step_clock + ticks});
}

void BehaviorState::expire_blacklist() {
  std::erase_if(blacklist, [&](const BlacklistEntry& e) { return e.until <= step_clock; });
}

std::vector<Query> make_queries(const SemanticSpace& space, const std::vector<std::string>& names) {
  std::vector<Query> out;
  out.reserve(names.size());
  for (const std::string& n : names) out.push_back({n, space.encode(n)});
  return out;
}

Vec3 ray_box_intersect(const Vec3& origin, const Vec3& box_center, const Vec3& box_size) {
  if ((box_size.array() <= 0.0).any()) throw std::invalid_argument("ray_box_intersect: degenerate box");
  const Vec3 lo = box_center - 0.5 * box_size;
  const Vec3 hi = box_center + 0.5 * box_size;
  if ((origin.array() >= lo.array()).all() && (origin.array() <= hi.array()).all()) return origin;
  const Vec3 d = box_center - origin;
  double t_enter = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (d(a) == 0.0) continue;  // origin lies within this slab, since the center does
    const double t1 = (lo(a) - origin(a)) / d(a);
    const double t2 = (hi(a) - origin(a)) / d(a);
    t_enter = std::max(t_enter, std::min(t1, t2));
  }
  return origin + t_enter * d;
}

namespace {

Vec3 clamp_to(const GridBounds& b, const Vec3& p) { return b.clamp(p); }

bool better(double score, const Vec3& p, double best_score, const std::optional<Vec3>& best) {
  if (!best) return true;
  if (score != best_score) return score < best_score;
  return lex_less(p, *best);
}

}  // namespace

std::optional<VoxelCandidate> voxel_search(const BehaviorState& state, const SemanticVoxelMap& mem,
                                           const std::vector<Query>& queries, const Pose& pose,
                                           const BehaviorConfig& cfg) {
  if (queries.empty()) return std::nullopt;
  const std::vector<GridIndex> filtered = query_voxels(mem, queries, cfg.epsilon_vox);
  if (filtered.empty()) return std::nullopt;
  std::optional<Vec3> best_center;
  double best_d = 0.0;
  const VoxelCluster* best = nullptr;
  const auto clusters = cluster_voxels(filtered, cfg.tau_min);
  for (const VoxelCluster& c : clusters) {
    const ClusterFingerprint fp = ClusterFingerprint::of(c);
    if (state.is_visited(fp) || state.is_blacklisted(fp)) continue;
    const double d = (c.center() - pose.position).norm();
    if (better(d, c.center(), best_d, best_center)) {
      best_center = c.center();
      best_d = d;
      best = &c;
    }
  }
  if (!best) return std::nullopt;
  const Vec3 center = best->center();
  const Vec3 size = best->bbox_max() - best->bbox_min();
  Vec3 wp = pose.position;
  if ((center - pose.position).norm() > 0.0) {
    const Vec3 surf = ray_box_intersect(pose.position, center, size);
    if (surf != pose.position) wp = surf - cfg.omega * (center - pose.position).normalized();
  }
  return VoxelCandidate{clamp_to(mem.bounds(), wp), ClusterFingerprint::of(*best)};
}

std::optional<Vec3> ray_search(const BehaviorState& state, const RayStore& rays, const std::vector<Query>& queries,
                               const Pose& pose, const GridBounds& bounds, const BehaviorConfig& cfg) {
  if (queries.empty()) return std::nullopt;
  const std::vector<SemanticRay> matched = query_rays(rays, queries, cfg.epsilon_ray);
  if (matched.empty()) return std::nullopt;
  const BinningResult binned = bin_rays(matched, pose, cfg.theta_deg);
  std::vector<RayBin> usable;
  std::vector<Vec3> waypoints;
  for (const RayBin& b : binned.bins) {
    const Vec3 wp = clamp_to(bounds, b.representative_origin + b.centroid_dir * cfg.omega_ray);
    if (state.is_blacklisted(wp, cfg.blacklist_radius)) continue;
    if ((wp - pose.position).norm() < cfg.blacklist_radius) continue;
    usable.push_back(b);
    waypoints.push_back(wp);
  }
  if (usable.empty()) return std::nullopt;
  return waypoints[best_bin(usable, pose, cfg.alpha, cfg.beta)];
}

std::optional<Vec3> aux_search(BehaviorState& state, const BehaviorContext& ctx, const BehaviorConfig& cfg,
                               const AuxCueProvider& provider) {
  if (state.step_clock - state.last_aux_step < cfg.t_aux_steps) return std::nullopt;
  state.last_aux_step = state.step_clock;
  const auto active = active_queries(ctx.task, ctx.progress);
  std::vector<std::string> names(active.begin(), active.end());
  state.aux_queries = provider.suggest(names, ctx.palette, cfg.j_aux);
  if (state.aux_queries.empty()) return std::nullopt;
  names.insert(names.end(), state.aux_queries.begin(), state.aux_queries.end());
  return ray_search(state, ctx.rays, make_queries(ctx.space, names), ctx.pose, ctx.mem.bounds(), cfg);
}

std::vector<GridIndex> filtered_frontier_cells(const SemanticVoxelMap& mem, const BehaviorConfig& cfg) {
  std::vector<GridIndex> out;
  for (const GridIndex& f : mem.frontiers())
    if (cell_center(f).z() > cfg.z_thresh) out.push_back(f);
  return out;
}

std::vector<Vec3> filtered_frontier_points(const SemanticVoxelMap& mem, const BehaviorConfig& cfg) {
  std::vector<Vec3> pts;
  for (const GridIndex& f : filtered_frontier_cells(mem, cfg)) pts.push_back(cell_center(f));
  return pts;
}

std::vector<Vec3> frontier_candidates(const SemanticVoxelMap& mem, const BehaviorConfig& cfg) {
  const std::vector<GridIndex> cells = filtered_frontier_cells(mem, cfg);
  std::vector<Vec3> pts;
  pts.reserve(cells.size());
  for (const GridIndex& c : cells) pts.push_back(cell_center(c));
  if (cells.empty()) return pts;
  const std::vector<int> labels = dbscan_cells(cells, mem.bounds(), cfg.dbscan_eps, cfg.dbscan_min_samples);
  const int n_clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  if (n_clusters == 0) return pts;

  std::vector<Vec3> sum(std::size_t(n_clusters), Vec3::Zero());
  std::vector<int> count(std::size_t(n_clusters), 0);
  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    if (labels[idx] < 0) continue;
    sum[labels[idx]] += pts[idx];
    ++count[labels[idx]];
  }
  // snap each centroid onto its closest member so the goal is a real frontier cell
  std::vector<double> best_d(std::size_t(n_clusters), std::numeric_limits<double>::infinity());
  std::vector<Vec3> candidates(std::size_t(n_clusters), Vec3::Zero());
  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    const int l = labels[idx];
    if (l < 0) continue;
    const double d = (pts[idx] - sum[l] / count[l]).squaredNorm();
    if (d < best_d[l]) {
      best_d[l] = d;
      candidates[l] = pts[idx];
    }
  }
  return candidates;
}

std::optional<Vec3> frontier_explore(const BehaviorState& state, const SemanticVoxelMap& mem, const Pose& pose,
                                     const BehaviorConfig& cfg) {
  FrontierCandidateCache& cache = state.frontier_cache;
  if (cache.map != &mem || cache.version != mem.frontier_version() || cache.z_thresh != cfg.z_thresh ||
      cache.eps != cfg.dbscan_eps || cache.min_samples != cfg.dbscan_min_samples) {
    cache.candidates = frontier_candidates(mem, cfg);
    cache.map = &mem;
    cache.version = mem.frontier_version();
    cache.z_thresh = cfg.z_thresh;
    cache.eps = cfg.dbscan_eps;
    cache.min_samples = cfg.dbscan_min_samples;
    ++cache.misses;
  } else {
    ++cache.hits;
  }
  const std::vector<Vec3>& candidates = cache.candidates;
  if (candidates.empty()) return std::nullopt;

  std::optional<Vec3> best;
  double best_score = 0.0;
  for (const Vec3& c : candidates) {
    const Vec3 to = c - pose.position;
    const double dist = to.norm();
    if (dist < cfg.blacklist_radius || state.is_blacklisted(c, cfg.blacklist_radius)) continue;
    const double head = 1.0 - pose.heading.dot(to / dist);
    const double score = cfg.alpha_dist * dist + cfg.alpha_head * head;
    if (better(score, c, best_score, best)) {
      best = c;
      best_score = score;
    }
  }
  return best;
}

std::optional<Vec3> semantic_frontier(const BehaviorState& state, const SemanticVoxelMap& mem,
                                      const std::vector<Query>& queries, const Pose& pose,
                                      const BehaviorConfig& cfg) {
  if (queries.empty()) return std::nullopt;
  std::optional<Vec3> best;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (const GridIndex& f : mem.frontiers()) {
    const Vec3 p = cell_center(f);
    if (p.z() <= cfg.z_thresh) continue;
    const auto feat = mem.frontier_feature(f);
    if (!feat) continue;
    if ((p - pose.position).norm() < cfg.blacklist_radius || state.is_blacklisted(p, cfg.blacklist_radius)) continue;
    double sim = -std::numeric_limits<double>::infinity();
    for (const Query& q : queries) sim = std::max(sim, cosine_similarity(*feat, q.vector));
    if (sim > best_sim) {
      best_sim = sim;
      best = p;
    }
  }
  return best;
}

InitPlan initialize(const Pose& start, const WorldModel& world, const BehaviorConfig& cfg,
                    const SensorConfig& sensor) {
  const GridBounds& b = world.bounds();
  const GridIndex s = cell_of(start.position);
  if (!b.contains(s) || world.occupied(s)) throw std::runtime_error("initialize: start cell is not free");
  const int rise = static_cast<int>(std::lround(cfg.ascend_height));
  for (int extra = 0; extra <= 5; ++extra) {
    const int top = s.k + rise + extra;
    if (top >= b.nz) break;
    bool clear = true;
    for (int k = s.k + 1; k <= top && clear; ++k) clear = !world.occupied({s.i, s.j, k});
    if (!clear) continue;
    InitPlan plan;
    for (int k = s.k + 1; k <= top; ++k) plan.ascent.push_back(start.position + Vec3(0, 0, k - s.k));
    plan.pose = start;
    plan.pose.position = start.position + Vec3(0, 0, top - s.k);
    plan.sweep_views = static_cast<int>(std::ceil(360.0 / sensor.h_fov_deg - 1e-9)) + 1;
    return plan;
  }
  throw std::runtime_error("initialize: no free cell within 5 cells above the ascent target");
}

std::optional<TickDecision> tick(BehaviorState& state, const BehaviorContext& ctx, const BehaviorConfig& cfg,
                                 const AuxCueProvider& provider, const BranchSet& branches) {
  state.expire_blacklist();
  const auto active = active_queries(ctx.task, ctx.progress);
  const std::vector<std::string> names(active.begin(), active.end());
  const std::vector<Query> queries = make_queries(ctx.space, names);

  TickDecision d;
  d.queries = names;
  auto emit = [&](Behavior b, const Vec3& p, std::optional<ClusterFingerprint> fp = std::nullopt) {
    d.behavior = b;
    d.waypoint = {p, b, fp};
    state.current_waypoint = d.waypoint;
    return std::optional<TickDecision>(d);
  };

  if (branches.voxel) {
    if (auto v = voxel_search(state, ctx.mem, queries, ctx.pose, cfg)) return emit(Behavior::VoxelSearch, v->waypoint, v->cluster);
  }
  if (branches.ray) {
    if (auto r = ray_search(state, ctx.rays, queries, ctx.pose, ctx.mem.bounds(), cfg)) return emit(Behavior::RaySearch, *r);
  }
  if (branches.aux) {
    if (auto a = aux_search(state, ctx, cfg, provider)) {
      d.queries.insert(d.queries.end(), state.aux_queries.begin(), state.aux_queries.end());
      return emit(Behavior::AuxSearch, *a);
    }
  }
  if (branches.frontier) {
    std::optional<Vec3> f;
    if (branches.semantic_frontier) f = semantic_frontier(state, ctx.mem, queries, ctx.pose, cfg);
    if (!f) f = frontier_explore(state, ctx.mem, ctx.pose, cfg);
    if (f) return emit(Behavior::FrontierExplore, *f);
  }
  state.current_waypoint.reset();
  return std::nullopt;
}

}  // namespace raven
