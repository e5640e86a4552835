#include "raven/eval/episode.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace raven {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Budget: return "budget";
    case Termination::AllGoals: return "all_goals";
    case Termination::Stall: return "stall";
  }
  return "?";
}

std::optional<Termination> termination_from_string(const std::string& s) {
  for (Termination t : {Termination::Budget, Termination::AllGoals, Termination::Stall})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

void probe_neighborhood(SemanticVoxelMap& mem, const WorldModel& world, const Pose& pose) {
  const GridIndex c = cell_of(pose.position);
  std::vector<GridIndex> changed;
  auto touch = [&](GridIndex n) {
    if (!world.bounds().contains(n)) return;
    const bool hit = world.occupied(n) ? mem.mark_occupied(n) : mem.mark_free(n);
    if (hit) changed.push_back(n);
  };
  touch(c);
  for (const GridIndex& d : kAllNeighbors) touch(c + d);
  if (!changed.empty()) mem.update_frontiers(changed);
}

std::vector<std::string> scenario_vocabulary(const Scenario& scenario) {
  std::set<std::string> names;
  for (const std::string& c : scenario.world.class_palette()) names.insert(c);
  for (const std::string& c : scenario.task.all_classes()) names.insert(c);
  names.insert(std::string(kBackgroundClass));
  return {names.begin(), names.end()};
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t scenario_seed) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (scenario_seed + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Episode {
 public:
  Episode(const Scenario& sc, PolicyKind policy, std::uint64_t seed, const EpisodeOptions& opt)
      : sc_(sc),
        opt_(opt),
        branches_(branches_for(policy)),
        space_(opt.space),
        rng_(mix_seed(seed, sc.seed)),
        mem_(sc.world.bounds()),
        store_(),
        state_(opt.behavior),
        palette_(sc.world.class_palette()),
        goals_(goal_instances(sc.task, sc.world)) {
    opt_.behavior.validate();
    opt_.sensor.validate();
    opt_.nav.validate();
    validate_scenario(sc_);
    for (const std::string& n : scenario_vocabulary(sc_)) space_.encode(n);
    provider_ = opt_.provider ? opt_.provider : &default_provider();
    if (opt_.audit) res_.audit.emplace();
  }

  EpisodeResult run() {
    const InitPlan init = initialize(sc_.start, sc_.world, opt_.behavior, opt_.sensor);
    push_pose(0, sc_.start);
    for (const Vec3& p : init.ascent) {
      Pose q = sc_.start;
      q.position = p;
      push_pose(0, q);
    }
    pose_ = init.pose;
    probe_neighborhood(mem_, sc_.world, pose_);
    for (const Observation& obs : panoramic_sense(sc_.world, pose_, opt_.sensor, space_, rng_, init.sweep_views))
      integrate_frame(obs, 0);

    res_.terminated_by = Termination::Budget;
    for (int t = 1; t <= sc_.budget_steps; ++t) {
      state_.step_clock = t;
      res_.steps = t;
      if (t == 1) check_reach_along_init(t);
      if (t % opt_.sensor.integrate_period == 0)
        integrate_frame(sense(sc_.world, pose_, opt_.sensor, space_, rng_), t);
      probe_neighborhood(mem_, sc_.world, pose_);

      BehaviorRecord rec;
      rec.tick = t;
      if (!follower_) {
        if (!choose_waypoint(t, rec)) {
          res_.terminated_by = Termination::Stall;
          res_.behavior_log.push_back(std::move(rec));
          if (opt_.on_tick) opt_.on_tick(t, mem_, store_);
          break;
        }
      }
      if (follower_) move(t);
      if (state_.current_waypoint || last_waypoint_) {
        const Waypoint& w = state_.current_waypoint ? *state_.current_waypoint : *last_waypoint_;
        rec.behavior = w.source;
        rec.waypoint = w.point;
      }
      if (rec.queries.empty()) {
        const auto q = active_queries(sc_.task, progress_);
        rec.queries.assign(q.begin(), q.end());
      }
      res_.behavior_log.push_back(std::move(rec));
      last_waypoint_.reset();

      check_reach(t, pose_, path_length_);
      if (opt_.on_tick) opt_.on_tick(t, mem_, store_);
      if (progress_.reached.size() == goals_.size()) {
        res_.terminated_by = Termination::AllGoals;
        break;
      }
    }
    res_.path_length = path_length_;
    if (res_.audit) final_audit();
    return std::move(res_);
  }

 private:
  static const AuxCueProvider& default_provider() {
    static const CooccurrenceOracle oracle(default_cooccurrence());
    return oracle;
  }

  void push_pose(int tick, const Pose& p) {
    if (!res_.trajectory.empty()) path_length_ += (p.position - res_.trajectory.back().pose.position).norm();
    res_.trajectory.push_back({tick, p});
    if (res_.audit && sc_.world.occupied(cell_of(p.position)))
      fail("collision at tick " + std::to_string(tick));
  }

  void fail(std::string what) {
    if (res_.audit && res_.audit->failures.size() < 50) res_.audit->failures.push_back(std::move(what));
  }

  void integrate_frame(const Observation& obs, int t) {
    std::vector<std::uint8_t> before;
    if (res_.audit) before = mem_.raw_occupancy();
    integrate(mem_, store_, obs, t, opt_.sensor);
    ++integrations_;
    if (!res_.audit) return;
    ++res_.audit->occupancy_checks;
    const auto& after = mem_.raw_occupancy();
    for (std::size_t i = 0; i < after.size(); ++i) {
      if (after[i] < before[i]) {
        fail("occupancy downgraded at tick " + std::to_string(t));
        break;
      }
    }
    if (integrations_ % opt_.audit_rescan_every == 0) rescan(t);
  }

  void rescan(int t) {
    ++res_.audit->frontier_rescans;
    if (mem_.rescan_frontiers() != mem_.frontiers()) fail("frontier set differs from rescan at tick " + std::to_string(t));
  }

  void final_audit() {
    rescan(res_.steps);
    if (!store_.invariant_holds()) fail("ray store holds near-duplicate rays");
    for (std::size_t i = 1; i < res_.reach_events.size(); ++i)
      if (res_.reach_events[i].tick < res_.reach_events[i - 1].tick ||
          res_.reach_events[i].path_length < res_.reach_events[i - 1].path_length)
        fail("reach events out of order");
  }

  BehaviorContext context() const {
    return {mem_, store_, sc_.task, progress_, pose_, space_, palette_};
  }

  void audit_decision(const TickDecision& d, int t) {
    if (!res_.audit) return;
    if (d.behavior == Behavior::VoxelSearch && d.waypoint.cluster) {
      ++res_.audit->visited_checks;
      for (const ClusterFingerprint& v : visited_before_)
        if (v.overlaps(*d.waypoint.cluster)) fail("visited cluster re-selected at tick " + std::to_string(t));
    }
    if (d.behavior == Behavior::RaySearch || d.behavior == Behavior::AuxSearch) {
      ++res_.audit->bin_checks;
      const std::vector<Query> q = make_queries(space_, d.queries);
      const auto matched = query_rays(store_, q, opt_.behavior.epsilon_ray);
      const BinningResult b = bin_rays(matched, pose_, opt_.behavior.theta_deg);
      const double cos_t = std::cos(deg2rad(opt_.behavior.theta_deg));
      for (const BinAssignment& a : b.log)
        if (!a.seeded && a.cos_to_centroid < cos_t - 1e-12) fail("bin assignment outside theta at tick " + std::to_string(t));
    }
  }

  bool choose_waypoint(int t, BehaviorRecord& rec) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const auto d = tick(state_, context(), opt_.behavior, *provider_, branches_);
      if (!d) return false;
      audit_decision(*d, t);
      rec.issued = true;
      rec.queries = d->queries;
      auto path = planner_.plan(mem_, pose_.position, d->waypoint.point, opt_.nav);
      if (path) {
        follower_.emplace(std::move(*path), opt_.nav);
        return true;
      }
      state_.add_blacklist(d->waypoint, opt_.behavior.blacklist_ticks);
      state_.current_waypoint.reset();
    }
    return true;  // keep hovering this tick; blacklisted candidates expire later
  }

  void finish_waypoint(bool reached) {
    if (!state_.current_waypoint) return;
    const Waypoint w = *state_.current_waypoint;
    if (reached && w.cluster) {
      state_.mark_visited(*w.cluster);
      visited_before_.push_back(*w.cluster);
    } else {
      state_.add_blacklist(w, opt_.behavior.blacklist_ticks);
    }
    last_waypoint_ = w;
    state_.current_waypoint.reset();
    follower_.reset();
  }

  void move(int t) {
    Pose before = pose_;
    const AdvanceResult r = follower_->advance(pose_, mem_, [&](const Pose& p) {
      probe_neighborhood(mem_, sc_.world, p);
    });
    if (r.steps > 0 || pose_.heading != before.heading) push_pose(t, pose_);
    if (r.arrived) {
      finish_waypoint(true);
      return;
    }
    if (r.replan) {
      auto path = planner_.plan(mem_, pose_.position, state_.current_waypoint->point, opt_.nav);
      if (path) follower_.emplace(std::move(*path), opt_.nav);
      else finish_waypoint(false);
    }
  }

  void check_reach(int t, const Pose& p, double length) {
    const auto active = active_queries(sc_.task, progress_);
    for (const SemanticObject* g : goals_) {
      if (progress_.reached.count(g->id) || !active.count(g->class_name)) continue;
      if (!is_reached(p, *g, sc_.r_succ)) continue;
      mark_reached(sc_.task, sc_.world, progress_, g->id);
      res_.reach_events.push_back({t, g->id, length});
      // a reveal may have activated goals that are already within reach
      return check_reach(t, p, length);
    }
  }

  void check_reach_along_init(int t) {
    double length = 0.0;
    for (std::size_t i = 0; i < res_.trajectory.size(); ++i) {
      if (i) length += (res_.trajectory[i].pose.position - res_.trajectory[i - 1].pose.position).norm();
      check_reach(t, res_.trajectory[i].pose, length);
    }
  }

  const Scenario& sc_;
  EpisodeOptions opt_;
  BranchSet branches_;
  SemanticSpace space_;
  Rng rng_;
  SemanticVoxelMap mem_;
  RayStore store_;
  BehaviorState state_;
  std::vector<std::string> palette_;
  std::vector<const SemanticObject*> goals_;
  const AuxCueProvider* provider_ = nullptr;
  GridPlanner planner_;
  std::optional<PathFollower> follower_;
  std::optional<Waypoint> last_waypoint_;
  std::vector<ClusterFingerprint> visited_before_;
  TaskProgress progress_;
  Pose pose_;
  double path_length_ = 0.0;
  int integrations_ = 0;
  EpisodeResult res_;
};

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, PolicyKind policy, std::uint64_t seed,
                          const EpisodeOptions& options) {
  Episode ep(scenario, policy, seed, options);
  return ep.run();
}

}  // namespace raven
