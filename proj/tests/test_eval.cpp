#include "raven/eval/benchmark.hpp"
#include "raven/eval/metrics.hpp"
#include "raven/eval/report.hpp"
#include "raven/world/generator.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace raven;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GeneratorConfig small_config() {
  GeneratorConfig cfg;
  cfg.dims = {48, 48, 16};
  cfg.min_start_goal_distance = 12;
  cfg.start_clearance = 12;
  cfg.goal_height = {4, 8};
  cfg.aux_height = {4, 10};
  cfg.clutter_height = {1, 4};
  cfg.budget_steps = 120;
  return cfg;
}

GoalDistances symmetric(std::vector<double> from_start, std::vector<std::vector<double>> between) {
  GoalDistances d;
  for (std::size_t g = 0; g < from_start.size(); ++g) d.goal_ids.push_back(int(g) + 1);
  d.from_start = std::move(from_start);
  d.between = std::move(between);
  return d;
}

std::vector<std::vector<double>> legs_of(const GoalDistances& d) {
  const std::size_t n = d.from_start.size();
  std::vector<std::vector<double>> legs(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t g = 0; g < n; ++g) {
    legs[0][g + 1] = d.from_start[g];
    for (std::size_t h = 0; h < n; ++h) legs[g + 1][h + 1] = d.between[g][h];
  }
  return legs;
}

/// Open world with one goal box and the start a given distance down the x axis.
Scenario open_scenario(GridIndex lo, GridIndex hi, Vec3 start, int budget, const std::string& cls = "water tower") {
  const WorldModel w = fixtures::world_with_ground({40, 20, 16}, {fixtures::box(1, cls, lo, hi)});
  return fixtures::scenario(w, fixtures::type1(cls), start, budget);
}

}  // namespace

TEST_CASE("optimal visit length examples") {
  const GoalDistances sym = symmetric({4, 4, 4}, {{0, 4, 4}, {4, 0, 4}, {4, 4, 0}});
  CHECK(optimal_visit_length(sym, 0) == 0.0);
  CHECK(optimal_visit_length(sym, 1) == 4.0);
  CHECK(optimal_visit_length(sym, 3) == 12.0);

  // nearest-first goes to g1 and then pays 20; g2 -> g3 is the cheap pair
  const GoalDistances trap = symmetric({1, 2, 10}, {{0, 20, 20}, {20, 0, 1}, {20, 1, 0}});
  CHECK(optimal_visit_length(trap, 2) == 3.0);
  CHECK(oracle::greedy_visit_length(legs_of(trap), 2) == 21.0);

  const GoalDistances cut = symmetric({1, kInf}, {{0, kInf}, {kInf, 0}});
  CHECK(optimal_visit_length(cut, 1) == 1.0);
  CHECK_THROWS_AS(optimal_visit_length(cut, 2), std::runtime_error);
  CHECK_THROWS_AS(optimal_visit_length(cut, 3), std::invalid_argument);
}

TEST_CASE("property: optimal visit length equals permutation enumeration") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(1.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + std::size_t(trial % 6);
    // points on a line keep the matrix a metric, as shortest paths are
    std::vector<double> x(n + 1);
    for (double& v : x) v = u(gen);
    GoalDistances d;
    d.between.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t g = 0; g < n; ++g) {
      d.goal_ids.push_back(int(g));
      d.from_start.push_back(std::abs(x[g + 1] - x[0]));
      for (std::size_t h = 0; h < n; ++h) d.between[g][h] = std::abs(x[g + 1] - x[h + 1]);
    }
    for (int k = 1; k <= int(n); ++k) {
      const double best = oracle::best_visit_length(legs_of(d), k);
      CHECK(optimal_visit_length(d, k) == doctest::Approx(best).epsilon(1e-12));
      CHECK(optimal_visit_length(d, k) <= oracle::greedy_visit_length(legs_of(d), k) + 1e-12);
    }
  }
}

TEST_CASE("goal distances agree with uniform-cost search to the dilated boxes") {
  std::vector<GridIndex> wall;
  for (int j = 0; j < 16; ++j)
    for (int k = 1; k < 8; ++k)
      if (j != 13) wall.push_back({15, j, k});
  const WorldModel w = fixtures::world_with_ground(
      {30, 20, 8}, {fixtures::box(1, "house", {24, 3, 1}, {26, 5, 3}), fixtures::box(2, "house", {4, 14, 1}, {5, 15, 2})},
      wall);
  const Vec3 start(3.5, 3.5, 1.5);
  std::vector<const SemanticObject*> goals;
  for (const auto& o : w.objects()) goals.push_back(&o);
  const GoalDistances d = goal_distances(w, start, goals, 2.0);

  auto region = [&](const SemanticObject& o) {
    std::vector<GridIndex> out;
    for (int k = 0; k < 8; ++k)
      for (int j = 0; j < 20; ++j)
        for (int i = 0; i < 30; ++i)
          if (w.free({i, j, k}) && distance_to_box(cell_center({i, j, k}), o.lo(), o.hi()) <= 2.0) out.push_back({i, j, k});
    return out;
  };
  auto passable = [&](GridIndex c) { return w.bounds().contains(c) && w.free(c); };
  const auto from_start = oracle::uniform_cost(passable, {cell_of(start)});
  for (std::size_t g = 0; g < goals.size(); ++g) {
    const auto reg = region(*goals[g]);
    CHECK(dilated_region(w, *goals[g], 2.0) == reg);
    CHECK(d.from_start[g] == doctest::Approx(oracle::min_over(from_start, reg)).epsilon(1e-12));
    const auto from_goal = oracle::uniform_cost(passable, reg);
    for (std::size_t h = 0; h < goals.size(); ++h) {
      const double expect = g == h ? 0.0 : oracle::min_over(from_goal, region(*goals[h]));
      CHECK(d.between[g][h] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(d.from_start[0] > 20.0);  // has to go round through the gap
}

TEST_CASE("progress and ppl examples") {
  const Scenario sc = open_scenario({30, 9, 1}, {31, 10, 3}, {5.5, 9.5, 1.5}, 100);
  const double d1 = optimal_visit_length(sc.world, sc.start.position, goal_instances(sc.task, sc.world), 1, sc.r_succ);
  CHECK(d1 == doctest::Approx(23.0));  // cell 5 to cell 28, the first center within 2 of x = 30

  EpisodeResult none;
  auto m = compute_metrics(none, sc);
  CHECK(m.progress == 0.0);
  CHECK(m.ppl == 0.0);

  EpisodeResult twice;
  twice.reach_events.push_back({40, 1, 2 * d1});
  m = compute_metrics(twice, sc);
  CHECK(m.progress == 1.0);
  CHECK(m.ppl == doctest::Approx(0.5));

  EpisodeResult shortcut;  // shorter than the grid optimum, e.g. cutting a corner
  shortcut.reach_events.push_back({20, 1, d1 / 2});
  CHECK(ppl(shortcut, sc) == 1.0);

  EpisodeResult at_start;
  at_start.reach_events.push_back({1, 1, 0.0});
  CHECK(ppl(at_start, sc) == 1.0);

  const WorldModel w = fixtures::world_with_ground(
      {40, 20, 16}, {fixtures::box(1, "house", {30, 2, 1}, {31, 3, 3}), fixtures::box(2, "bus stop", {30, 15, 1}, {31, 16, 2}),
                     fixtures::box(3, "house", {10, 15, 1}, {11, 16, 3})});
  const Scenario two = fixtures::scenario(w, {TaskKind::TypeII, {{"house", "bus stop"}}}, {5.5, 9.5, 1.5}, 100);
  EpisodeResult one_of_three;
  one_of_three.reach_events.push_back({10, 3, 100.0});
  m = compute_metrics(one_of_three, two);
  CHECK(m.total == 3);
  CHECK(m.progress == doctest::Approx(1.0 / 3.0));
  CHECK(m.ppl <= m.progress);
}

TEST_CASE("episodes are deterministic") {
  const Scenario sc = generate_world(small_config(), 11);
  for (PolicyKind p : {PolicyKind::Raven, PolicyKind::Vlfm3D}) {
    const EpisodeResult a = run_episode(sc, p, 3);
    const EpisodeResult b = run_episode(sc, p, 3);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
      CHECK(a.trajectory[i].tick == b.trajectory[i].tick);
      CHECK(a.trajectory[i].pose.position == b.trajectory[i].pose.position);
    }
    CHECK(a.steps == b.steps);
    CHECK(a.path_length == b.path_length);
    CHECK(behavior_log_jsonl(a, {}) == behavior_log_jsonl(b, {}));
  }
}

TEST_CASE("zero budget runs no ticks") {
  const Scenario sc = open_scenario({8, 9, 1}, {9, 10, 3}, {5.5, 9.5, 1.5}, 0);
  const EpisodeResult r = run_episode(sc, PolicyKind::Raven, 1);
  CHECK(r.steps == 0);
  CHECK(r.terminated_by == Termination::Budget);
  CHECK(r.reach_events.empty());
  CHECK(r.behavior_log.empty());
  CHECK(compute_metrics(r, sc).progress == 0.0);
}

TEST_CASE("a goal next to the start is reached on the first tick") {
  const Scenario sc = open_scenario({7, 9, 1}, {8, 10, 3}, {5.5, 9.5, 1.5}, 50);
  for (PolicyKind p : all_policies()) {
    const EpisodeResult r = run_episode(sc, p, 1);
    REQUIRE(r.reach_events.size() == 1);
    CHECK(r.reach_events[0].tick == 1);
    CHECK(r.reach_events[0].path_length == 0.0);
    CHECK(r.terminated_by == Termination::AllGoals);
    CHECK(r.steps == 1);
    const auto m = compute_metrics(r, sc);
    CHECK(m.progress == 1.0);
    CHECK(m.ppl == 1.0);
  }
}

TEST_CASE("goal on the way up counts with the climbed length") {
  // the ascent passes within reach of a floating box
  const Scenario sc = open_scenario({7, 9, 8}, {8, 10, 9}, {5.5, 9.5, 1.5}, 50);
  const EpisodeResult r = run_episode(sc, PolicyKind::Frontier3D, 1);
  REQUIRE(r.reach_events.size() == 1);
  CHECK(r.reach_events[0].tick == 1);
  CHECK(r.reach_events[0].path_length == doctest::Approx(6.0));
}

TEST_CASE("episode audit passes and ppl never exceeds progress") {
  GeneratorConfig cfg = small_config();
  cfg.task_kinds = {TaskKind::TypeI, TaskKind::TypeII, TaskKind::TypeIII};
  EpisodeOptions opt;
  opt.audit = true;
  opt.audit_rescan_every = 1;
  for (const Scenario& sc : generate_suite(cfg, 3, 17)) {
    for (PolicyKind p : {PolicyKind::Raven, PolicyKind::Frontier3D}) {
      const EpisodeResult r = run_episode(sc, p, 2, opt);
      REQUIRE(r.audit);
      CHECK(r.audit->ok());
      CHECK(r.audit->frontier_rescans > 0);
      for (const std::string& f : r.audit->failures) MESSAGE(f);
      const auto m = compute_metrics(r, sc);
      CHECK(m.ppl <= m.progress + 1e-12);
      CHECK(r.steps <= sc.budget_steps);
      for (const TrajectoryPoint& tp : r.trajectory) CHECK(sc.world.free(cell_of(tp.pose.position)));
    }
  }
}

TEST_CASE("target sets are revealed in order and never withdrawn") {
  GeneratorConfig cfg = small_config();
  cfg.task_kinds = {TaskKind::TypeIII};
  cfg.budget_steps = 300;
  int with_reveal = 0;
  for (const Scenario& sc : generate_suite(cfg, 4, 3)) {
    const EpisodeResult r = run_episode(sc, PolicyKind::Raven, 1);
    const auto classes = sc.task.all_classes();
    std::set<std::string> seen_targets;
    for (const BehaviorRecord& rec : r.behavior_log) {
      std::set<std::string> targets;
      for (const std::string& q : rec.queries)
        if (std::find(classes.begin(), classes.end(), q) != classes.end()) targets.insert(q);
      CHECK(std::includes(targets.begin(), targets.end(), seen_targets.begin(), seen_targets.end()));
      seen_targets = targets;
    }
    // the first goal reached always belongs to the first set
    if (!r.reach_events.empty()) {
      const auto& objs = sc.world.objects();
      const auto g = std::find_if(objs.begin(), objs.end(), [&](const SemanticObject& o) { return o.id == r.reach_events[0].goal_id; });
      REQUIRE(g != objs.end());
      const auto& first = sc.task.class_sets[0];
      CHECK(std::find(first.begin(), first.end(), g->class_name) != first.end());
    }
    with_reveal += seen_targets.size() > sc.task.class_sets[0].size();
  }
  CHECK(with_reveal > 0);
}

TEST_CASE("a semantic ray pulls Raven toward a goal beyond depth") {
  // open field, goal 130 cells ahead; nothing within depth points at it
  const WorldModel w = fixtures::world_with_ground({160, 60, 20}, {fixtures::box(1, "water tower", {140, 28, 1}, {143, 31, 12})});
  const Scenario sc = fixtures::scenario(w, fixtures::type1("water tower"), {10.5, 6.5, 1.5}, 220);
  const EpisodeResult raven = run_episode(sc, PolicyKind::Raven, 1);
  const EpisodeResult frontier = run_episode(sc, PolicyKind::Frontier3D, 1);
  const auto mr = compute_metrics(raven, sc);
  const auto mf = compute_metrics(frontier, sc);
  CHECK(mr.progress == 1.0);
  CHECK(mr.ppl > 0.8);
  CHECK(mr.ppl > mf.ppl);
  bool used_ray = false;
  for (const BehaviorRecord& rec : raven.behavior_log) used_ray = used_ray || rec.behavior == Behavior::RaySearch;
  CHECK(used_ray);
}

TEST_CASE("benchmark output is independent of job count and sorted") {
  GeneratorConfig cfg = small_config();
  cfg.task_kinds = {TaskKind::TypeI, TaskKind::TypeII};
  std::vector<SuiteEntry> suite;
  int n = 0;
  for (Scenario& sc : generate_suite(cfg, 2, 9)) suite.push_back({"s" + std::to_string(n++), std::move(sc)});
  const std::vector<PolicyKind> policies{PolicyKind::Frontier3D, PolicyKind::Raven};
  BenchmarkOptions one, four;
  four.jobs = 4;
  std::atomic<int> callbacks{0};
  four.on_row = [&](const EpisodeRow&) { ++callbacks; };
  const MetricsReport a = run_benchmark(suite, policies, {1, 2}, one);
  const MetricsReport b = run_benchmark(suite, policies, {1, 2}, four);
  CHECK(callbacks == 8);
  REQUIRE(a.rows.size() == 8);
  CHECK(format_csv(a.rows) == format_csv(b.rows));
  CHECK(format_aggregate_csv(a.aggregate) == format_aggregate_csv(b.aggregate));
  CHECK(a.rows.front().policy == "Frontier3D");
  CHECK(a.rows.back().policy == "Raven");
  for (std::size_t i = 1; i < a.rows.size(); ++i) {
    const auto& p = a.rows[i - 1];
    const auto& q = a.rows[i];
    CHECK(std::tie(p.policy, p.scenario, p.seed) < std::tie(q.policy, q.scenario, q.seed));
  }
  // one aggregate row per task type and policy, type I first
  REQUIRE(a.aggregate.size() == 4);
  CHECK(a.aggregate[0].task_type == "I");
  CHECK(a.aggregate[0].policy == "Frontier3D");
  CHECK(a.aggregate[3].task_type == "II");
  CHECK(a.aggregate[3].episodes == 2);
  CHECK_FALSE(a.any_error());

  // independent recomputation of one episode
  const EpisodeResult r = run_episode(suite[1].scenario, PolicyKind::Raven, 2);
  const auto m = compute_metrics(r, suite[1].scenario);
  const auto it = std::find_if(a.rows.begin(), a.rows.end(),
                               [](const EpisodeRow& row) { return row.policy == "Raven" && row.scenario == "s1" && row.seed == 2; });
  REQUIRE(it != a.rows.end());
  CHECK(it->progress == m.progress);
  CHECK(it->ppl == m.ppl);
  CHECK(it->steps == r.steps);
}

TEST_CASE("episode errors are reported as rows") {
  const WorldModel roofed = fixtures::world_with_ground({20, 20, 16}, {fixtures::box(1, "house", {15, 15, 1}, {16, 16, 3})},
                                                        {{3, 3, 6}});
  const std::vector<SuiteEntry> suite{{"bad", fixtures::scenario(roofed, fixtures::type1("house"), {3.5, 3.5, 1.5}, 20)}};
  const MetricsReport rep = run_benchmark(suite, {PolicyKind::Raven}, {1});
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].terminated_by == "error");
  CHECK_FALSE(rep.rows[0].error.empty());
  CHECK(rep.any_error());
  REQUIRE(rep.aggregate.size() == 1);
  CHECK(rep.aggregate[0].errors == 1);
  CHECK(rep.aggregate[0].progress == 0.0);
  CHECK_THROWS_AS(run_benchmark({}, {PolicyKind::Raven}, {1}), std::invalid_argument);
}

TEST_CASE("csv round trip") {
  std::vector<EpisodeRow> rows(3);
  rows[0] = {"Raven", "scenario_0001", 4, "III", 2.0 / 3.0, 0.123456789012345, 77, 81.25, "budget", "", {}};
  rows[1] = {"Frontier3D", "x", 0, "I", 0.0, 0.0, 0, 0.0, "stall", "", {}};
  rows[2] = {"Vlfm3D", "y", 18446744073709551ull, "II", 1.0, 1.0, 5, 1e-9, "all_goals", "", {}};
  const std::string text = format_csv(rows);
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  const auto back = parse_csv(text);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].policy == rows[i].policy);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].progress == rows[i].progress);
    CHECK(back[i].ppl == rows[i].ppl);
    CHECK(back[i].path_length == rows[i].path_length);
    CHECK(back[i].terminated_by == rows[i].terminated_by);
  }
  CHECK(format_csv(back) == text);
  CHECK_THROWS_WITH(parse_csv(text + "a,b\n"), doctest::Contains("line 5"));
  CHECK_THROWS(parse_csv("wrong header\n"));
}

TEST_CASE("report writers") {
  const Scenario sc = open_scenario({7, 9, 1}, {8, 10, 3}, {5.5, 9.5, 1.5}, 50);
  const EpisodeResult r = run_episode(sc, PolicyKind::Raven, 1);
  const auto m = compute_metrics(r, sc);
  const std::string json = episode_summary_json(r, m, "Raven", 1, sc);
  CHECK(json.find("\"progress\"") != std::string::npos);
  const std::string traj = trajectory_jsonl(r);
  CHECK(std::count(traj.begin(), traj.end(), '\n') == std::ptrdiff_t(r.trajectory.size()));
  const std::string log = behavior_log_jsonl(r, {{"policy", "Raven"}});
  CHECK(std::count(log.begin(), log.end(), '\n') == std::ptrdiff_t(r.behavior_log.size() + 1));
  CHECK(log.find("\"policy\"") < log.find('\n'));
  const std::string svg = trajectory_svg(r, sc);
  CHECK(svg.rfind("<svg", 0) == 0);
}
