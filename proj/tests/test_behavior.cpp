#include "raven/behavior/aux_cues.hpp"
#include "raven/behavior/behavior.hpp"
#include "raven/behavior/dbscan.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace raven;

namespace {

void paint(SemanticVoxelMap& m, GridIndex lo, GridIndex hi, const Embedding& f) {
  for (int k = lo.k; k <= hi.k; ++k)
    for (int j = lo.j; j <= hi.j; ++j)
      for (int i = lo.i; i <= hi.i; ++i) {
        m.mark_occupied({i, j, k});
        m.add_feature({i, j, k}, f);
      }
}

SemanticRay ray(Vec3 origin, Vec3 dir, Embedding f) {
  SemanticRay r;
  r.origin = origin;
  r.direction = dir.normalized();
  r.feature = std::move(f);
  return r;
}

struct Bench {
  SemanticSpace space;
  SemanticVoxelMap mem{GridBounds{30, 30, 20}};
  RayStore rays;
  TaskSpec task = fixtures::type1("bankomat");
  TaskProgress progress;
  Pose pose{{2, 2, 10}, Vec3::UnitX()};
  std::vector<std::string> palette{"bankomat", "building", "house", "sidewalk", "street"};
  CooccurrenceOracle cues{default_cooccurrence()};

  BehaviorContext ctx() const { return {mem, rays, task, progress, pose, space, palette}; }
};

}  // namespace

TEST_CASE("ray_box_intersect examples") {
  CHECK(ray_box_intersect({0, 0, 5}, {10, 0, 5}, {1, 1, 1}).isApprox(Vec3(9.5, 0, 5)));
  CHECK(ray_box_intersect({10.2, 0.1, 5}, {10, 0, 5}, {1, 1, 1}) == Vec3(10.2, 0.1, 5));
  CHECK(ray_box_intersect({0, 10, 0}, {0, 0, 0}, {4, 2, 2}).isApprox(Vec3(0, 1, 0)));
  CHECK_THROWS_AS(ray_box_intersect({0, 0, 0}, {1, 1, 1}, {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("ray_box_intersect agrees with bisection") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> pos(-20.0, 20.0), size(0.2, 6.0);
  for (int n = 0; n < 500; ++n) {
    const Vec3 c(pos(gen), pos(gen), pos(gen));
    const Vec3 s(size(gen), size(gen), size(gen));
    const Vec3 o(pos(gen), pos(gen), pos(gen));
    const Vec3 lo = c - 0.5 * s, hi = c + 0.5 * s;
    const bool inside = (o.array() >= lo.array()).all() && (o.array() <= hi.array()).all();
    const Vec3 got = ray_box_intersect(o, c, s);
    if (inside) {
      CHECK(got == o);
      continue;
    }
    CHECK((got - oracle::bisect_box_entry(o, c, lo, hi)).norm() < 1e-9);
  }
}

TEST_CASE("voxel search stops omega short of the cluster surface") {
  Bench b;
  paint(b.mem, {9, 4, 4}, {10, 5, 5}, b.space.encode("house"));  // box [9,11] x [4,6] x [4,6]
  BehaviorConfig cfg;
  cfg.tau_min = 8;
  BehaviorState st(cfg);
  const Pose p{{0, 5, 5}, Vec3::UnitX()};
  const auto q = make_queries(b.space, {"house"});
  const auto hit = voxel_search(st, b.mem, q, p, cfg);
  REQUIRE(hit);
  CHECK(hit->waypoint.isApprox(Vec3(8, 5, 5)));
  CHECK(hit->cluster == ClusterFingerprint{{9, 4, 4}, {10, 5, 5}});

  cfg.tau_min = 9;  // 8 cells is too few
  CHECK_FALSE(voxel_search(st, b.mem, q, p, cfg));
  cfg.tau_min = 8;
  CHECK_FALSE(voxel_search(st, b.mem, make_queries(b.space, {"silo"}), p, cfg));

  st.mark_visited(hit->cluster);
  CHECK_FALSE(voxel_search(st, b.mem, q, p, cfg));
}

TEST_CASE("voxel search takes the nearest unvisited cluster") {
  Bench b;
  const Embedding f = b.space.encode("house");
  paint(b.mem, {20, 4, 4}, {21, 5, 5}, f);
  paint(b.mem, {9, 4, 4}, {10, 5, 5}, f);
  BehaviorConfig cfg;
  cfg.tau_min = 8;
  BehaviorState st(cfg);
  const Pose p{{0, 5, 5}, Vec3::UnitX()};
  const auto q = make_queries(b.space, {"house"});
  auto first = voxel_search(st, b.mem, q, p, cfg);
  REQUIRE(first);
  CHECK(first->cluster.lo.i == 9);
  st.add_blacklist({first->waypoint, Behavior::VoxelSearch, first->cluster}, 10);
  auto second = voxel_search(st, b.mem, q, p, cfg);
  REQUIRE(second);
  CHECK(second->cluster.lo.i == 20);
  st.step_clock = 10;
  st.expire_blacklist();
  CHECK(voxel_search(st, b.mem, q, p, cfg)->cluster.lo.i == 9);
}

TEST_CASE("ray search advances omega_ray along the bin direction") {
  Bench b;
  const Embedding f = b.space.encode("radio tower");
  b.rays.add(ray({2, 2, 10}, {1, 0, 0}, f));
  BehaviorConfig cfg;
  BehaviorState st(cfg);
  const Pose p{{1, 2, 10}, Vec3::UnitX()};
  const auto wp = ray_search(st, b.rays, make_queries(b.space, {"radio tower"}), p, b.mem.bounds(), cfg);
  REQUIRE(wp);
  CHECK(wp->isApprox(Vec3(8, 2, 10)));
  CHECK_FALSE(ray_search(st, b.rays, make_queries(b.space, {"house"}), p, b.mem.bounds(), cfg));
  CHECK_FALSE(ray_search(st, b.rays, {}, p, b.mem.bounds(), cfg));
}

TEST_CASE("ray search prefers the larger bin when size dominates") {
  Bench b;
  const Embedding f = b.space.encode("radio tower");
  for (double y : {2.0, 6.0, 10.0}) b.rays.add(ray({10, y, 10}, {1, 0, 0}, f));
  b.rays.add(ray({4, 2, 10}, {0, 1, 0}, f));
  REQUIRE(b.rays.size() == 4);
  BehaviorConfig cfg;
  BehaviorState st(cfg);
  const auto q = make_queries(b.space, {"radio tower"});
  const auto wp = ray_search(st, b.rays, q, b.pose, b.mem.bounds(), cfg);
  REQUIRE(wp);
  CHECK(wp->isApprox(Vec3(16, 6, 10)));
  // with no weight on size the near bin wins
  cfg.beta = 1e-9;
  CHECK(ray_search(st, b.rays, q, b.pose, b.mem.bounds(), cfg)->isApprox(Vec3(4, 8, 10)));
}

TEST_CASE("aux search consults the co-occurrence table") {
  Bench b;
  b.rays.add(ray({6, 2, 10}, {1, 0, 0}, b.space.encode("sidewalk")));
  BehaviorConfig cfg;
  BehaviorState st(cfg);
  const auto wp = aux_search(st, b.ctx(), cfg, b.cues);
  CHECK(st.aux_queries == std::vector<std::string>{"sidewalk", "building", "street"});
  REQUIRE(wp);
  const auto direct = ray_search(st, b.rays, make_queries(b.space, {"bankomat", "sidewalk", "building", "street"}),
                                 b.pose, b.mem.bounds(), cfg);
  REQUIRE(direct);
  CHECK(*wp == *direct);
  CHECK(wp->isApprox(Vec3(12, 2, 10)));
  // the target alone has no evidence
  CHECK_FALSE(ray_search(st, b.rays, make_queries(b.space, {"bankomat"}), b.pose, b.mem.bounds(), cfg));
}

TEST_CASE("aux search is rate limited") {
  Bench b;
  b.rays.add(ray({6, 2, 10}, {1, 0, 0}, b.space.encode("sidewalk")));
  BehaviorConfig cfg;
  BehaviorState st(cfg);
  CHECK(aux_search(st, b.ctx(), cfg, b.cues));
  CHECK_FALSE(aux_search(st, b.ctx(), cfg, b.cues));
  st.step_clock = 199;
  CHECK_FALSE(aux_search(st, b.ctx(), cfg, b.cues));
  st.step_clock = 200;
  CHECK(aux_search(st, b.ctx(), cfg, b.cues));
  CHECK(st.last_aux_step == 200);
}

TEST_CASE("aux suggestions stay inside the palette and exclude targets") {
  const CooccurrenceOracle cues(default_cooccurrence());
  CHECK(cues.suggest({"bankomat"}, {"bankomat", "sidewalk", "street"}, 3) ==
        std::vector<std::string>{"sidewalk", "street"});
  CHECK(cues.suggest({"bankomat"}, {"sidewalk", "building", "street"}, 2) ==
        std::vector<std::string>{"sidewalk", "building"});
  CHECK(cues.suggest({"bankomat", "sidewalk"}, {"sidewalk", "building", "street"}, 3) ==
        std::vector<std::string>{"building", "street"});
  CHECK(cues.suggest({"no such class"}, {"sidewalk"}, 3).empty());
}

TEST_CASE("frontier exploration scores distance plus heading") {
  SemanticVoxelMap m({40, 12, 12});
  m.mark_free({25, 5, 5});  // 10 ahead: score 10
  m.mark_free({5, 5, 5});   // 10 behind: score 10 + 5 * 2
  m.mark_free({16, 5, 2});  // close, but below z_thresh
  m.update_frontiers({{25, 5, 5}, {5, 5, 5}, {16, 5, 2}});
  BehaviorConfig cfg;
  cfg.dbscan_min_samples = 1;
  BehaviorState st(cfg);
  const Pose p{{15.5, 5.5, 5.5}, Vec3::UnitX()};
  CHECK(filtered_frontier_cells(m, cfg) == std::vector<GridIndex>{{5, 5, 5}, {25, 5, 5}});
  CHECK(frontier_explore(st, m, p, cfg) == Vec3(25.5, 5.5, 5.5));
  const Pose back{{15.5, 5.5, 5.5}, -Vec3::UnitX()};
  CHECK(frontier_explore(st, m, back, cfg) == Vec3(5.5, 5.5, 5.5));
  st.add_blacklist({Vec3(25.5, 5.5, 5.5), Behavior::FrontierExplore, std::nullopt}, 5);
  CHECK(frontier_explore(st, m, p, cfg) == Vec3(5.5, 5.5, 5.5));
  cfg.z_thresh = 6.0;
  CHECK_FALSE(frontier_explore(st, m, p, cfg));
}

TEST_CASE("frontier candidates are snapped cluster centroids") {
  SemanticVoxelMap m({40, 12, 12});
  std::vector<GridIndex> changed;
  for (int i = 10; i <= 14; ++i) changed.push_back({i, 5, 6});
  changed.push_back({30, 5, 6});
  for (const GridIndex& c : changed) m.mark_free(c);
  m.update_frontiers(changed);
  BehaviorConfig cfg;
  // the 5-cell line is one cluster, the lone cell is noise
  CHECK(frontier_candidates(m, cfg) == std::vector<Vec3>{Vec3(12.5, 5.5, 6.5)});
  cfg.dbscan_min_samples = 8;  // everything is noise, so every point is a candidate
  CHECK(frontier_candidates(m, cfg).size() == 6);
}

TEST_CASE("initialization climbs and plans a panoramic sweep") {
  const WorldModel w = fixtures::world_with_ground({10, 10, 16}, {});
  const Pose start{{4.5, 4.5, 1.5}, Vec3::UnitX()};
  SensorConfig sensor;
  const InitPlan plan = initialize(start, w, BehaviorConfig{}, sensor);
  CHECK(plan.pose.position == Vec3(4.5, 4.5, 11.5));
  CHECK(plan.sweep_views == 5);
  REQUIRE(plan.ascent.size() == 10);
  CHECK(plan.ascent.front() == Vec3(4.5, 4.5, 2.5));
  CHECK(plan.ascent.back() == plan.pose.position);

  const WorldModel roofed = fixtures::world_with_ground({10, 10, 16}, {}, {{4, 4, 8}});
  CHECK_THROWS_AS(initialize(start, roofed, BehaviorConfig{}, sensor), std::runtime_error);
  const WorldModel low = fixtures::world_with_ground({10, 10, 11}, {});
  CHECK_THROWS_AS(initialize(start, low, BehaviorConfig{}, sensor), std::runtime_error);
}

TEST_CASE("tick arbitration follows the fixed priority") {
  Bench b;
  b.task = fixtures::type1("house");
  b.pose = Pose{{2, 5, 5}, Vec3::UnitX()};
  BehaviorConfig cfg;
  cfg.tau_min = 8;
  cfg.dbscan_min_samples = 1;
  paint(b.mem, {20, 4, 4}, {21, 5, 5}, b.space.encode("house"));
  b.rays.add(ray({4, 12, 5}, {0, 1, 0}, b.space.encode("house")));
  b.mem.mark_free({2, 20, 6});
  b.mem.update_frontiers({{2, 20, 6}});

  BehaviorState st(cfg);
  auto d = tick(st, b.ctx(), cfg, b.cues);
  REQUIRE(d);
  CHECK(d->behavior == Behavior::VoxelSearch);
  CHECK(d->waypoint.cluster.has_value());
  CHECK(d->queries == std::vector<std::string>{"house"});
  CHECK(st.current_waypoint->source == Behavior::VoxelSearch);

  BranchSet no_voxel;
  no_voxel.voxel = false;
  d = tick(st, b.ctx(), cfg, b.cues, no_voxel);
  REQUIRE(d);
  CHECK(d->behavior == Behavior::RaySearch);
  CHECK(d->waypoint.point.isApprox(Vec3(4, 18, 5)));

  BranchSet frontier_only{false, false, false, true, false};
  d = tick(st, b.ctx(), cfg, b.cues, frontier_only);
  REQUIRE(d);
  CHECK(d->behavior == Behavior::FrontierExplore);
  CHECK(d->waypoint.point == Vec3(2.5, 20.5, 6.5));

  BranchSet none{false, false, false, false, false};
  CHECK_FALSE(tick(st, b.ctx(), cfg, b.cues, none));
  CHECK_FALSE(st.current_waypoint);
}

TEST_CASE("tick falls through to aux search when the target has no evidence") {
  Bench b;
  BehaviorConfig cfg;
  b.rays.add(ray({6, 2, 10}, {1, 0, 0}, b.space.encode("street")));
  BehaviorState st(cfg);
  auto d = tick(st, b.ctx(), cfg, b.cues);
  REQUIRE(d);
  CHECK(d->behavior == Behavior::AuxSearch);
  CHECK(d->queries.size() == 4);
  CHECK(d->queries.front() == "bankomat");
  // inside the rate limit nothing else applies and there are no frontiers
  CHECK_FALSE(tick(st, b.ctx(), cfg, b.cues));
}

TEST_CASE("semantic frontier picks the best matching projected feature") {
  Bench b;
  b.task = fixtures::type1("house");
  b.mem.mark_free({10, 10, 10});
  b.mem.mark_free({20, 10, 10});
  b.mem.update_frontiers({{10, 10, 10}, {20, 10, 10}});
  b.mem.add_frontier_feature({10, 10, 10}, b.space.encode("silo"));
  b.mem.add_frontier_feature({20, 10, 10}, b.space.encode("house"));
  BehaviorConfig cfg;
  cfg.dbscan_min_samples = 1;
  BehaviorState st(cfg);
  BranchSet vlfm{false, false, false, true, true};
  auto d = tick(st, b.ctx(), cfg, b.cues, vlfm);
  REQUIRE(d);
  CHECK(d->waypoint.point == Vec3(20.5, 10.5, 10.5));
  BranchSet plain{false, false, false, true, false};
  CHECK(tick(st, b.ctx(), cfg, b.cues, plain)->waypoint.point == Vec3(10.5, 10.5, 10.5));
}

TEST_CASE("dbscan matches the reference implementation") {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> coord(0, 19);
  std::uniform_int_distribution<int> min_s(1, 6);
  std::uniform_real_distribution<double> eps(1.0, 3.5);
  for (int trial = 0; trial < 60; ++trial) {
    std::set<GridIndex> unique;
    const int n = 20 + trial * 5;
    while (int(unique.size()) < n) unique.insert({coord(gen), coord(gen), coord(gen) / 4});
    std::vector<GridIndex> cells(unique.begin(), unique.end());
    std::shuffle(cells.begin(), cells.end(), gen);
    std::vector<Vec3> pts;
    for (const GridIndex& c : cells) pts.push_back(cell_center(c));
    const double e = eps(gen);
    const int m = min_s(gen);
    const auto expect = oracle::dbscan(pts, e, m);
    CHECK(dbscan(pts, e, m) == expect);
    CHECK(dbscan_cells(cells, GridBounds{20, 20, 5}, e, m) == expect);
  }
  CHECK(dbscan(std::vector<Vec3>{}, 1.0, 1).empty());
}

TEST_CASE("behavior config validation names the field") {
  BehaviorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epsilon_vox = 1.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("epsilon_vox"), std::invalid_argument);
  cfg = {};
  cfg.theta_deg = 180.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("theta_deg"), std::invalid_argument);
  cfg = {};
  cfg.j_aux = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("j_aux"), std::invalid_argument);
}
