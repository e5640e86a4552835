#include "raven/cli/commands.hpp"
#include "raven/cli/settings.hpp"

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <sstream>

using namespace raven;
namespace fs = std::filesystem;

namespace {

const char* kParams = R"(dims = 48 48 16
budget_steps = 80
min_start_goal_distance = 12
start_clearance = 12
goal_height = 4 8
aux_height = 4 10
clutter_height = 1 4
starts_per_world = 1
task_kinds = I, II
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ravenbench_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Call {
  int code = 0;
  std::string out, err;
};

Call cli(std::vector<std::string> args, std::optional<std::string> env = std::nullopt) {
  std::ostringstream out, err;
  Call c;
  c.code = run_cli(args, out, err, env);
  c.out = out.str();
  c.err = err.str();
  return c;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

/// Generates a 4-scenario suite (2 worlds x types I, II) into dir/suite.
std::string make_suite(const TempDir& dir) {
  write_text_file(dir / "params.txt", kParams);
  const Call c = cli({"gen-worlds", "--params", dir / "params.txt", "--count", "4", "--seed", "3", "--out", dir / "suite"});
  REQUIRE(c.code == 0);
  return dir / "suite/suite.txt";
}

}  // namespace

TEST_CASE("settings: keys, validation and dump") {
  RunSettings s;
  s.set("omega", "2.5");
  s.set("rays_h", "32");
  s.set("unknown_traversable", "false");
  CHECK(s.behavior.omega == 2.5);
  CHECK(s.sensor.n_h == 32);
  CHECK_FALSE(s.nav.unknown_traversable);
  CHECK_THROWS_WITH_AS(s.set("omgea", "1"), doctest::Contains("omgea"), ConfigError);
  CHECK_THROWS_WITH_AS(s.set("tau_min", "3.5"), doctest::Contains("tau_min"), ConfigError);
  s.set("theta_deg", "200");
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("theta_deg"), ConfigError);

  const std::string dump = RunSettings{}.dump();
  CHECK(std::count(dump.begin(), dump.end(), '\n') == std::ptrdiff_t(RunSettings::keys().size()));
  CHECK(contains(dump, "epsilon_vox = 0.98\n"));
  RunSettings again;
  apply_config_text(again, dump);
  CHECK(again.dump() == dump);

  CHECK(split_assignment(" beta = 4 ") == std::pair<std::string, std::string>{"beta", "4"});
  CHECK_THROWS_AS(split_assignment("beta"), ConfigError);
  RunSettings bad;
  CHECK_THROWS_WITH_AS(apply_config_text(bad, "# c\nomega = 1\nnope = 2\n"), doctest::Contains("line 3"), ConfigError);
}

TEST_CASE("manifest format") {
  const SuiteManifest m = parse_manifest("# ravenbench suite v1\ncooccurrence co.txt\nscenario a.txt\nscenario b.txt\n");
  CHECK(m.cooccurrence == std::optional<std::string>("co.txt"));
  CHECK(m.scenarios == std::vector<std::string>{"a.txt", "b.txt"});
  CHECK(parse_manifest(format_manifest(m)).scenarios == m.scenarios);
  CHECK_THROWS(parse_manifest("# ravenbench suite v1\nwhatever x\n"));
}

TEST_CASE("gen-worlds is deterministic and writes a sorted manifest") {
  TempDir dir("gen");
  write_text_file(dir / "params.txt", kParams);
  const std::vector<std::string> args{"gen-worlds", "--params", dir / "params.txt", "--count", "4", "--seed", "3"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", dir / "a"});
  b.insert(b.end(), {"--out", dir / "b"});
  REQUIRE(cli(a).code == 0);
  REQUIRE(cli(b).code == 0);
  for (const char* f : {"scenario_0000.txt", "scenario_0003.txt", "suite.txt", "cooccurrence.txt", "generator.txt"})
    CHECK(read_text_file(dir / std::string("a/") + f) == read_text_file(dir / std::string("b/") + f));
  const SuiteManifest m = parse_manifest(read_text_file(dir / "a/suite.txt"));
  CHECK(m.scenarios.size() == 4);
  CHECK(std::is_sorted(m.scenarios.begin(), m.scenarios.end()));
  CHECK(m.cooccurrence.has_value());

  // default output directory comes from the environment
  auto c = args;
  REQUIRE(cli(c, dir / "env").code == 0);
  CHECK(fs::exists(dir / "env/suite.txt"));
}

TEST_CASE("gen-worlds rejects bad parameters with exit 1") {
  TempDir dir("genbad");
  write_text_file(dir / "params.txt", "dims = 4 4\n");
  const Call c = cli({"gen-worlds", "--params", dir / "params.txt", "--count", "2", "--seed", "1", "--out", dir / "o"});
  CHECK(c.code == 1);
  CHECK(contains(c.err, "dims"));
  CHECK(cli({"gen-worlds", "--params", dir / "missing.txt", "--count", "2", "--seed", "1", "--out", dir / "o"}).code == 3);
  CHECK(cli({"gen-worlds", "--count", "2"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
}

TEST_CASE("run writes its outputs and records overrides") {
  TempDir dir("run");
  make_suite(dir);
  write_text_file(dir / "cfg.txt", "omega = 2\nbeta = 4\n");
  const std::string scenario = dir / "suite/scenario_0000.txt";
  const Call c = cli({"run", "--scenario", scenario, "--policy", "Raven", "--seed", "5", "--out", dir / "r", "--config",
                      dir / "cfg.txt", "--override", "omega=3", "--plot", "--audit"});
  REQUIRE(c.code == 0);
  for (const char* f : {"result.json", "trajectory.jsonl", "behavior_log.jsonl", "effective_config.txt", "plot.svg"})
    CHECK(fs::exists(dir / std::string("r/") + f));
  const std::string eff = read_text_file(dir / "r/effective_config.txt");
  CHECK(contains(eff, "omega = 3\n"));  // override beats the config file
  CHECK(contains(eff, "beta = 4\n"));
  const std::string log = read_text_file(dir / "r/behavior_log.jsonl");
  const std::string header = log.substr(0, log.find('\n'));
  CHECK(contains(header, "override.omega"));
  CHECK(contains(header, "\"policy\""));

  // same inputs, same bytes
  REQUIRE(cli({"run", "--scenario", scenario, "--policy", "Raven", "--seed", "5", "--out", dir / "r2", "--config",
               dir / "cfg.txt", "--override", "omega=3", "--plot", "--audit"})
              .code == 0);
  for (const char* f : {"result.json", "trajectory.jsonl", "behavior_log.jsonl", "effective_config.txt"})
    CHECK(read_text_file(dir / std::string("r/") + f) == read_text_file(dir / std::string("r2/") + f));
}

TEST_CASE("run reports configuration problems with exit 1") {
  TempDir dir("runbad");
  make_suite(dir);
  const std::string scenario = dir / "suite/scenario_0000.txt";
  Call c = cli({"run", "--scenario", scenario, "--policy", "Hal9000", "--seed", "1", "--out", dir / "r"});
  CHECK(c.code == 1);
  CHECK(contains(c.err, "Frontier3D"));
  CHECK(cli({"run", "--scenario", scenario, "--policy", "Raven", "--seed", "1", "--out", dir / "r", "--override",
             "theta_deg=0"})
            .code == 1);
  CHECK(cli({"run", "--scenario", scenario, "--policy", "Raven", "--seed", "1", "--out", dir / "r", "--override", "x"})
            .code == 1);
  CHECK(cli({"run", "--scenario", dir / "nope.txt", "--policy", "Raven", "--seed", "1", "--out", dir / "r"}).code == 3);
  write_text_file(dir / "broken.txt", "[world]\ndims = 8 8\n");
  c = cli({"run", "--scenario", dir / "broken.txt", "--policy", "Raven", "--seed", "1", "--out", dir / "r"});
  CHECK(c.code == 1);
  CHECK(contains(c.err, "line 2"));
}

TEST_CASE("bench: job count does not change results, one row per policy and scenario") {
  TempDir dir("bench");
  const std::string suite = make_suite(dir);
  const Call one = cli({"bench", "--suite", suite, "--policies", "Raven,Frontier3D", "--seeds", "1", "--jobs", "1",
                        "--out", dir / "j1", "--quiet"});
  const Call four = cli({"bench", "--suite", suite, "--policies", "Raven,Frontier3D", "--seeds", "1", "--jobs", "4",
                         "--out", dir / "j4", "--quiet", "--audit"});
  REQUIRE(one.code == 0);
  REQUIRE(four.code == 0);
  const std::string csv = read_text_file(dir / "j1/results.csv");
  CHECK(csv == read_text_file(dir / "j4/results.csv"));
  CHECK(read_text_file(dir / "j1/aggregate.csv") == read_text_file(dir / "j4/aggregate.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 4);
  const std::string agg = read_text_file(dir / "j1/aggregate.csv");
  // two policies for each of the two task types
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 1 + 2 * 2);
  CHECK(contains(agg, "I,Frontier3D,2,0,"));
  CHECK(contains(agg, "II,Raven,2,0,"));
  CHECK_FALSE(fs::exists(dir / "j1/failures.txt"));
  CHECK(contains(read_text_file(dir / "j1/effective_config.txt"), "# policies = Raven,Frontier3D\n"));

  // report re-aggregates the CSVs it finds
  const Call rep = cli({"report", "--in", dir / "j1"});
  CHECK(rep.code == 0);
  CHECK(contains(rep.out, "Frontier3D"));
  CHECK(read_text_file(dir / "j1/aggregate.csv") == agg);
}

TEST_CASE("bench and report error codes") {
  TempDir dir("benchbad");
  write_text_file(dir / "empty.txt", "# ravenbench suite v1\n");
  CHECK(cli({"bench", "--suite", dir / "empty.txt", "--policies", "Raven", "--seeds", "1", "--out", dir / "o"}).code == 1);
  CHECK(cli({"bench", "--suite", dir / "none.txt", "--policies", "Raven", "--seeds", "1", "--out", dir / "o"}).code == 3);
  const std::string suite = make_suite(dir);
  CHECK(cli({"bench", "--suite", suite, "--policies", "Raven,Bogus", "--seeds", "1", "--out", dir / "o"}).code == 1);
  CHECK(cli({"bench", "--suite", suite, "--policies", "Raven", "--seeds", "x", "--out", dir / "o"}).code == 1);
  CHECK(cli({"report", "--in", dir / "missing"}).code == 3);
  fs::create_directories(dir / "nocsv");
  CHECK(cli({"report", "--in", dir / "nocsv"}).code == 1);
}

TEST_CASE("help exits 0") {
  const Call c = cli({"--help"});
  CHECK(c.code == 0);
  CHECK(contains(c.out + c.err, "gen-worlds"));
}
