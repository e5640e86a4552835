#include "raven/cli/commands.hpp"

#include "raven/behavior/aux_cues.hpp"
#include "raven/cli/settings.hpp"
#include "raven/core/text.hpp"
#include "raven/eval/report.hpp"
#include "raven/world/generator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

namespace fs = std::filesystem;

namespace raven {

namespace {

constexpr const char* kManifestHeader = "# ravenbench suite v1";
constexpr const char* kDefaultOutDir = "ravenbench_out";

/// Failure inside an episode or the benchmark loop.
class EpisodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string resolve_out(const std::string& flag, const std::optional<std::string>& env_out) {
  if (!flag.empty()) return flag;
  if (env_out && !env_out->empty()) return *env_out;
  return kDefaultOutDir;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

/// Defaults, then the config file, then overrides in order.
RunSettings build_settings(const std::string& config_path, const std::vector<std::string>& overrides) {
  RunSettings s;
  if (!config_path.empty()) apply_config_text(s, read_text_file(config_path));
  for (const std::string& o : overrides) {
    const auto [k, v] = split_assignment(o);
    s.set(k, v);
  }
  s.validate();
  return s;
}

EpisodeOptions episode_options(const RunSettings& s) {
  EpisodeOptions o;
  o.behavior = s.behavior;
  o.sensor = s.sensor;
  o.nav = s.nav;
  o.space = s.space;
  return o;
}

std::vector<PolicyKind> parse_policies(const std::string& list) {
  std::vector<PolicyKind> out;
  for (const std::string& raw : text::split(list, ',')) {
    const std::string name = text::trim(raw);
    if (name.empty()) continue;
    const auto p = policy_from_string(name);
    if (!p) throw ConfigError("unknown policy '" + name + "'; valid policies: " + policy_names());
    if (std::find(out.begin(), out.end(), *p) == out.end()) out.push_back(*p);
  }
  if (out.empty()) throw ConfigError("no policies given; valid policies: " + policy_names());
  return out;
}

std::uint64_t parse_seed(const std::string& raw) {
  long long v = 0;
  if (!text::parse_int(text::trim(raw), v) || v < 0) throw ConfigError("bad seed '" + raw + "'");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> out;
  for (const std::string& raw : text::split(list, ',')) {
    if (text::trim(raw).empty()) continue;
    out.push_back(parse_seed(raw));
  }
  if (out.empty()) throw ConfigError("no seeds given");
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

// gen-worlds ------------------------------------------------------------------

struct GenArgs {
  std::string params;
  int count = 0;
  std::string seed;
  std::string out;
};

int cmd_gen_worlds(const GenArgs& a, const std::optional<std::string>& env_out, std::ostream& out) {
  const GeneratorConfig cfg = parse_generator_config(read_text_file(a.params));
  validate_generator_config(cfg);
  if (a.count < 1) throw ConfigError("count must be >= 1");
  const std::uint64_t seed = parse_seed(a.seed);
  const std::vector<Scenario> suite = generate_suite(cfg, a.count, seed);

  const std::string dir = resolve_out(a.out, env_out);
  ensure_dir(dir);
  const int width = std::max<int>(4, int(std::to_string(a.count - 1).size()));
  SuiteManifest m;
  m.cooccurrence = "cooccurrence.txt";
  for (std::size_t n = 0; n < suite.size(); ++n) {
    char name[64];
    std::snprintf(name, sizeof name, "scenario_%0*zu.txt", width, n);
    write_text_file(join_path(dir, name), save_scenario(suite[n]));
    m.scenarios.push_back(name);
  }
  write_text_file(join_path(dir, *m.cooccurrence), format_cooccurrence(cfg.cooccurrence));
  write_text_file(join_path(dir, "generator.txt"), format_generator_config(cfg));
  write_text_file(join_path(dir, "suite.txt"), format_manifest(m));
  out << "wrote " << suite.size() << " scenarios to " << dir << '\n';
  return kExitOk;
}

// run -------------------------------------------------------------------------

struct RunArgs {
  std::string scenario;
  std::string policy;
  std::string seed;
  std::string out;
  std::string config;
  std::string cooccurrence;
  std::vector<std::string> overrides;
  bool plot = false;
  bool audit = false;
};

int cmd_run(const RunArgs& a, const std::optional<std::string>& env_out, std::ostream& out) {
  const auto policy = policy_from_string(a.policy);
  if (!policy) throw ConfigError("unknown policy '" + a.policy + "'; valid policies: " + policy_names());
  const std::uint64_t seed = parse_seed(a.seed);
  const RunSettings settings = build_settings(a.config, a.overrides);
  const Scenario scenario = load_scenario(read_text_file(a.scenario));
  std::optional<CooccurrenceOracle> oracle;
  if (!a.cooccurrence.empty()) oracle.emplace(parse_cooccurrence(read_text_file(a.cooccurrence)));

  const std::string dir = resolve_out(a.out, env_out);
  ensure_dir(dir);

  EpisodeOptions opts = episode_options(settings);
  opts.audit = a.audit;
  if (oracle) opts.provider = &*oracle;
  EpisodeResult result;
  EpisodeMetrics metrics;
  try {
    result = run_episode(scenario, *policy, seed, opts);
    metrics = compute_metrics(result, scenario);
  } catch (const std::exception& e) {
    throw EpisodeError(std::string("episode failed: ") + e.what());
  }

  RunHeader header;
  header["policy"] = to_string(*policy);
  header["seed"] = std::to_string(seed);
  header["scenario"] = fs::path(a.scenario).filename().string();
  header["config_file"] = a.config.empty() ? "" : fs::path(a.config).filename().string();
  header["overrides"] = join(a.overrides, ";");
  for (const std::string& o : a.overrides) {
    const auto [k, v] = split_assignment(o);
    header["override." + k] = v;
  }

  write_text_file(join_path(dir, "result.json"),
                  episode_summary_json(result, metrics, to_string(*policy), seed, scenario));
  write_text_file(join_path(dir, "trajectory.jsonl"), trajectory_jsonl(result));
  write_text_file(join_path(dir, "behavior_log.jsonl"), behavior_log_jsonl(result, header));
  write_text_file(join_path(dir, "effective_config.txt"), settings.dump());
  if (a.plot) write_text_file(join_path(dir, "plot.svg"), trajectory_svg(result, scenario));

  out << to_string(*policy) << " seed " << seed << ": " << to_string(result.terminated_by) << " after "
      << result.steps << " steps, progress " << text::fmt(metrics.progress) << ", ppl " << text::fmt(metrics.ppl)
      << '\n';
  if (result.audit && !result.audit->ok()) {
    for (const std::string& f : result.audit->failures) out << "audit: " << f << '\n';
    return kExitEpisode;
  }
  return kExitOk;
}

// bench -----------------------------------------------------------------------

struct BenchArgs {
  std::string suite;
  std::string policies;
  std::string seeds;
  int jobs = 1;
  std::string out;
  std::string config;
  std::vector<std::string> overrides;
  bool audit = false;
  bool quiet = false;
};

int cmd_bench(const BenchArgs& a, const std::optional<std::string>& env_out, std::ostream& out,
              std::ostream& err) {
  const std::vector<PolicyKind> policies = parse_policies(a.policies);
  const std::vector<std::uint64_t> seeds = parse_seeds(a.seeds);
  if (a.jobs < 1) throw ConfigError("jobs must be >= 1");
  const RunSettings settings = build_settings(a.config, a.overrides);
  const LoadedSuite suite = load_suite(a.suite);
  if (suite.entries.empty()) throw ConfigError("suite manifest '" + a.suite + "' lists no scenarios");

  const std::string dir = resolve_out(a.out, env_out);
  ensure_dir(dir);

  std::optional<CooccurrenceOracle> oracle;
  if (suite.cooccurrence) oracle.emplace(*suite.cooccurrence);
  BenchmarkOptions bo;
  bo.episode = episode_options(settings);
  bo.episode.audit = a.audit;
  if (oracle) bo.episode.provider = &*oracle;
  bo.jobs = a.jobs;
  std::mutex mu;
  std::size_t done = 0;
  const std::size_t total = suite.entries.size() * policies.size() * seeds.size();
  if (!a.quiet) {
    bo.on_row = [&](const EpisodeRow& r) {
      std::lock_guard lock(mu);
      ++done;
      err << '[' << done << '/' << total << "] " << r.policy << ' ' << r.scenario << " seed " << r.seed << ' '
          << r.terminated_by << " progress " << text::fmt(r.progress) << '\n';
    };
  }
  const MetricsReport report = run_benchmark(suite.entries, policies, seeds, bo);

  std::vector<std::string> names;
  for (PolicyKind p : policies) names.push_back(to_string(p));
  std::vector<std::string> seed_text;
  for (std::uint64_t s : seeds) seed_text.push_back(std::to_string(s));
  std::string effective = "# policies = " + join(names, ",") + "\n# seeds = " + join(seed_text, ",") + "\n";
  effective += settings.dump();

  write_text_file(join_path(dir, "results.csv"), format_csv(report.rows));
  write_text_file(join_path(dir, "aggregate.csv"), format_aggregate_csv(report.aggregate));
  write_text_file(join_path(dir, "aggregate.txt"), format_aggregate_table(report.aggregate));
  write_text_file(join_path(dir, "effective_config.txt"), effective);

  std::ostringstream problems;
  for (const EpisodeRow& r : report.rows) {
    if (!r.error.empty()) problems << r.policy << ' ' << r.scenario << ' ' << r.seed << " error: " << r.error << '\n';
    for (const std::string& f : r.audit_failures)
      problems << r.policy << ' ' << r.scenario << ' ' << r.seed << " audit: " << f << '\n';
  }
  const std::string problem_text = problems.str();
  const fs::path problem_file = fs::path(dir) / "failures.txt";
  if (!problem_text.empty()) {
    write_text_file(problem_file.string(), problem_text);
  } else {
    std::error_code ec;
    fs::remove(problem_file, ec);
  }

  out << format_aggregate_table(report.aggregate);
  if (!problem_text.empty()) {
    err << problem_text;
    return kExitEpisode;
  }
  return kExitOk;
}

// report ----------------------------------------------------------------------

int cmd_report(const std::string& in_flag, const std::optional<std::string>& env_out, std::ostream& out) {
  const std::string dir = resolve_out(in_flag, env_out);
  if (!fs::is_directory(dir)) throw IoError("no such directory '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<EpisodeRow> rows;
  int used = 0;
  for (const fs::path& f : files) {
    const std::string body = read_text_file(f.string());
    const std::string first = body.substr(0, body.find('\n'));
    if (text::trim(first) != kCsvHeader) continue;  // aggregate tables and foreign CSVs
    std::vector<EpisodeRow> part;
    try {
      part = parse_csv(body);
    } catch (const std::exception& e) {
      throw ConfigError(f.filename().string() + ": " + e.what());
    }
    rows.insert(rows.end(), part.begin(), part.end());
    ++used;
  }
  if (used == 0) throw ConfigError("no episode CSV files in '" + dir + "'");
  sort_rows(rows);
  const std::vector<AggregateRow> agg = aggregate(rows);
  write_text_file(join_path(dir, "aggregate.csv"), format_aggregate_csv(agg));
  write_text_file(join_path(dir, "aggregate.txt"), format_aggregate_table(agg));
  out << format_aggregate_table(agg);
  return kExitOk;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& body) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) throw IoError("cannot write '" + path + "'");
  o << body;
  o.flush();
  if (!o) throw IoError("failed writing '" + path + "'");
}

SuiteManifest parse_manifest(std::string_view body) {
  SuiteManifest m;
  std::istringstream is{std::string(body)};
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto sp = t.find_first_of(" \t");
    if (sp == std::string::npos) throw ConfigError("manifest line " + std::to_string(n) + ": expected '<kind> <file>'");
    const std::string kind = t.substr(0, sp);
    const std::string file = text::trim(t.substr(sp + 1));
    if (kind == "scenario") {
      m.scenarios.push_back(file);
    } else if (kind == "cooccurrence") {
      if (m.cooccurrence) throw ConfigError("manifest line " + std::to_string(n) + ": second cooccurrence entry");
      m.cooccurrence = file;
    } else {
      throw ConfigError("manifest line " + std::to_string(n) + ": unknown entry kind '" + kind + "'");
    }
  }
  return m;
}

std::string format_manifest(const SuiteManifest& m) {
  std::string out = std::string(kManifestHeader) + "\n";
  if (m.cooccurrence) out += "cooccurrence " + *m.cooccurrence + "\n";
  for (const std::string& s : m.scenarios) out += "scenario " + s + "\n";
  return out;
}

LoadedSuite load_suite(const std::string& manifest_path) {
  const SuiteManifest m = parse_manifest(read_text_file(manifest_path));
  const fs::path base = fs::path(manifest_path).parent_path();
  auto resolve = [&](const std::string& f) {
    const fs::path p(f);
    return (p.is_absolute() ? p : base / p).string();
  };
  LoadedSuite out;
  if (m.cooccurrence) {
    const std::string path = resolve(*m.cooccurrence);
    try {
      out.cooccurrence = parse_cooccurrence(read_text_file(path));
    } catch (const ParseError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  for (const std::string& f : m.scenarios) {
    const std::string path = resolve(f);
    SuiteEntry e;
    e.id = fs::path(f).stem().string();
    try {
      e.scenario = load_scenario(read_text_file(path));
    } catch (const ParseError& err) {
      throw ConfigError(path + ": " + err.what());
    } catch (const ValidationError& err) {
      throw ConfigError(path + ": " + err.what());
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::optional<std::string>& env_out) {
  CLI::App app{"Object-goal navigation benchmark for semantic voxel/ray memory policies", "ravenbench"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-worlds", "Generate a suite of scenario documents");
  gen_cmd->add_option("--params", gen.params, "Generator parameter file")->required();
  gen_cmd->add_option("--count", gen.count, "Number of scenarios")->required();
  gen_cmd->add_option("--seed", gen.seed, "Suite seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory (default: $RAVENBENCH_OUT)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one episode");
  run_cmd->add_option("--scenario", run.scenario, "Scenario document")->required();
  run_cmd->add_option("--policy", run.policy, "Policy name: " + policy_names())->required();
  run_cmd->add_option("--seed", run.seed, "Episode seed")->required();
  run_cmd->add_option("--out", run.out, "Output directory (default: $RAVENBENCH_OUT)");
  run_cmd->add_option("--config", run.config, "Config file of key = value lines");
  run_cmd->add_option("--cooccurrence", run.cooccurrence, "Co-occurrence table for auxiliary cues");
  run_cmd->add_option("--override", run.overrides, "key=value, applied after the config file")->allow_extra_args(false);
  run_cmd->add_flag("--plot", run.plot, "Also write plot.svg");
  run_cmd->add_flag("--audit", run.audit, "Run invariant checks during the episode");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run policies x seeds over a suite");
  bench_cmd->add_option("--suite", bench.suite, "Suite manifest")->required();
  bench_cmd->add_option("--policies", bench.policies, "Comma-separated policy names")->required();
  bench_cmd->add_option("--seeds", bench.seeds, "Comma-separated seeds")->required();
  bench_cmd->add_option("--jobs", bench.jobs, "Parallel episodes");
  bench_cmd->add_option("--out", bench.out, "Output directory (default: $RAVENBENCH_OUT)");
  bench_cmd->add_option("--config", bench.config, "Config file of key = value lines");
  bench_cmd->add_option("--override", bench.overrides, "key=value, applied after the config file")
      ->allow_extra_args(false);
  bench_cmd->add_flag("--audit", bench.audit, "Run invariant checks in every episode");
  bench_cmd->add_flag("--quiet", bench.quiet, "No per-episode progress lines");

  std::string report_in;
  auto* report_cmd = app.add_subcommand("report", "Re-aggregate episode CSVs in a directory");
  report_cmd->add_option("--in", report_in, "Directory holding results CSVs (default: $RAVENBENCH_OUT)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ravenbench: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*gen_cmd) return cmd_gen_worlds(gen, env_out, out);
    if (*run_cmd) return cmd_run(run, env_out, out);
    if (*bench_cmd) return cmd_bench(bench, env_out, out, err);
    if (*report_cmd) return cmd_report(report_in, env_out, out);
  } catch (const IoError& e) {
    err << "ravenbench: " << e.what() << '\n';
    return kExitIo;
  } catch (const EpisodeError& e) {
    err << "ravenbench: " << e.what() << '\n';
    return kExitEpisode;
  } catch (const ConfigError& e) {
    err << "ravenbench: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "ravenbench: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "ravenbench: " << e.what() << '\n';
    return kExitConfig;
  } catch (const GenerationError& e) {
    err << "ravenbench: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "ravenbench: " << e.what() << '\n';
    return kExitEpisode;
  }
  return kExitConfig;
}

}  // namespace raven
