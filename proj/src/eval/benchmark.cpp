#include "raven/eval/benchmark.hpp"

#include "raven/core/text.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace raven {

bool MetricsReport::any_error() const {
  return std::any_of(rows.begin(), rows.end(), [](const EpisodeRow& r) { return !r.error.empty(); });
}

void sort_rows(std::vector<EpisodeRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const EpisodeRow& a, const EpisodeRow& b) {
    if (a.policy != b.policy) return a.policy < b.policy;
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    return a.seed < b.seed;
  });
}

namespace {

int task_rank(const std::string& t) {
  if (t == "I") return 0;
  if (t == "II") return 1;
  if (t == "III") return 2;
  return 3;
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<EpisodeRow>& rows) {
  std::map<std::pair<std::string, std::string>, AggregateRow> acc;
  for (const EpisodeRow& r : rows) {
    AggregateRow& a = acc[{r.task_type, r.policy}];
    a.task_type = r.task_type;
    a.policy = r.policy;
    ++a.episodes;
    if (!r.error.empty() || r.terminated_by == "error") ++a.errors;
    a.progress += r.progress;
    a.ppl += r.ppl;
  }
  std::vector<AggregateRow> out;
  for (auto& [key, a] : acc) {
    a.progress /= a.episodes;
    a.ppl /= a.episodes;
    out.push_back(a);
  }
  std::stable_sort(out.begin(), out.end(), [](const AggregateRow& a, const AggregateRow& b) {
    if (task_rank(a.task_type) != task_rank(b.task_type)) return task_rank(a.task_type) < task_rank(b.task_type);
    if (a.task_type != b.task_type) return a.task_type < b.task_type;
    return a.policy < b.policy;
  });
  return out;
}

MetricsReport run_benchmark(const std::vector<SuiteEntry>& suite, const std::vector<PolicyKind>& policies,
                            const std::vector<std::uint64_t>& seeds, const BenchmarkOptions& options) {
  if (suite.empty()) throw std::invalid_argument("benchmark suite is empty");
  if (policies.empty()) throw std::invalid_argument("no policies given");
  if (seeds.empty()) throw std::invalid_argument("no seeds given");

  struct Job {
    std::size_t scenario;
    PolicyKind policy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < suite.size(); ++s)
    for (PolicyKind p : policies)
      for (std::uint64_t seed : seeds) jobs.push_back({s, p, seed});

  // optimal-path searches are shared by every episode of a scenario
  std::vector<std::once_flag> once(suite.size());
  std::vector<GoalDistances> distances(suite.size());
  auto distances_for = [&](std::size_t s) -> const GoalDistances& {
    std::call_once(once[s], [&] {
      const Scenario& sc = suite[s].scenario;
      distances[s] = goal_distances(sc.world, sc.start.position, goal_instances(sc.task, sc.world), sc.r_succ);
    });
    return distances[s];
  };

  std::vector<EpisodeRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      const SuiteEntry& entry = suite[job.scenario];
      EpisodeRow row;
      row.policy = to_string(job.policy);
      row.scenario = entry.id;
      row.seed = job.seed;
      row.task_type = to_string(entry.scenario.task.kind);
      try {
        const EpisodeResult res = run_episode(entry.scenario, job.policy, job.seed, options.episode);
        const EpisodeMetrics m = compute_metrics(res, entry.scenario,
                                                 res.reach_events.empty() ? nullptr : &distances_for(job.scenario));
        row.progress = m.progress;
        row.ppl = m.ppl;
        row.steps = res.steps;
        row.path_length = res.path_length;
        row.terminated_by = to_string(res.terminated_by);
        if (res.audit) row.audit_failures = res.audit->failures;
        if (m.ppl > m.progress + 1e-12) row.audit_failures.push_back("ppl exceeds progress");
      } catch (const std::exception& e) {
        row.terminated_by = "error";
        row.error = e.what();
        row.progress = row.ppl = 0.0;
      }
      if (options.on_row) options.on_row(row);
      rows[j] = std::move(row);
    }
  };
  const int n_threads = std::max(1, std::min<int>(options.jobs, int(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  MetricsReport report;
  report.rows = std::move(rows);
  sort_rows(report.rows);
  report.aggregate = aggregate(report.rows);
  return report;
}

std::string format_csv(const std::vector<EpisodeRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const EpisodeRow& r : rows)
    os << r.policy << ',' << r.scenario << ',' << r.seed << ',' << r.task_type << ',' << text::fmt(r.progress) << ','
       << text::fmt(r.ppl) << ',' << r.steps << ',' << text::fmt(r.path_length) << ',' << r.terminated_by << '\n';
  return os.str();
}

std::vector<EpisodeRow> parse_csv(std::string_view text_in) {
  std::vector<EpisodeRow> rows;
  std::istringstream is{std::string(text_in)};
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    if (!header) {
      if (text::trim(line) != kCsvHeader) throw std::runtime_error("line " + std::to_string(line_no) + ": unexpected header");
      header = true;
      continue;
    }
    const auto f = text::split(line, ',');
    auto bad = [&](const std::string& what) {
      return std::runtime_error("line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 9) throw bad("expected 9 fields");
    EpisodeRow r;
    long long seed = 0, steps = 0;
    r.policy = f[0];
    r.scenario = f[1];
    if (!text::parse_int(f[2], seed) || seed < 0) throw bad("bad seed");
    r.seed = std::uint64_t(seed);
    r.task_type = f[3];
    if (!text::parse_double(f[4], r.progress)) throw bad("bad progress");
    if (!text::parse_double(f[5], r.ppl)) throw bad("bad ppl");
    if (!text::parse_int(f[6], steps)) throw bad("bad steps");
    r.steps = int(steps);
    if (!text::parse_double(f[7], r.path_length)) throw bad("bad path_length");
    r.terminated_by = f[8];
    rows.push_back(std::move(r));
  }
  if (!header) throw std::runtime_error("empty CSV");
  return rows;
}

std::string format_aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "task_type,policy,episodes,errors,progress,ppl\n";
  for (const AggregateRow& a : rows)
    os << a.task_type << ',' << a.policy << ',' << a.episodes << ',' << a.errors << ',' << text::fmt(a.progress) << ','
       << text::fmt(a.ppl) << '\n';
  return os.str();
}

std::string format_aggregate_table(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-5s %-14s %8s %9s %9s\n", "task", "policy", "episodes", "progress", "ppl");
  os << buf;
  for (const AggregateRow& a : rows) {
    std::snprintf(buf, sizeof buf, "%-5s %-14s %8d %9.4f %9.4f\n", a.task_type.c_str(), a.policy.c_str(), a.episodes,
                  a.progress, a.ppl);
    os << buf;
  }
  return os.str();
}

}  // namespace raven
