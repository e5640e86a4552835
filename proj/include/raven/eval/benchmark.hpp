#ifndef RAVEN_EVAL_BENCHMARK_HPP
#define RAVEN_EVAL_BENCHMARK_HPP

#include "raven/eval/metrics.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace raven {

struct SuiteEntry {
  std::string id;
  Scenario scenario;
};

struct EpisodeRow {
  std::string policy;
  std::string scenario;
  std::uint64_t seed = 0;
  std::string task_type;
  double progress = 0.0;
  double ppl = 0.0;
  int steps = 0;
  double path_length = 0.0;
  std::string terminated_by;  // "error" when the episode threw
  std::string error;
  std::vector<std::string> audit_failures;
};

struct AggregateRow {
  std::string task_type;
  std::string policy;
  int episodes = 0;
  int errors = 0;
  double progress = 0.0;
  double ppl = 0.0;
};

struct MetricsReport {
  std::vector<EpisodeRow> rows;  // sorted by (policy, scenario, seed)
  std::vector<AggregateRow> aggregate;
  bool any_error() const;
};

struct BenchmarkOptions {
  EpisodeOptions episode;
  int jobs = 1;
  /// Called from worker threads after each episode; must be thread-safe.
  std::function<void(const EpisodeRow&)> on_row;
};

/// Every scenario x policy x seed. Output does not depend on `jobs`.
MetricsReport run_benchmark(const std::vector<SuiteEntry>& suite, const std::vector<PolicyKind>& policies,
                            const std::vector<std::uint64_t>& seeds, const BenchmarkOptions& options = {});

void sort_rows(std::vector<EpisodeRow>& rows);
/// Mean Progress / PPL per (task type, policy); errored rows count as zeros.
std::vector<AggregateRow> aggregate(const std::vector<EpisodeRow>& rows);

inline constexpr const char* kCsvHeader = "policy,scenario,seed,task_type,progress,ppl,steps,path_length,terminated_by";

std::string format_csv(const std::vector<EpisodeRow>& rows);
/// Throws std::runtime_error naming the bad line.
std::vector<EpisodeRow> parse_csv(std::string_view text);
std::string format_aggregate_csv(const std::vector<AggregateRow>& rows);
/// Fixed-width table for terminals.
std::string format_aggregate_table(const std::vector<AggregateRow>& rows);

}  // namespace raven

#endif  // RAVEN_EVAL_BENCHMARK_HPP
