#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lgplan/heuristics.hpp"
#include "lgplan/mpnn.hpp"
#include "lgplan/problem.hpp"
#include "lgplan/task.hpp"

namespace lgplan {

enum class SearchStatus { kSolved, kExhausted, kTimeout, kNodeCap };
std::string_view to_string(SearchStatus status);

struct SearchConfig {
  double timeout_seconds = 600.0;
  // Soft memory cap: search stops once this many distinct states were seen.
  size_t max_nodes = 5'000'000;
  int eval_batch = 64;

  void validate() const;  // throws Error
};

struct SearchResult {
  SearchStatus status = SearchStatus::kExhausted;
  std::optional<std::vector<int>> plan;
  long long expansions = 0;
  long long evaluations = 0;
  long long generated = 0;  // includes the initial state
  Cost plan_cost = 0;
  int64_t wall_nanos = 0;
  size_t peak_open_size = 0;

  bool solved() const { return status == SearchStatus::kSolved; }
};

// Fills out[i] with h(states[i]); +infinity prunes the state. Must be
// positional: out[i] may only depend on states[i].
using BatchHeuristic =
    std::function<void(std::span<const StripsState> states, std::span<double> out)>;

BatchHeuristic pointwise(std::function<double(const StripsState&)> h);
// "blind", "hmax", "hadd", "hff", "hplus", "hstar". The task must outlive
// the heuristic. Throws Error on unknown names.
BatchHeuristic oracle_heuristic(const StripsTask& task, std::string_view name);
// Learned heuristic: builds one graph per state and runs the model on the
// batch. Outputs are clamped at 0. Model and encoder must outlive it.
BatchHeuristic model_heuristic(const MpnnModel& model, const StateEncoder& encoder, int jobs = 1);

// Eager GBFS. Open list keyed (h, insertion order); a state is evaluated
// once, on first generation; no reopening; goal test on expansion. Solved
// plans are always validated (InvalidPlan on failure).
SearchResult gbfs(const StripsTask& task, const BatchHeuristic& heuristic,
                  const SearchConfig& config = {});
// gbfs with h = 0, i.e. breadth-first search.
SearchResult blind(const StripsTask& task, const SearchConfig& config = {});

// One action name per line, then "; cost = N (unit cost)".
std::string plan_text(const StripsTask& task, std::span<const int> plan);
// Parses plan_text output (comments and blank lines skipped, optional
// surrounding parentheses). Throws UnknownActionId for unknown names.
std::vector<int> parse_plan(const StripsTask& task, std::string_view text);

std::string result_json(const SearchResult& result, bool timing = true);

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

struct HeuristicSpec {
  std::string name;
  std::function<BatchHeuristic(const Problem&)> make;
};

struct ExperimentRow {
  std::string task;
  std::string heuristic;
  SearchResult result;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;

  // task,heuristic,status,cost,expansions,evaluations,generated,peak_open,seconds
  std::string to_csv(bool timing = true) const;
  // heuristic,solved,total
  std::string coverage_csv() const;
  int coverage(std::string_view heuristic) const;
};

// Runs every heuristic on every task. Tasks are processed by up to `jobs`
// worker threads; rows come back in (task, heuristic) order.
ExperimentReport run_experiment(std::span<const Problem> suite,
                                std::span<const HeuristicSpec> heuristics,
                                const SearchConfig& config, int jobs = 1);

}  // namespace lgplan
