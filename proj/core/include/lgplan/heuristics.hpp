#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lgplan/task.hpp"

namespace lgplan {

// Integer heuristic value or the INFINITY marker. Arithmetic on Cost
// saturates at kInfiniteCost.
using Cost = int64_t;
inline constexpr Cost kInfiniteCost = std::numeric_limits<int64_t>::max() / 4;

inline Cost sat_add(Cost a, Cost b) {
  if (a >= kInfiniteCost || b >= kInfiniteCost) return kInfiniteCost;
  const Cost s = a + b;
  return s >= kInfiniteCost ? kInfiniteCost : s;
}

struct HeuristicValue {
  Cost value = 0;
  int iterations = 0;  // DP iterations to the fixpoint (h_add / h_max / h_ff)

  bool infinite() const { return value >= kInfiniteCost; }
  double as_double() const {
    return infinite() ? std::numeric_limits<double>::infinity() : static_cast<double>(value);
  }
  std::string to_string() const { return infinite() ? "inf" : std::to_string(value); }

  static HeuristicValue infinity(int iterations = 0) { return {kInfiniteCost, iterations}; }
};

enum class DpKind { kAdd, kMax };

// Naive fixpoint iteration for h_add / h_max. `iterations` is the first i
// with h^(i) = h^(i-1).
HeuristicValue h_dp(const StripsTask& task, const StripsState& state, DpKind kind);

// Proposition tables h^(0), h^(1), ... up to and including the fixpoint.
std::vector<std::vector<Cost>> h_dp_trace(const StripsTask& task, const StripsState& state,
                                          DpKind kind);

// Relaxed plan from h_add best supporters (ties: lowest action id); the
// value is the summed cost of its distinct actions.
HeuristicValue h_ff(const StripsTask& task, const StripsState& state);
// The relaxed plan itself (empty when the goal holds or is unreachable).
std::vector<int> relaxed_plan(const StripsTask& task, const StripsState& state);

struct HPlusOptions {
  // Cap on facts that are relaxed-reachable from the state but not yet true.
  int max_unreached = 25;
};

// Optimal delete-relaxation cost by A* over relaxed fact sets with h_max.
// Throws BudgetExceeded when the reachable-fact budget is exceeded.
HeuristicValue h_plus(const StripsTask& task, const StripsState& state,
                      const HPlusOptions& options = {});

struct HStarOptions {
  size_t max_states = 1'000'000;
};

// Uniform-cost search. Throws BudgetExceeded past max_states.
HeuristicValue h_star(const StripsTask& task, const StripsState& state,
                      const HStarOptions& options = {});
// Cost-optimal plan, or nullopt if the goal is unreachable.
std::optional<std::vector<int>> optimal_plan(const StripsTask& task, const StripsState& state,
                                             const HStarOptions& options = {});

struct LabeledState {
  StripsState state;
  double target = 0.0;
};

// States s_0 .. s_n along the plan from init, each labelled with the cost of
// the remaining plan suffix.
// Throws InvalidPlan if the plan does not validate.
std::vector<LabeledState> label_dataset(const StripsTask& task, const std::vector<int>& plan);

}  // namespace lgplan
