#include "lgplan/heuristics.hpp"

#include <algorithm>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "lgplan/errors.hpp"

namespace lgplan {

namespace {

Cost aggregate(const std::vector<Cost>& h, const std::vector<int>& props, DpKind kind) {
  Cost out = 0;
  for (int p : props) {
    const Cost v = h[static_cast<size_t>(p)];
    out = kind == DpKind::kAdd ? sat_add(out, v) : std::max(out, v);
    if (out >= kInfiniteCost) return kInfiniteCost;
  }
  return out;
}

struct DpResult {
  std::vector<Cost> prop;
  int iterations = 0;
};

DpResult run_dp(const StripsTask& task, const StripsState& state, DpKind kind,
                std::vector<std::vector<Cost>>* trace) {
  const size_t n = task.num_propositions();
  std::vector<Cost> h(n, kInfiniteCost);
  for (size_t p = 0; p < n; ++p) {
    if (state.test(static_cast<int>(p))) h[p] = 0;
  }
  if (trace) trace->push_back(h);
  std::vector<Cost> next;
  for (int i = 1;; ++i) {
    next = h;
    for (const auto& a : task.actions) {
      const Cost ha = aggregate(h, a.pre, kind);
      if (ha >= kInfiniteCost) continue;
      const Cost via = sat_add(ha, a.cost);
      for (int p : a.add) {
        auto& slot = next[static_cast<size_t>(p)];
        slot = std::min(slot, via);
      }
    }
    if (trace) trace->push_back(next);
    if (next == h) return {std::move(h), i};
    h.swap(next);
  }
}

std::vector<int> extract_relaxed_plan(const StripsTask& task, const StripsState& state,
                                      const std::vector<Cost>& h) {
  const size_t n = task.num_propositions();
  std::vector<int> supporter(n, -1);
  for (size_t ai = 0; ai < task.actions.size(); ++ai) {
    const auto& a = task.actions[ai];
    const Cost via = sat_add(aggregate(h, a.pre, DpKind::kAdd), a.cost);
    if (via >= kInfiniteCost) continue;
    for (int p : a.add) {
      const auto pi = static_cast<size_t>(p);
      if (supporter[pi] < 0 && !state.test(p) && via == h[pi]) supporter[pi] = static_cast<int>(ai);
    }
  }
  std::vector<int> plan;
  std::vector<char> in_plan(task.actions.size(), 0);
  std::vector<char> queued(n, 0);
  std::vector<int> open;
  for (int g : task.goal) {
    if (!state.test(g) && !queued[static_cast<size_t>(g)]) {
      queued[static_cast<size_t>(g)] = 1;
      open.push_back(g);
    }
  }
  while (!open.empty()) {
    const int p = open.back();
    open.pop_back();
    const int a = supporter[static_cast<size_t>(p)];
    if (in_plan[static_cast<size_t>(a)]) continue;
    in_plan[static_cast<size_t>(a)] = 1;
    plan.push_back(a);
    for (int q : task.actions[static_cast<size_t>(a)].pre) {
      if (!state.test(q) && !queued[static_cast<size_t>(q)]) {
        queued[static_cast<size_t>(q)] = 1;
        open.push_back(q);
      }
    }
  }
  std::sort(plan.begin(), plan.end());
  return plan;
}

}  // namespace

HeuristicValue h_dp(const StripsTask& task, const StripsState& state, DpKind kind) {
  const auto dp = run_dp(task, state, kind, nullptr);
  return {aggregate(dp.prop, task.goal, kind), dp.iterations};
}

std::vector<std::vector<Cost>> h_dp_trace(const StripsTask& task, const StripsState& state,
                                          DpKind kind) {
  std::vector<std::vector<Cost>> trace;
  run_dp(task, state, kind, &trace);
  return trace;
}

std::vector<int> relaxed_plan(const StripsTask& task, const StripsState& state) {
  const auto dp = run_dp(task, state, DpKind::kAdd, nullptr);
  if (aggregate(dp.prop, task.goal, DpKind::kAdd) >= kInfiniteCost) return {};
  return extract_relaxed_plan(task, state, dp.prop);
}

HeuristicValue h_ff(const StripsTask& task, const StripsState& state) {
  const auto dp = run_dp(task, state, DpKind::kAdd, nullptr);
  if (aggregate(dp.prop, task.goal, DpKind::kAdd) >= kInfiniteCost) {
    return HeuristicValue::infinity(dp.iterations);
  }
  Cost total = 0;
  for (int a : extract_relaxed_plan(task, state, dp.prop)) {
    total += task.actions[static_cast<size_t>(a)].cost;
  }
  return {total, dp.iterations};
}

HeuristicValue h_plus(const StripsTask& task, const StripsState& state,
                      const HPlusOptions& options) {
  const auto reach = run_dp(task, state, DpKind::kMax, nullptr);
  if (aggregate(reach.prop, task.goal, DpKind::kMax) >= kInfiniteCost) {
    return HeuristicValue::infinity();
  }
  int unreached = 0;
  for (size_t p = 0; p < reach.prop.size(); ++p) {
    if (reach.prop[p] > 0 && reach.prop[p] < kInfiniteCost) ++unreached;
  }
  if (unreached > options.max_unreached) {
    throw BudgetExceeded("h+ budget: " + std::to_string(unreached) +
                         " relaxed-reachable facts exceed the cap of " +
                         std::to_string(options.max_unreached));
  }

  // A* over fact sets; actions only ever add facts, so a node is the set of
  // facts reached so far.
  struct Entry {
    Cost f, g;
    size_t seq;
    int node;
    bool operator>(const Entry& o) const { return std::tie(f, g, seq) > std::tie(o.f, o.g, o.seq); }
  };
  std::vector<StripsState> nodes{state};
  std::vector<Cost> best_g{0};
  std::unordered_map<StripsState, int, PropSetHash> index{{state, 0}};
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  size_t seq = 0;
  auto h = [&](const StripsState& s) { return h_dp(task, s, DpKind::kMax).value; };
  open.push({h(state), 0, seq++, 0});
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    if (e.g > best_g[static_cast<size_t>(e.node)]) continue;
    const StripsState cur = nodes[static_cast<size_t>(e.node)];
    if (task.is_goal(cur)) return {e.g, 0};
    for (size_t ai = 0; ai < task.actions.size(); ++ai) {
      const auto& a = task.actions[ai];
      if (!cur.contains_all(a.pre)) continue;
      bool adds_new = false;
      for (int p : a.add) adds_new = adds_new || !cur.test(p);
      if (!adds_new) continue;
      StripsState next = cur;
      for (int p : a.add) next.set(p);
      const Cost g = e.g + a.cost;
      auto [it, fresh] = index.try_emplace(next, static_cast<int>(nodes.size()));
      if (fresh) {
        nodes.push_back(next);
        best_g.push_back(g);
      } else if (g < best_g[static_cast<size_t>(it->second)]) {
        best_g[static_cast<size_t>(it->second)] = g;
      } else {
        continue;
      }
      const Cost hv = h(next);
      if (hv >= kInfiniteCost) continue;
      open.push({g + hv, g, seq++, it->second});
    }
  }
  return HeuristicValue::infinity();
}

namespace {

struct UcsResult {
  Cost cost = kInfiniteCost;
  std::vector<int> plan;
};

UcsResult ucs(const StripsTask& task, const StripsState& start, const HStarOptions& options) {
  struct Entry {
    Cost g;
    size_t seq;
    int node;
    bool operator>(const Entry& o) const { return std::tie(g, seq) > std::tie(o.g, o.seq); }
  };
  std::vector<StripsState> nodes{start};
  std::vector<Cost> best_g{0};
  std::vector<int> parent{-1};
  std::vector<int> via{-1};
  std::vector<char> closed{0};
  std::unordered_map<StripsState, int, PropSetHash> index{{start, 0}};
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  size_t seq = 0;
  open.push({0, seq++, 0});
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const auto ni = static_cast<size_t>(e.node);
    if (closed[ni] || e.g > best_g[ni]) continue;
    closed[ni] = 1;
    if (task.is_goal(nodes[ni])) {
      UcsResult out{e.g, {}};
      for (int n = e.node; parent[static_cast<size_t>(n)] >= 0; n = parent[static_cast<size_t>(n)]) {
        out.plan.push_back(via[static_cast<size_t>(n)]);
      }
      std::reverse(out.plan.begin(), out.plan.end());
      return out;
    }
    for (size_t ai = 0; ai < task.actions.size(); ++ai) {
      const auto& a = task.actions[ai];
      if (!nodes[ni].contains_all(a.pre)) continue;
      StripsState next = nodes[ni];
      for (int p : a.del) next.reset(p);
      for (int p : a.add) next.set(p);
      const Cost g = e.g + a.cost;
      auto [it, fresh] = index.try_emplace(std::move(next), static_cast<int>(nodes.size()));
      const auto target = static_cast<size_t>(it->second);
      if (fresh) {
        if (nodes.size() >= options.max_states) {
          throw BudgetExceeded("h* search exceeded " + std::to_string(options.max_states) +
                               " states");
        }
        nodes.push_back(it->first);
        best_g.push_back(g);
        parent.push_back(e.node);
        via.push_back(static_cast<int>(ai));
        closed.push_back(0);
      } else if (!closed[target] && g < best_g[target]) {
        best_g[target] = g;
        parent[target] = e.node;
        via[target] = static_cast<int>(ai);
      } else {
        continue;
      }
      open.push({g, seq++, it->second});
    }
  }
  return {};
}

}  // namespace

HeuristicValue h_star(const StripsTask& task, const StripsState& state,
                      const HStarOptions& options) {
  return {ucs(task, state, options).cost, 0};
}

std::optional<std::vector<int>> optimal_plan(const StripsTask& task, const StripsState& state,
                                             const HStarOptions& options) {
  auto r = ucs(task, state, options);
  if (r.cost >= kInfiniteCost) return std::nullopt;
  return std::move(r.plan);
}

std::vector<LabeledState> label_dataset(const StripsTask& task, const std::vector<int>& plan) {
  const auto check = validate_plan(task, plan);
  if (!check.valid) throw InvalidPlan("cannot label an invalid plan: " + check.reason);
  std::vector<LabeledState> out;
  StripsState s = task.initial_state();
  double remaining = check.cost;
  out.push_back({s, remaining});
  for (int a : plan) {
    s = *apply(task, s, a);
    remaining -= task.actions[static_cast<size_t>(a)].cost;
    out.push_back({s, remaining});
  }
  return out;
}

}  // namespace lgplan
