#include "lgplan/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "lgplan/errors.hpp"
#include "parallel.hpp"

namespace lgplan {

std::string_view to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::kSolved: return "solved";
    case SearchStatus::kExhausted: return "exhausted";
    case SearchStatus::kTimeout: return "timeout";
    case SearchStatus::kNodeCap: return "node_cap";
  }
  return "?";
}

void SearchConfig::validate() const {
  if (!(timeout_seconds > 0.0)) throw Error("search timeout must be positive");
  if (eval_batch < 1) throw Error("eval_batch must be at least 1");
  if (max_nodes < 1) throw Error("node cap must be at least 1");
}

BatchHeuristic pointwise(std::function<double(const StripsState&)> h) {
  return [h = std::move(h)](std::span<const StripsState> states, std::span<double> out) {
    for (size_t i = 0; i < states.size(); ++i) out[i] = h(states[i]);
  };
}

BatchHeuristic oracle_heuristic(const StripsTask& task, std::string_view name) {
  const StripsTask* t = &task;
  if (name == "blind") return pointwise([](const StripsState&) { return 0.0; });
  if (name == "hmax") {
    return pointwise([t](const StripsState& s) { return h_dp(*t, s, DpKind::kMax).as_double(); });
  }
  if (name == "hadd") {
    return pointwise([t](const StripsState& s) { return h_dp(*t, s, DpKind::kAdd).as_double(); });
  }
  if (name == "hff") return pointwise([t](const StripsState& s) { return h_ff(*t, s).as_double(); });
  if (name == "hplus") {
    return pointwise([t](const StripsState& s) { return h_plus(*t, s).as_double(); });
  }
  if (name == "hstar") {
    return pointwise([t](const StripsState& s) { return h_star(*t, s).as_double(); });
  }
  throw Error("unknown heuristic '" + std::string(name) +
              "' (expected blind, hmax, hadd, hff, hplus, hstar)");
}

BatchHeuristic model_heuristic(const MpnnModel& model, const StateEncoder& encoder, int jobs) {
  return [&model, &encoder, jobs](std::span<const StripsState> states, std::span<double> out) {
    std::vector<LearningGraph> graphs(states.size());
    detail::parallel_for(states.size(), jobs, [&](size_t i) { graphs[i] = encoder(states[i]); });
    const auto y = model.forward_batch(std::span<const LearningGraph>(graphs), jobs);
    for (size_t i = 0; i < y.size(); ++i) out[i] = std::max(0.0, y[i]);
  };
}

SearchResult gbfs(const StripsTask& task, const BatchHeuristic& heuristic,
                  const SearchConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(config.timeout_seconds));

  struct Entry {
    double h;
    uint64_t seq;
    int node;
    bool operator>(const Entry& o) const { return std::tie(h, seq) > std::tie(o.h, o.seq); }
  };
  std::vector<StripsState> nodes;
  std::vector<int> parent;
  std::vector<int> via;
  std::unordered_map<StripsState, int, PropSetHash> seen;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  uint64_t seq = 0;
  SearchResult result;

  auto finish = [&](SearchStatus status) {
    result.status = status;
    result.wall_nanos =
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
    return result;
  };

  const StripsState init = task.initial_state();
  nodes.push_back(init);
  parent.push_back(-1);
  via.push_back(-1);
  seen.emplace(init, 0);
  result.generated = 1;
  {
    double h0 = 0.0;
    heuristic(std::span<const StripsState>(&init, 1), std::span<double>(&h0, 1));
    ++result.evaluations;
    if (!std::isinf(h0)) open.push({h0, seq++, 0});
  }
  result.peak_open_size = open.size();

  std::vector<StripsState> batch;
  std::vector<int> batch_node;
  std::vector<double> hs;
  while (!open.empty()) {
    if (Clock::now() >= deadline) return finish(SearchStatus::kTimeout);
    const Entry e = open.top();
    open.pop();
    const auto cur = static_cast<size_t>(e.node);
    if (task.is_goal(nodes[cur])) {
      std::vector<int> plan;
      for (int n = e.node; parent[static_cast<size_t>(n)] >= 0; n = parent[static_cast<size_t>(n)]) {
        plan.push_back(via[static_cast<size_t>(n)]);
      }
      std::reverse(plan.begin(), plan.end());
      const auto check = validate_plan(task, plan);
      if (!check.valid) throw InvalidPlan("search produced an invalid plan: " + check.reason);
      result.plan_cost = check.cost;
      result.plan = std::move(plan);
      return finish(SearchStatus::kSolved);
    }
    ++result.expansions;

    batch.clear();
    batch_node.clear();
    for (size_t ai = 0; ai < task.actions.size(); ++ai) {
      const auto& a = task.actions[ai];
      if (!nodes[cur].contains_all(a.pre)) continue;
      StripsState next = nodes[cur];
      for (int p : a.del) next.reset(p);
      for (int p : a.add) next.set(p);
      ++result.generated;
      auto [it, fresh] = seen.try_emplace(std::move(next), static_cast<int>(nodes.size()));
      if (!fresh) continue;
      nodes.push_back(it->first);
      parent.push_back(e.node);
      via.push_back(static_cast<int>(ai));
      batch.push_back(it->first);
      batch_node.push_back(it->second);
    }
    hs.assign(batch.size(), 0.0);
    const auto step = static_cast<size_t>(config.eval_batch);
    for (size_t lo = 0; lo < batch.size(); lo += step) {
      const size_t len = std::min(step, batch.size() - lo);
      heuristic(std::span<const StripsState>(batch.data() + lo, len),
                std::span<double>(hs.data() + lo, len));
      result.evaluations += static_cast<long long>(len);
    }
    for (size_t i = 0; i < batch.size(); ++i) {
      if (!std::isinf(hs[i])) open.push({hs[i], seq++, batch_node[i]});
    }
    result.peak_open_size = std::max(result.peak_open_size, open.size());
    if (seen.size() >= config.max_nodes) return finish(SearchStatus::kNodeCap);
  }
  return finish(SearchStatus::kExhausted);
}

SearchResult blind(const StripsTask& task, const SearchConfig& config) {
  return gbfs(task, oracle_heuristic(task, "blind"), config);
}

std::string plan_text(const StripsTask& task, std::span<const int> plan) {
  std::string out;
  long long cost = 0;
  bool unit = true;
  for (int a : plan) {
    const auto& act = task.actions.at(static_cast<size_t>(a));
    std::string name = act.name;
    if (name.empty() || name.front() != '(') name = "(" + name + ")";
    out += name + "\n";
    cost += act.cost;
    unit = unit && act.cost == 1;
  }
  out += "; cost = " + std::to_string(cost) + (unit ? " (unit cost)" : " (general cost)") + "\n";
  return out;
}

std::vector<int> parse_plan(const StripsTask& task, std::string_view text) {
  std::unordered_map<std::string, int> by_name;
  auto strip = [](std::string s) {
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    return s;
  };
  for (size_t i = 0; i < task.actions.size(); ++i) {
    by_name.emplace(strip(task.actions[i].name), static_cast<int>(i));
  }
  std::vector<int> plan;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == ';') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string name = strip(line.substr(b, e - b + 1));
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw UnknownActionId("unknown action in plan: " + name);
    plan.push_back(it->second);
  }
  return plan;
}

std::string result_json(const SearchResult& r, bool timing) {
  nlohmann::ordered_json j;
  j["status"] = std::string(to_string(r.status));
  j["plan_cost"] = r.solved() ? nlohmann::ordered_json(r.plan_cost) : nlohmann::ordered_json();
  j["plan"] = r.plan ? nlohmann::ordered_json(*r.plan) : nlohmann::ordered_json();
  j["expansions"] = r.expansions;
  j["evaluations"] = r.evaluations;
  j["generated"] = r.generated;
  j["peak_open_size"] = r.peak_open_size;
  j["wall_nanos"] = timing ? r.wall_nanos : 0;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::to_csv(bool timing) const {
  std::string out = "task,heuristic,status,cost,expansions,evaluations,generated,peak_open,seconds\n";
  char buf[128];
  for (const auto& row : rows) {
    const auto& r = row.result;
    out += row.task + "," + row.heuristic + "," + std::string(to_string(r.status)) + ",";
    out += r.solved() ? std::to_string(r.plan_cost) : "";
    std::snprintf(buf, sizeof buf, ",%lld,%lld,%lld,%zu,%.6f\n", r.expansions, r.evaluations,
                  r.generated, r.peak_open_size, timing ? static_cast<double>(r.wall_nanos) * 1e-9 : 0.0);
    out += buf;
  }
  return out;
}

int ExperimentReport::coverage(std::string_view heuristic) const {
  int n = 0;
  for (const auto& row : rows) {
    if (row.heuristic == heuristic && row.result.solved()) ++n;
  }
  return n;
}

std::string ExperimentReport::coverage_csv() const {
  std::vector<std::string> names;
  for (const auto& row : rows) {
    if (std::find(names.begin(), names.end(), row.heuristic) == names.end()) {
      names.push_back(row.heuristic);
    }
  }
  std::string out = "heuristic,solved,total\n";
  for (const auto& name : names) {
    const auto total = std::count_if(rows.begin(), rows.end(),
                                     [&](const ExperimentRow& r) { return r.heuristic == name; });
    out += name + "," + std::to_string(coverage(name)) + "," + std::to_string(total) + "\n";
  }
  return out;
}

ExperimentReport run_experiment(std::span<const Problem> suite,
                                std::span<const HeuristicSpec> heuristics,
                                const SearchConfig& config, int jobs) {
  config.validate();
  ExperimentReport report;
  report.rows.resize(suite.size() * heuristics.size());
  detail::parallel_for(suite.size(), jobs, [&](size_t t) {
    for (size_t h = 0; h < heuristics.size(); ++h) {
      auto& row = report.rows[t * heuristics.size() + h];
      row.task = suite[t].name();
      row.heuristic = heuristics[h].name;
      row.result = gbfs(suite[t].strips(), heuristics[h].make(suite[t]), config);
    }
  });
  return report;
}

}  // namespace lgplan
