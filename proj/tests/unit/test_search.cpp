#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <unordered_set>

#include <gtest/gtest.h>

#include "lgplan/domains.hpp"
#include "lgplan/errors.hpp"
#include "lgplan/grounding.hpp"
#include "lgplan/problem.hpp"
#include "lgplan/search.hpp"
#include "lgplan/theory.hpp"

using namespace lgplan;

namespace {

const std::string kFixtures = LGPLAN_FIXTURES;

StripsTask gripper(int balls) { return ground(generate_instance(Domain::kGripper, balls, 0).task).task; }

size_t count_reachable(const StripsTask& t) {
  std::unordered_set<StripsState, PropSetHash> seen{t.initial_state()};
  std::deque<StripsState> queue{t.initial_state()};
  while (!queue.empty()) {
    StripsState s = queue.front();
    queue.pop_front();
    for (size_t a = 0; a < t.actions.size(); ++a) {
      auto next = apply(t, s, static_cast<int>(a));
      if (next && seen.insert(*next).second) queue.push_back(*next);
    }
  }
  return seen.size();
}

}  // namespace

TEST(Blind, FindsOptimalPlanOnUnitCost) {
  for (int b = 1; b <= 4; ++b) {
    const StripsTask t = gripper(b);
    const SearchResult r = blind(t);
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(r.plan_cost, gripper_optimal_cost(b));
    EXPECT_TRUE(validate_plan(t, *r.plan).valid);
  }
}

TEST(Gbfs, CountersAreConsistent) {
  const StripsTask t = gripper(3);
  long long calls = 0;
  BatchHeuristic h = [&](std::span<const StripsState> states, std::span<double> out) {
    calls += static_cast<long long>(states.size());
    for (size_t i = 0; i < states.size(); ++i) {
      out[i] = static_cast<double>(h_dp(t, states[i], DpKind::kAdd).value);
    }
  };
  const SearchResult r = gbfs(t, h);
  ASSERT_TRUE(r.solved());
  EXPECT_EQ(r.evaluations, calls);
  EXPECT_LE(r.evaluations, r.generated);
  EXPECT_GE(r.expansions, static_cast<long long>(r.plan->size()));
  EXPECT_GT(r.peak_open_size, 0u);
  EXPECT_EQ(r.plan_cost, static_cast<Cost>(r.plan->size()));
}

TEST(Gbfs, PerfectHeuristicWalksStraightToGoal) {
  const StripsTask t = gripper(3);
  const SearchResult r = gbfs(t, oracle_heuristic(t, "hstar"));
  ASSERT_TRUE(r.solved());
  EXPECT_EQ(r.plan_cost, gripper_optimal_cost(3));
  EXPECT_EQ(r.expansions, gripper_optimal_cost(3));
}

TEST(Gbfs, BatchSizeDoesNotChangeSearch) {
  const StripsTask t = gripper(4);
  SearchConfig a, b;
  a.eval_batch = 1;
  b.eval_batch = 1000;
  const SearchResult ra = gbfs(t, oracle_heuristic(t, "hff"), a);
  const SearchResult rb = gbfs(t, oracle_heuristic(t, "hff"), b);
  EXPECT_EQ(*ra.plan, *rb.plan);
  EXPECT_EQ(ra.expansions, rb.expansions);
  EXPECT_EQ(ra.evaluations, rb.evaluations);
}

TEST(Gbfs, UnsolvableIsExhausted) {
  const auto [l1, l2] = gen_thm3_pair();
  const StripsTask t2 = ground(l2).task;
  const SearchResult r = blind(t2);
  EXPECT_EQ(r.status, SearchStatus::kExhausted);
  EXPECT_FALSE(r.plan.has_value());
  EXPECT_EQ(gbfs(t2, oracle_heuristic(t2, "hmax")).status, SearchStatus::kExhausted);

  // Exhausting the reachable space expands every reachable state once.
  const StripsTask t = gripper(2);
  StripsTask no_goal = t;
  no_goal.goal = {static_cast<int>(no_goal.propositions.size())};
  no_goal.propositions.push_back("unreachable");
  const SearchResult all = blind(no_goal);
  EXPECT_EQ(all.status, SearchStatus::kExhausted);
  EXPECT_EQ(static_cast<size_t>(all.expansions), count_reachable(t));
}

TEST(Gbfs, InfinityPrunes) {
  const StripsTask t = gripper(2);
  BatchHeuristic dead = [](std::span<const StripsState>, std::span<double> out) {
    for (double& v : out) v = std::numeric_limits<double>::infinity();
  };
  const SearchResult r = gbfs(t, dead);
  EXPECT_EQ(r.status, SearchStatus::kExhausted);
  EXPECT_EQ(r.expansions, 0);
}

TEST(Gbfs, Limits) {
  const StripsTask t = gripper(6);
  SearchConfig cap;
  cap.max_nodes = 50;
  EXPECT_EQ(blind(t, cap).status, SearchStatus::kNodeCap);
  SearchConfig quick;
  quick.timeout_seconds = 1e-9;
  EXPECT_EQ(blind(t, quick).status, SearchStatus::kTimeout);
  SearchConfig bad;
  bad.eval_batch = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Gbfs, GoalInitialState) {
  const StripsTask t = gen_thm2_example();
  StripsTask done = t;
  done.goal = {t.init.front()};
  const SearchResult r = blind(done);
  ASSERT_TRUE(r.solved());
  EXPECT_TRUE(r.plan->empty());
  EXPECT_EQ(r.expansions, 0);  // the goal test pops, it does not expand
  EXPECT_EQ(r.generated, 1);
}

TEST(Oracles, AllNamesWork) {
  const StripsTask t = gripper(2);
  for (const char* name : {"blind", "hmax", "hadd", "hff", "hplus", "hstar"}) {
    const SearchResult r = gbfs(t, oracle_heuristic(t, name));
    EXPECT_TRUE(r.solved()) << name;
  }
  EXPECT_THROW(oracle_heuristic(t, "hgc"), Error);
}

TEST(PlanText, RoundTrip) {
  const StripsTask t = gripper(2);
  const SearchResult r = blind(t);
  const std::string text = plan_text(t, *r.plan);
  EXPECT_NE(text.find("; cost = 5 (unit cost)"), std::string::npos);
  EXPECT_EQ(parse_plan(t, text), *r.plan);
  EXPECT_THROW(parse_plan(t, "(fly a b)\n"), UnknownActionId);
}

TEST(ResultJson, TimingFlag) {
  const StripsTask t = gripper(1);
  const SearchResult r = blind(t);
  const std::string a = result_json(r, false);
  EXPECT_NE(a.find("\"solved\""), std::string::npos);
  EXPECT_EQ(a, result_json(blind(t), false));
}

TEST(Experiment, RowsInTaskHeuristicOrder) {
  std::vector<GeneratedTask> gen;
  for (int b = 1; b <= 3; ++b) gen.push_back(generate_instance(Domain::kGripper, b, 0));
  const std::vector<Problem> suite = to_problems(gen);
  const std::vector<HeuristicSpec> hs{
      {"blind", [](const Problem& p) { return oracle_heuristic(p.strips(), "blind"); }},
      {"hff", [](const Problem& p) { return oracle_heuristic(p.strips(), "hff"); }}};
  const ExperimentReport one = run_experiment(suite, hs, {}, 1);
  const ExperimentReport three = run_experiment(suite, hs, {}, 3);
  ASSERT_EQ(one.rows.size(), 6u);
  EXPECT_EQ(one.rows[0].heuristic, "blind");
  EXPECT_EQ(one.rows[1].heuristic, "hff");
  EXPECT_EQ(one.rows[0].task, one.rows[1].task);
  EXPECT_EQ(one.to_csv(false), three.to_csv(false));
  EXPECT_EQ(one.coverage("hff"), 3);
  EXPECT_EQ(one.coverage_csv(), "heuristic,solved,total\nblind,3,3\nhff,3,3\n");
  EXPECT_EQ(one.to_csv(false).rfind(
                "task,heuristic,status,cost,expansions,evaluations,generated,peak_open,seconds\n", 0),
            0u);
}
