#include <algorithm>
#include <deque>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <gtest/gtest.h>

#include "lgplan/domains.hpp"
#include "lgplan/errors.hpp"
#include "lgplan/grounding.hpp"
#include "lgplan/heuristics.hpp"
#include "lgplan/problem.hpp"
#include "lgplan/random.hpp"
#include "lgplan/theory.hpp"

using namespace lgplan;

namespace {

const std::string kFixtures = LGPLAN_FIXTURES;

std::vector<StripsState> reachable_states(const StripsTask& t) {
  std::unordered_set<StripsState, PropSetHash> seen{t.initial_state()};
  std::deque<StripsState> queue{t.initial_state()};
  std::vector<StripsState> out;
  while (!queue.empty()) {
    StripsState s = queue.front();
    queue.pop_front();
    for (size_t a = 0; a < t.actions.size(); ++a) {
      auto next = apply(t, s, static_cast<int>(a));
      if (next && seen.insert(*next).second) queue.push_back(*next);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Breadth-first distance to the goal (unit costs); -1 if unreachable.
long bfs_distance(const StripsTask& t, const StripsState& from) {
  std::unordered_map<StripsState, long, PropSetHash> dist{{from, 0}};
  std::deque<StripsState> queue{from};
  while (!queue.empty()) {
    StripsState s = queue.front();
    queue.pop_front();
    if (t.is_goal(s)) return dist[s];
    const long d = dist[s];
    for (size_t a = 0; a < t.actions.size(); ++a) {
      auto next = apply(t, s, static_cast<int>(a));
      if (next && dist.emplace(*next, d + 1).second) queue.push_back(*next);
    }
  }
  return -1;
}

// Relaxed planning graph depth: the h_max value under unit costs.
long rpg_depth(const StripsTask& t, const StripsState& s) {
  StripsState layer = s;
  for (long depth = 0;; ++depth) {
    if (t.is_goal(layer)) return depth;
    StripsState next = layer;
    for (const auto& a : t.actions) {
      if (layer.contains_all(a.pre)) {
        for (int p : a.add) next.set(p);
      }
    }
    if (next == layer) return -1;
    layer = next;
  }
}

// h+ by brute force over action subsets (tasks with at most ~12 actions).
long brute_hplus(const StripsTask& t, const StripsState& s) {
  const size_t n = t.actions.size();
  long best = -1;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    const long size = __builtin_popcount(mask);
    if (best >= 0 && size >= best) continue;
    StripsState reach = s;
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t a = 0; a < n; ++a) {
        if (!(mask >> a & 1) || !reach.contains_all(t.actions[a].pre)) continue;
        for (int p : t.actions[a].add) {
          if (!reach.test(p)) {
            reach.set(p);
            changed = true;
          }
        }
      }
    }
    if (t.is_goal(reach)) best = size;
  }
  return best;
}

long as_long(const HeuristicValue& h) { return h.infinite() ? -1 : static_cast<long>(h.value); }

void expect_dominance(const StripsTask& t, const StripsState& s, bool brute) {
  const HeuristicValue hmax = h_dp(t, s, DpKind::kMax);
  const HeuristicValue hadd = h_dp(t, s, DpKind::kAdd);
  const HeuristicValue hff = h_ff(t, s);
  const HeuristicValue hplus = h_plus(t, s);
  const HeuristicValue hstar = h_star(t, s);
  ASSERT_EQ(as_long(hmax), rpg_depth(t, s));
  ASSERT_EQ(as_long(hstar), bfs_distance(t, s));
  if (brute) {
    ASSERT_EQ(as_long(hplus), brute_hplus(t, s));
  }
  // Relaxed heuristics agree on relaxed dead ends; real dead ends may be
  // relaxed-solvable.
  ASSERT_EQ(hplus.infinite(), hmax.infinite());
  ASSERT_EQ(hff.infinite(), hmax.infinite());
  ASSERT_EQ(hadd.infinite(), hmax.infinite());
  if (hmax.infinite()) {
    ASSERT_TRUE(hstar.infinite());
    return;
  }
  EXPECT_LE(hmax.value, hplus.value);
  EXPECT_LE(hplus.value, hstar.value);
  EXPECT_GE(hff.value, hplus.value);
  EXPECT_LE(hff.value, hadd.value);
  EXPECT_GE(hadd.value, hmax.value);
}

}  // namespace

TEST(Dominance, GripperFixtureAllStates) {
  const Problem p = Problem::load(kFixtures + "/gripper/domain.pddl", kFixtures + "/gripper/p01.pddl");
  const auto states = reachable_states(p.strips());
  EXPECT_EQ(states.size(), 8u);  // robot room x ball location
  for (const auto& s : states) expect_dominance(p.strips(), s, true);
}

TEST(Dominance, SasFixtureAllStates) {
  const Problem p = Problem::load("", kFixtures + "/gripper-b1.sas");
  for (const auto& s : reachable_states(p.strips())) expect_dominance(p.strips(), s, true);
}

TEST(Dominance, GeneratedInstancesAllStates) {
  for (Domain d : {Domain::kGripper, Domain::kBlocksworld, Domain::kVisitall, Domain::kSpanner}) {
    const GeneratedTask g = generate_instance(d, d == Domain::kVisitall ? 2 : 3, 1);
    const StripsTask t = ground(g.task).task;
    const auto states = reachable_states(t);
    ASSERT_LE(states.size(), 10000u);
    for (const auto& s : states) expect_dominance(t, s, false);
  }
}

TEST(Dominance, RandomTasks) {
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) {
    const StripsTask t = random_unit_task(rng, 8, 8);
    for (const auto& s : reachable_states(t)) expect_dominance(t, s, true);
  }
}

TEST(HDp, TraceEndsAtFixpoint) {
  const auto [p1, p2] = gen_thm4_pair();
  for (DpKind k : {DpKind::kMax, DpKind::kAdd}) {
    const auto trace = h_dp_trace(p1, p1.initial_state(), k);
    const HeuristicValue h = h_dp(p1, p1.initial_state(), k);
    ASSERT_GE(trace.size(), 2u);
    EXPECT_EQ(trace.back(), trace[trace.size() - 2]);
    EXPECT_EQ(static_cast<int>(trace.size()) - 1, h.iterations);
  }
  EXPECT_EQ(h_dp(p1, p1.initial_state(), DpKind::kMax).value,
            h_dp(p2, p2.initial_state(), DpKind::kMax).value);
}

TEST(HDp, GoalStateIsZero) {
  const StripsTask t = gen_thm2_example();
  StripsState s = t.initial_state();
  for (int g : t.goal) s.set(g);
  EXPECT_EQ(h_dp(t, s, DpKind::kAdd).value, 0);
  EXPECT_EQ(h_ff(t, s).value, 0);
  EXPECT_TRUE(relaxed_plan(t, s).empty());
}

TEST(RelaxedPlan, ReachesGoalWhenRelaxed) {
  const Problem p = Problem::load(kFixtures + "/gripper/domain.pddl", kFixtures + "/gripper/p01.pddl");
  const StripsTask relaxed = delete_relaxation(p.strips());
  const auto plan = relaxed_plan(p.strips(), p.strips().initial_state());
  ASSERT_FALSE(plan.empty());
  // Some ordering of the relaxed plan must be executable: apply greedily.
  StripsState s = relaxed.initial_state();
  std::vector<int> todo = plan;
  while (!todo.empty()) {
    auto it = std::find_if(todo.begin(), todo.end(),
                           [&](int a) { return applicable(relaxed, s, a); });
    ASSERT_NE(it, todo.end());
    s = *apply(relaxed, s, *it);
    todo.erase(it);
  }
  EXPECT_TRUE(relaxed.is_goal(s));
}

TEST(Budgets, Exceeded) {
  const StripsTask t = ground(generate_instance(Domain::kGripper, 6, 0).task).task;
  EXPECT_THROW(h_star(t, t.initial_state(), HStarOptions{50}), BudgetExceeded);
  EXPECT_THROW(h_plus(t, t.initial_state(), HPlusOptions{3}), BudgetExceeded);
}

TEST(HStar, GripperMatchesClosedForm) {
  for (int b = 1; b <= 6; ++b) {
    const StripsTask t = ground(generate_instance(Domain::kGripper, b, 0).task).task;
    EXPECT_EQ(h_star(t, t.initial_state()).value, gripper_optimal_cost(b)) << "b=" << b;
  }
}

TEST(HStar, OptimalPlanAndLabels) {
  const StripsTask t = ground(generate_instance(Domain::kGripper, 3, 0).task).task;
  const auto plan = optimal_plan(t, t.initial_state());
  ASSERT_TRUE(plan.has_value());
  const PlanCheck check = validate_plan(t, *plan);
  EXPECT_TRUE(check.valid);
  EXPECT_EQ(check.cost, gripper_optimal_cost(3));
  const auto labels = label_dataset(t, *plan);
  ASSERT_EQ(labels.size(), plan->size() + 1);
  for (size_t i = 0; i < labels.size(); ++i) {
    EXPECT_DOUBLE_EQ(labels[i].target, static_cast<double>(plan->size() - i));
    // Labels along an optimal plan are optimal remaining costs.
    EXPECT_EQ(h_star(t, labels[i].state).value, static_cast<Cost>(labels[i].target));
  }
  EXPECT_TRUE(t.is_goal(labels.back().state));
  std::vector<int> broken = *plan;
  std::swap(broken[0], broken[1]);
  EXPECT_THROW(label_dataset(t, broken), InvalidPlan);
}

TEST(HStar, Thm3PairSolvability) {
  const auto [l1, l2] = gen_thm3_pair();
  const StripsTask t1 = ground(l1).task;
  const StripsTask t2 = ground(l2).task;
  EXPECT_EQ(t1.actions.size(), 2u);
  EXPECT_EQ(h_dp(t1, t1.initial_state(), DpKind::kMax).value, 1);
  EXPECT_EQ(h_dp(t1, t1.initial_state(), DpKind::kAdd).value, 2);
  EXPECT_TRUE(h_dp(t2, t2.initial_state(), DpKind::kMax).infinite());
  EXPECT_TRUE(h_dp(t2, t2.initial_state(), DpKind::kAdd).infinite());
  EXPECT_FALSE(optimal_plan(t2, t2.initial_state()).has_value());
}

TEST(SatAdd, Saturates) {
  EXPECT_EQ(sat_add(2, 3), 5);
  EXPECT_EQ(sat_add(kInfiniteCost, 1), kInfiniteCost);
  EXPECT_EQ(sat_add(kInfiniteCost - 1, kInfiniteCost - 1), kInfiniteCost);
  EXPECT_EQ(HeuristicValue::infinity().to_string(), "inf");
}
