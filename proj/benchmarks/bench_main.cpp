#include <benchmark/benchmark.h>

#include "lgplan/domains.hpp"
#include "lgplan/grounding.hpp"
#include "lgplan/heuristics.hpp"
#include "lgplan/mpnn.hpp"
#include "lgplan/problem.hpp"
#include "lgplan/search.hpp"
#include "lgplan/theory.hpp"

using namespace lgplan;

namespace {

Problem gripper(int balls) { return Problem::from_lifted(generate_instance(Domain::kGripper, balls, 0).task); }

void BM_Ground(benchmark::State& state) {
  const GeneratedTask g = generate_instance(Domain::kGripper, static_cast<int>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(ground(g.task));
}
BENCHMARK(BM_Ground)->Arg(10)->Arg(40);

void BM_Forward(benchmark::State& state) {
  const auto kind = static_cast<GraphKind>(state.range(0));
  const Problem p = gripper(static_cast<int>(state.range(1)));
  const IndexEncoder enc;
  const LearningGraph g = StateEncoder(p, kind, enc)(p.strips().initial_state());
  MpnnConfig c;
  c.kind = kind;
  const MpnnModel model(c);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(g));
  state.counters["nodes"] = g.num_nodes();
}
BENCHMARK(BM_Forward)->ArgsProduct({{0, 1, 2}, {5, 20}})->Unit(benchmark::kMicrosecond);

void BM_HeuristicEval(benchmark::State& state) {
  const Problem p = gripper(20);
  const StripsState s0 = p.strips().initial_state();
  const auto kind = state.range(0) == 0 ? DpKind::kMax : DpKind::kAdd;
  for (auto _ : state) benchmark::DoNotOptimize(h_dp(p.strips(), s0, kind));
}
BENCHMARK(BM_HeuristicEval)->Arg(0)->Arg(1);

void BM_GbfsHff(benchmark::State& state) {
  const Problem p = gripper(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gbfs(p.strips(), oracle_heuristic(p.strips(), "hff")));
}
BENCHMARK(BM_GbfsHff)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_WlRefine(benchmark::State& state) {
  const auto [p1, p2] = gen_thm5_pair(static_cast<int>(state.range(0)));
  const LearningGraph g = build_slg(p1, p1.initial_state());
  for (auto _ : state) benchmark::DoNotOptimize(wl_refine(g));
}
BENCHMARK(BM_WlRefine)->Arg(5)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
