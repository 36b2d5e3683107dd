#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lgplan/graph.hpp"
#include "lgplan/heuristics.hpp"
#include "lgplan/problem.hpp"
#include "lgplan/task.hpp"
#include "lgplan/training.hpp"

namespace lgplan {

enum class Domain { kGripper, kBlocksworld, kVisitall, kSpanner };

std::string_view to_string(Domain domain);
Domain parse_domain(std::string_view name);

// Inclusive size bounds accepted by generate_instance.
struct SizeRange {
  int lo = 1;
  int hi = 1;
};
SizeRange size_bounds(Domain domain);

std::string domain_pddl(Domain domain);

struct GeneratedTask {
  std::string name;  // e.g. "gripper-n03-s0"
  Domain domain = Domain::kGripper;
  int size = 0;
  uint64_t seed = 0;
  std::string problem_pddl;
  LiftedTask task;  // parse_pddl(domain_pddl, problem_pddl)
};

// Size meanings: gripper = balls, blocksworld = blocks, visitall = grid side,
// spanner = spanners (= nuts = corridor length). Throws InvalidSize.
GeneratedTask generate_instance(Domain domain, int size, uint64_t seed);

// Optimal plan length of the gripper task with b balls: b picks, b drops
// and 2*ceil(b/2) - 1 moves.
int gripper_optimal_cost(int balls);

struct SuiteSpec {
  Domain domain = Domain::kGripper;
  SizeRange train{1, 6};
  SizeRange validate{7, 8};
  SizeRange test{7, 10};
  int per_size = 1;
  uint64_t seed = 0;

  // Throws InvalidSize: bad ranges, train sizes not below test sizes.
  void check() const;
};

struct Suite {
  SuiteSpec spec;
  std::vector<GeneratedTask> train;
  std::vector<GeneratedTask> validate;
  std::vector<GeneratedTask> test;

  std::string manifest_json() const;
};

Suite generate(const SuiteSpec& spec);

// dir/domain.pddl, dir/{train,validate,test}/pNN.pddl, dir/manifest.json.
void write_suite(const Suite& suite, const std::filesystem::path& dir);

std::vector<Problem> to_problems(std::span<const GeneratedTask> tasks);

// Optimal plan per task, one sample per state along it labelled with the
// remaining cost. Tasks over the h* budget or unsolvable are skipped and
// reported in `warnings`.
std::vector<LabeledGraphSample> build_training_set(std::span<const Problem> tasks, GraphKind kind,
                                                   const IndexEncoder& encoder,
                                                   const HStarOptions& budget = {},
                                                   std::vector<std::string>* warnings = nullptr);

}  // namespace lgplan
