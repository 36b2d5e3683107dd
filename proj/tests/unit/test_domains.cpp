#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "lgplan/domains.hpp"
#include "lgplan/errors.hpp"
#include "lgplan/grounding.hpp"
#include "lgplan/io.hpp"
#include "lgplan/pddl.hpp"

using namespace lgplan;

namespace {

const Domain kAll[] = {Domain::kGripper, Domain::kBlocksworld, Domain::kVisitall, Domain::kSpanner};

}  // namespace

TEST(Domains, Names) {
  for (Domain d : kAll) EXPECT_EQ(parse_domain(to_string(d)), d);
  EXPECT_THROW(parse_domain("sokoban"), Error);
}

TEST(Generators, DeterministicPerSeed) {
  for (Domain d : kAll) {
    const int size = size_bounds(d).lo + 2;
    const GeneratedTask a = generate_instance(d, size, 5);
    const GeneratedTask b = generate_instance(d, size, 5);
    EXPECT_EQ(a.problem_pddl, b.problem_pddl);
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(a.size, size);
  }
  // Blocksworld layouts depend on the seed.
  bool differs = false;
  for (uint64_t s = 1; s < 6; ++s) {
    differs |= generate_instance(Domain::kBlocksworld, 6, 0).problem_pddl !=
               generate_instance(Domain::kBlocksworld, 6, s).problem_pddl;
  }
  EXPECT_TRUE(differs);
}

TEST(Generators, PddlRoundTrip) {
  for (Domain d : kAll) {
    for (int size = size_bounds(d).lo; size <= size_bounds(d).lo + 3; ++size) {
      const GeneratedTask g = generate_instance(d, size, 2);
      const LiftedTask parsed = parse_pddl(domain_pddl(d), g.problem_pddl);
      EXPECT_EQ(parsed.objects, g.task.objects);
      EXPECT_EQ(parsed.init, g.task.init);
      EXPECT_EQ(parsed.goal, g.task.goal);
      EXPECT_NO_THROW(parsed.validate());
    }
  }
}

TEST(Generators, SmallInstancesSolvable) {
  for (Domain d : kAll) {
    for (int size = size_bounds(d).lo; size <= size_bounds(d).lo + 1; ++size) {
      const StripsTask t = ground(generate_instance(d, size, 3).task).task;
      const HeuristicValue h = h_star(t, t.initial_state());
      EXPECT_FALSE(h.infinite()) << to_string(d) << " size " << size;
    }
  }
}

TEST(Generators, GripperScales) {
  for (int b : {1, 2, 5}) {
    const StripsTask t = ground(generate_instance(Domain::kGripper, b, 0).task).task;
    // at-robby x2, at(ball, room) x2b, carry x2b, free x2.
    EXPECT_EQ(t.num_propositions(), static_cast<size_t>(4 + 4 * b));
    // move x2, pick and drop x 2 rooms x 2 grippers per ball.
    EXPECT_EQ(t.actions.size(), static_cast<size_t>(2 + 8 * b));
  }
  EXPECT_EQ(gripper_optimal_cost(1), 3);
  EXPECT_EQ(gripper_optimal_cost(2), 5);
  EXPECT_EQ(gripper_optimal_cost(7), 21);
}

TEST(Generators, SizeBounds) {
  for (Domain d : kAll) {
    EXPECT_THROW(generate_instance(d, size_bounds(d).lo - 1, 0), InvalidSize);
    EXPECT_THROW(generate_instance(d, size_bounds(d).hi + 1, 0), InvalidSize);
  }
}

TEST(Suite, SpecChecks) {
  SuiteSpec ok;
  EXPECT_NO_THROW(ok.check());
  SuiteSpec overlap;
  overlap.train = {1, 7};
  overlap.test = {7, 10};
  EXPECT_THROW(overlap.check(), InvalidSize);
  SuiteSpec inverted;
  inverted.test = {9, 8};
  EXPECT_THROW(inverted.check(), InvalidSize);
  SuiteSpec zero;
  zero.per_size = 0;
  EXPECT_THROW(zero.check(), InvalidSize);
}

TEST(Suite, GenerateAndWrite) {
  SuiteSpec spec;
  spec.per_size = 2;
  spec.test = {7, 8};
  const Suite suite = generate(spec);
  EXPECT_EQ(suite.train.size(), 12u);
  EXPECT_EQ(suite.validate.size(), 4u);
  EXPECT_EQ(suite.test.size(), 4u);
  EXPECT_EQ(generate(spec).manifest_json(), suite.manifest_json());

  const auto dir = std::filesystem::temp_directory_path() / "lgplan-test-suite";
  std::filesystem::remove_all(dir);
  write_suite(suite, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "domain.pddl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "train" / "p01.pddl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "test" / "p04.pddl"));
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  EXPECT_EQ(manifest["domain"], "gripper");
  EXPECT_EQ(manifest["train"]["tasks"].size(), 12u);
  std::filesystem::remove_all(dir);
}

TEST(TrainingSet, OneSamplePerPlanState) {
  std::vector<GeneratedTask> gen;
  for (int b = 1; b <= 3; ++b) gen.push_back(generate_instance(Domain::kGripper, b, 0));
  const auto problems = to_problems(gen);
  const IndexEncoder enc;
  const auto slg = build_training_set(problems, GraphKind::kSlg, enc);
  // Plans of length 3, 5 and 9 give 4 + 6 + 10 states.
  ASSERT_EQ(slg.size(), 20u);
  EXPECT_DOUBLE_EQ(slg.front().target, 3.0);
  EXPECT_DOUBLE_EQ(slg[3].target, 0.0);
  EXPECT_EQ(slg.front().graph.kind, GraphKind::kSlg);

  std::vector<std::string> warnings;
  const auto capped = build_training_set(problems, GraphKind::kLlg, enc, HStarOptions{30}, &warnings);
  EXPECT_LT(capped.size(), 20u);
  EXPECT_FALSE(warnings.empty());
}
