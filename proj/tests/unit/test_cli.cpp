#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "lgplan/io.hpp"
#include "lgplan/interchange.hpp"

using namespace lgplan;
namespace fs = std::filesystem;

namespace {

const std::string kCli = LGPLAN_CLI;
const std::string kFixtures = LGPLAN_FIXTURES;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lgplan-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of `lgplan -o <out> <args>`; output goes to dir_/log.txt.
  int run(const std::string& args, const std::string& out = "out") {
    const std::string cmd = "'" + kCli + "' -o '" + (dir_ / out).string() + "' " + args + " > '" +
                            (dir_ / "log.txt").string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string log() const { return read_text_file(dir_ / "log.txt"); }
  std::string file(const std::string& rel, const std::string& out = "out") const {
    return read_text_file(dir_ / out / rel);
  }

  fs::path dir_;
};

std::string gripper_args() {
  return "-d '" + kFixtures + "/gripper/domain.pddl' -p '" + kFixtures + "/gripper/p01.pddl'";
}

}  // namespace

TEST_F(Cli, GroundWritesTenActions) {
  ASSERT_EQ(run("ground " + gripper_args()), 0) << log();
  const StripsTask t = read_task_dump(file("task.task"));
  EXPECT_EQ(t.actions.size(), 10u);
  const auto run_json = nlohmann::json::parse(file("run.json"));
  EXPECT_EQ(run_json["subcommand"], "ground");
  EXPECT_TRUE(run_json.contains("seed"));
  EXPECT_TRUE(run_json.contains("argv"));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("solve"), 2);  // --problem is required
  EXPECT_EQ(run("--jobs 0 ground " + gripper_args()), 2);
}

TEST_F(Cli, DomainErrorsExitOne) {
  EXPECT_EQ(run("solve -p '" + kFixtures + "/gripper-b1.sas' -m '" + (dir_ / "none.lgm").string() + "'"), 1);
  EXPECT_NE(log().find("none.lgm"), std::string::npos);
  EXPECT_EQ(run("ground -p '" + kFixtures + "/nope.sas'"), 1);
  EXPECT_EQ(run("solve -p '" + kFixtures + "/gripper-b1.sas' -H hgc"), 1);
  EXPECT_EQ(run("gen --train 1-8 --test 7-10"), 1);
}

TEST_F(Cli, SolveWritesPlanAndResult) {
  ASSERT_EQ(run("--no-timing solve " + gripper_args() + " -H hff"), 0) << log();
  const auto result = nlohmann::json::parse(file("result.json"));
  EXPECT_EQ(result["status"], "solved");
  EXPECT_EQ(result["plan_cost"], 3);
  EXPECT_NE(file("plan.txt").find("; cost = 3 (unit cost)"), std::string::npos);

  ASSERT_EQ(run("solve -p '" + kFixtures + "/minimal.sas' -H blind", "min"), 0) << log();
  EXPECT_EQ(nlohmann::json::parse(file("result.json", "min"))["plan_cost"], 1);
}

TEST_F(Cli, OracleValues) {
  ASSERT_EQ(run("oracle -p '" + kFixtures + "/gripper-b1.sas'"), 0) << log();
  const auto j = nlohmann::json::parse(file("oracle.json"));
  EXPECT_EQ(j["hmax"], 2);
  EXPECT_EQ(j["hadd"], 3);
  EXPECT_EQ(j["hstar"], 3);
}

TEST_F(Cli, GraphFormats) {
  ASSERT_EQ(run("graph " + gripper_args() + " -k llg"), 0) << log();
  const auto j = nlohmann::json::parse(file("graph.json"));
  EXPECT_EQ(j["kind"], "llg");
  ASSERT_EQ(run("graph " + gripper_args() + " -k slg --format dot", "dot"), 0) << log();
  EXPECT_NE(file("graph.dot", "dot").find("graph"), std::string::npos);
}

TEST_F(Cli, GenTrainSolveExperimentDeterministic) {
  const std::string suite = (dir_ / "suite").string();
  ASSERT_EQ(run("gen --domain gripper --train 1-3 --validate 4-4 --test 4-5", "suite"), 0) << log();
  EXPECT_TRUE(fs::exists(dir_ / "suite" / "manifest.json"));

  const std::string train = "--no-timing train -s '" + suite +
                            "' -k slg --layers 2 --hidden 8 --batch 4 --max-epochs 30";
  ASSERT_EQ(run(train, "m1"), 0) << log();
  ASSERT_EQ(run(train, "m2"), 0) << log();
  EXPECT_EQ(file("model.lgm", "m1"), file("model.lgm", "m2"));
  EXPECT_EQ(file("trace.csv", "m1"), file("trace.csv", "m2"));

  const std::string model = (dir_ / "m1" / "model.lgm").string();
  const std::string exp = "--no-timing -j 2 experiment -s '" + suite + "' -H blind,hff -m '" + model + "'";
  ASSERT_EQ(run(exp, "e1"), 0) << log();
  ASSERT_EQ(run(exp, "e2"), 0) << log();
  EXPECT_EQ(file("results.csv", "e1"), file("results.csv", "e2"));
  EXPECT_EQ(file("coverage.csv", "e1"), file("coverage.csv", "e2"));
  EXPECT_NE(file("coverage.csv", "e1").find("blind,2,2"), std::string::npos);

  ASSERT_EQ(run("solve -p '" + suite + "/test/p01.pddl' -d '" + suite + "/domain.pddl' -m '" + model + "'",
                "s"),
            0)
      << log();
}

TEST_F(Cli, TheoryPasses) {
  ASSERT_EQ(run("theory --random-tasks 20 --random-models 5"), 0) << log();
  for (const char* t : {"thm1", "thm3", "thm4", "thm5"}) {
    EXPECT_NE(log().find(std::string("PASS ") + t), std::string::npos) << log();
  }
  EXPECT_TRUE(nlohmann::json::parse(file("theory.json")).is_array());
}

TEST_F(Cli, Version) {
  EXPECT_EQ(run("--version"), 0);
  EXPECT_FALSE(log().empty());
}
