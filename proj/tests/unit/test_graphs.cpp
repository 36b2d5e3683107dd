#include <string>

#include <gtest/gtest.h>

#include "lgplan/errors.hpp"
#include "lgplan/graph.hpp"
#include "lgplan/problem.hpp"
#include "lgplan/theory.hpp"

using namespace lgplan;

namespace {

const std::string kFixtures = LGPLAN_FIXTURES;

Problem gripper() {
  return Problem::load(kFixtures + "/gripper/domain.pddl", kFixtures + "/gripper/p01.pddl");
}

}  // namespace

TEST(Slg, Thm4PairEdgeCounts) {
  const auto [p1, p2] = gen_thm4_pair();
  for (const StripsTask* t : {&p1, &p2}) {
    const LearningGraph g = build_slg(*t, t->initial_state());
    EXPECT_EQ(g.num_nodes(), 10);  // 4 propositions + 6 actions
    EXPECT_EQ(g.edges.size(), 10u);
    EXPECT_EQ(g.num_edges(0), 4u);  // pre
    EXPECT_EQ(g.num_edges(1), 6u);  // add
    EXPECT_EQ(g.num_edges(2), 0u);  // del
  }
}

TEST(Slg, FeaturesAndAdjacency) {
  const Problem p = gripper();
  const StripsTask& t = p.strips();
  const LearningGraph g = build_slg(t, t.initial_state());
  ASSERT_EQ(g.dim(), 3);
  EXPECT_EQ(g.num_nodes(), static_cast<int>(t.num_propositions() + t.actions.size()));
  int props = 0, in_state = 0, in_goal = 0;
  for (int u = 0; u < g.num_nodes(); ++u) {
    props += g.features(u, 0) > 0.5;
    in_state += g.features(u, 1) > 0.5;
    in_goal += g.features(u, 2) > 0.5;
  }
  EXPECT_EQ(props, static_cast<int>(t.num_propositions()));
  EXPECT_EQ(in_state, static_cast<int>(t.init.size()));
  EXPECT_EQ(in_goal, static_cast<int>(t.goal.size()));

  // Undirected: every edge appears in both endpoints' neighbour lists.
  size_t degree_sum = 0;
  for (int l = 0; l < g.num_labels(); ++l) {
    for (int u = 0; u < g.num_nodes(); ++u) degree_sum += g.neighbors(l, u).size();
  }
  EXPECT_EQ(degree_sum, 2 * g.edges.size());
}

TEST(Flg, BuildsFromSas) {
  const Problem p = Problem::load("", kFixtures + "/gripper-b1.sas");
  const FdrTask& f = p.fdr();
  const LearningGraph g = build_flg(f, f.init);
  ASSERT_EQ(g.dim(), 5);
  EXPECT_EQ(g.num_nodes(), static_cast<int>(f.variables.size() + f.num_facts() + f.actions.size()));
  EXPECT_EQ(g.num_edges(0), f.num_facts());  // var-value
}

TEST(Llg, SchemaSubgraphIsShared) {
  const Problem p = gripper();
  IndexEncoder enc(4);
  LlgBuilder builder(p.lifted(), enc);
  const StripsState s0 = p.strips().initial_state();
  const LearningGraph g = builder.build(p.to_lifted(s0));
  EXPECT_EQ(g.dim(), feature_dim(GraphKind::kLlg, 4));
  EXPECT_GT(g.num_nodes(), builder.base_nodes());
  const LearningGraph direct = build_llg(p.lifted(), p.to_lifted(s0), enc);
  EXPECT_EQ(graph_to_json(direct), graph_to_json(g));
}

TEST(IndexEncoder, UnitNormInjectiveAndStable) {
  IndexEncoder a(6, 9), b(6, 9);
  for (int i = 1; i <= 8; ++i) {
    EXPECT_NEAR(a.pe(i).norm(), 1.0, 1e-12);
    for (int j = 1; j < i; ++j) EXPECT_GT((a.pe(i) - a.pe(j)).norm(), 1e-6);
  }
  // Query order does not matter.
  const Eigen::VectorXd v5 = b.pe(5);
  EXPECT_EQ(v5, a.pe(5));
  EXPECT_THROW(a.pe(0), Error);
}

TEST(GraphIo, JsonRoundTrip) {
  const Problem p = gripper();
  IndexEncoder enc(4);
  for (GraphKind kind : {GraphKind::kSlg, GraphKind::kFlg, GraphKind::kLlg}) {
    StateEncoder se(p, kind, enc);
    const LearningGraph g = se(p.strips().initial_state());
    const std::string json = graph_to_json(g);
    const LearningGraph back = graph_from_json(json);
    EXPECT_EQ(back.kind, kind);
    EXPECT_EQ(back.num_nodes(), g.num_nodes());
    EXPECT_EQ(back.edges.size(), g.edges.size());
    EXPECT_EQ(back.features, g.features);
    EXPECT_EQ(graph_to_json(back), json);
    EXPECT_NE(graph_to_dot(g).find("graph"), std::string::npos);
  }
  EXPECT_THROW(graph_from_json("{not json"), Error);
}

TEST(GraphKinds, Names) {
  EXPECT_EQ(parse_graph_kind("slg"), GraphKind::kSlg);
  EXPECT_EQ(to_string(GraphKind::kLlg), "llg");
  EXPECT_THROW(parse_graph_kind("xyz"), Error);
  EXPECT_EQ(num_labels(GraphKind::kSlg), 3);
  EXPECT_EQ(num_labels(GraphKind::kFlg), 3);
  EXPECT_EQ(feature_dim(GraphKind::kSlg, 4), 3);
  EXPECT_EQ(feature_dim(GraphKind::kFlg, 4), 5);
  EXPECT_EQ(feature_dim(GraphKind::kLlg, 4), 9);
}
