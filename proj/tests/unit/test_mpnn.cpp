#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "lgplan/errors.hpp"
#include "lgplan/model_io.hpp"
#include "lgplan/mpnn.hpp"
#include "lgplan/random.hpp"
#include "lgplan/training.hpp"

using namespace lgplan;

namespace {

// Random multigraph with the label set and feature width of `kind`.
LearningGraph random_graph(GraphKind kind, int nodes, int edges, uint64_t seed, int T = 4) {
  Rng rng(seed);
  LearningGraph g;
  g.kind = kind;
  g.T = kind == GraphKind::kLlg ? T : 0;
  g.features = RowMatrix(nodes, feature_dim(kind, T));
  for (int u = 0; u < nodes; ++u) {
    for (int k = 0; k < g.dim(); ++k) g.features(u, k) = rng.uniform(-1.0, 1.0);
  }
  g.node_names.resize(static_cast<size_t>(nodes));
  g.index_tags.assign(static_cast<size_t>(nodes), 0);
  while (static_cast<int>(g.edges.size()) < edges) {
    const int u = static_cast<int>(rng.index(static_cast<uint64_t>(nodes)));
    const int v = static_cast<int>(rng.index(static_cast<uint64_t>(nodes)));
    if (u == v) continue;
    g.edges.push_back({u, v, static_cast<int>(rng.index(static_cast<uint64_t>(num_labels(kind))))});
  }
  g.finalize();
  return g;
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over all
// parameters, with central differences of step h.
double gradient_error(MpnnModel& model, const LearningGraph& g, double h, double floor) {
  std::vector<double> grad(model.num_parameters(), 0.0);
  model.forward_backward(g, [](double) { return 1.0; }, grad);
  auto params = model.parameters();
  double worst = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = model.forward(g);
    params[i] = keep - h;
    const double down = model.forward(g);
    params[i] = keep;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(grad[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(grad[i] - numeric) / scale);
  }
  return worst;
}

std::vector<LabeledGraphSample> toy_dataset(int n, uint64_t seed) {
  // Target = number of nodes with feature 0 above zero; learnable by a sum readout.
  std::vector<LabeledGraphSample> out;
  for (int i = 0; i < n; ++i) {
    LabeledGraphSample s{random_graph(GraphKind::kSlg, 4 + i % 5, 6, seed + static_cast<uint64_t>(i)), 0.0};
    for (int u = 0; u < s.graph.num_nodes(); ++u) s.target += s.graph.features(u, 0) > 0 ? 1.0 : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

class GradientCheck : public ::testing::TestWithParam<std::tuple<GraphKind, Aggregator, Readout>> {};

TEST_P(GradientCheck, AnalyticMatchesFiniteDifferences) {
  const auto [kind, agg, readout] = GetParam();
  MpnnConfig c;
  c.kind = kind;
  c.layers = 2;
  c.hidden = 8;
  c.aggregator = agg;
  c.readout = readout;
  c.seed = 17;
  MpnnModel model(c);
  const LearningGraph g = random_graph(kind, 10, 24, 99);
  EXPECT_LT(gradient_error(model, g, 1e-4, 1e-4), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(
    AllKinds, GradientCheck,
    ::testing::Combine(::testing::Values(GraphKind::kSlg, GraphKind::kFlg, GraphKind::kLlg),
                       ::testing::Values(Aggregator::kMean, Aggregator::kMax, Aggregator::kSum),
                       ::testing::Values(Readout::kSum, Readout::kMean, Readout::kMax)));

TEST(Mpnn, ParameterCountMatchesLayout) {
  MpnnConfig c;
  c.kind = GraphKind::kSlg;
  c.layers = 3;
  c.hidden = 5;
  const size_t F = 5, d = 3, R = 3;
  const size_t expected = F * d + 3 * (F * F + R * F * F + F) + F * F + F + F + 1;
  EXPECT_EQ(MpnnModel::parameter_count(c), expected);
  EXPECT_EQ(MpnnModel(c).num_parameters(), expected);
}

TEST(Mpnn, PermutationInvariant) {
  for (GraphKind kind : {GraphKind::kSlg, GraphKind::kFlg, GraphKind::kLlg}) {
    MpnnConfig c;
    c.kind = kind;
    c.layers = 3;
    c.hidden = 12;
    MpnnModel model(c);
    const LearningGraph g = random_graph(kind, 12, 30, 5);
    std::vector<int> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(8);
    rng.shuffle(std::span<int>(perm));
    LearningGraph h = g;
    for (int u = 0; u < 12; ++u) h.features.row(perm[static_cast<size_t>(u)]) = g.features.row(u);
    for (auto& e : h.edges) {
      e.u = perm[static_cast<size_t>(e.u)];
      e.v = perm[static_cast<size_t>(e.v)];
    }
    h.finalize();
    EXPECT_NEAR(model.forward(g), model.forward(h), 1e-9);
  }
}

TEST(Mpnn, RejectsWrongGraphs) {
  MpnnConfig c;
  c.kind = GraphKind::kSlg;
  c.layers = 1;
  c.hidden = 4;
  MpnnModel model(c);
  EXPECT_THROW(model.forward(random_graph(GraphKind::kFlg, 5, 5, 1)), DimensionMismatch);
  std::vector<double> small(3);
  EXPECT_THROW(model.forward_backward(random_graph(GraphKind::kSlg, 5, 5, 1),
                                      [](double) { return 1.0; }, small),
               DimensionMismatch);
}

TEST(Mpnn, BatchMatchesSingleAndThreads) {
  MpnnConfig c;
  c.kind = GraphKind::kSlg;
  c.layers = 2;
  c.hidden = 8;
  MpnnModel model(c);
  std::vector<LearningGraph> gs;
  for (int i = 0; i < 9; ++i) gs.push_back(random_graph(GraphKind::kSlg, 6, 9, static_cast<uint64_t>(i)));
  const auto one = model.forward_batch(gs, 1);
  const auto many = model.forward_batch(gs, 3);
  for (size_t i = 0; i < gs.size(); ++i) {
    EXPECT_EQ(one[i], model.forward(gs[i]));
    EXPECT_EQ(one[i], many[i]);
  }
}

// --- schedule and training ----------------------------------------------

TEST(Schedule, ConstantLossWalksDownThreeRates) {
  PlateauSchedule s(1e-3, 10.0, 10, 1e-5, 1e-4);
  std::vector<double> rates;
  int epochs = 0;
  while (epochs < 1000) {
    rates.push_back(s.lr());
    ++epochs;
    if (!s.step(1.0)) break;
  }
  EXPECT_TRUE(s.stopped());
  std::vector<double> distinct;
  for (double r : rates) {
    if (distinct.empty() || std::abs(distinct.back() - r) > 1e-15) distinct.push_back(r);
  }
  ASSERT_EQ(distinct.size(), 3u);
  EXPECT_DOUBLE_EQ(distinct[0], 1e-3);
  EXPECT_NEAR(distinct[1], 1e-4, 1e-15);
  EXPECT_NEAR(distinct[2], 1e-5, 1e-16);
  // One improving epoch, then 10 bad epochs per rate.
  EXPECT_EQ(epochs, 31);
}

TEST(Schedule, ImprovementResetsPatience) {
  PlateauSchedule s(1e-3, 10.0, 2, 1e-5, 1e-4);
  s.step(10.0);
  s.step(10.0);
  s.step(5.0);  // improvement
  s.step(5.0);
  EXPECT_DOUBLE_EQ(s.lr(), 1e-3);
  s.step(5.0);
  EXPECT_NEAR(s.lr(), 1e-4, 1e-15);
}

TEST(Training, FitsToyTargetAndIsDeterministic) {
  const auto data = toy_dataset(40, 3);
  MpnnConfig mc;
  mc.kind = GraphKind::kSlg;
  mc.layers = 2;
  mc.hidden = 16;
  mc.aggregator = Aggregator::kMean;
  mc.readout = Readout::kSum;
  TrainConfig tc;
  tc.batch_size = 4;
  tc.max_epochs = 300;
  tc.lr0 = 1e-2;
  TrainResult a = train(data, mc, tc);
  std::vector<size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  EXPECT_LT(mse(a.model, data, all), 0.5);
  EXPECT_LT(a.trace.epochs.back().train_loss, a.trace.epochs.front().train_loss);

  tc.jobs = 2;
  TrainResult b = train(data, mc, tc);
  EXPECT_TRUE(std::equal(a.model.parameters().begin(), a.model.parameters().end(),
                         b.model.parameters().begin()));
  EXPECT_EQ(a.trace.to_csv(false), b.trace.to_csv(false));
  EXPECT_EQ(a.trace.to_csv(false).substr(0, 41), "epoch,train_loss,holdout_loss,lr,seconds\n");
}

TEST(Training, Errors) {
  MpnnConfig mc;
  TrainConfig tc;
  const auto one = toy_dataset(1, 1);
  EXPECT_THROW(train(one, mc, tc), EmptyDataset);
  auto bad = toy_dataset(4, 1);
  bad[2].target = std::nan("");
  EXPECT_THROW(train(bad, mc, tc), NonFiniteLoss);
  tc.batch_size = 0;
  EXPECT_THROW(tc.validate(), Error);
}

TEST(Training, SelectModelOrder) {
  std::vector<ValidationStats> c{{3, 100, 0.5}, {4, 900, 0.9}, {4, 500, 0.9}, {4, 500, 0.1}, {4, 500, 0.1}};
  EXPECT_EQ(select_model(c), 3u);
  EXPECT_THROW(select_model(std::vector<ValidationStats>{}), EmptyCandidates);
}

// --- model files ----------------------------------------------------------

TEST(ModelIo, RoundTripAndSizeBound) {
  MpnnConfig c;
  c.kind = GraphKind::kLlg;
  c.layers = 3;
  c.hidden = 10;
  c.T = 6;
  c.aggregator = Aggregator::kMax;
  c.readout = Readout::kMean;
  c.seed = 4;
  MpnnModel m(c);
  const std::string bytes = serialize_model(m);
  EXPECT_LE(bytes.size(), 32 + kModelHeaderMax + 8 * m.num_parameters());
  const MpnnModel back = deserialize_model(bytes);
  EXPECT_EQ(back.config().kind, c.kind);
  EXPECT_EQ(back.config().T, 6);
  EXPECT_EQ(back.config().aggregator, c.aggregator);
  EXPECT_EQ(back.config().readout, c.readout);
  EXPECT_TRUE(std::equal(m.parameters().begin(), m.parameters().end(), back.parameters().begin()));
  EXPECT_EQ(serialize_model(back), bytes);
}

TEST(ModelIo, CorruptionIsDetected) {
  MpnnConfig c;
  c.layers = 1;
  c.hidden = 4;
  const std::string bytes = serialize_model(MpnnModel(c));

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_model(bad_magic), FormatVersionMismatch);

  std::string bad_version = bytes;
  bad_version[8] = 7;
  EXPECT_THROW(deserialize_model(bad_version), FormatVersionMismatch);

  EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() - 5)), ChecksumMismatch);

  std::string flipped = bytes;
  flipped[bytes.size() - 20] ^= 0x10;
  EXPECT_THROW(deserialize_model(flipped), ChecksumMismatch);
}

TEST(ModelIo, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "lgplan-test-model";
  std::filesystem::create_directories(dir);
  MpnnConfig c;
  c.layers = 1;
  c.hidden = 4;
  MpnnModel m(c);
  save_model(m, dir / "m.lgm");
  EXPECT_EQ(serialize_model(load_model(dir / "m.lgm")), serialize_model(m));
  EXPECT_THROW(load_model(dir / "missing.lgm"), FileNotFound);
  std::filesystem::remove_all(dir);
}
