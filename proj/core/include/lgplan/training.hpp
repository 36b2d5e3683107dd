#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lgplan/graph.hpp"
#include "lgplan/mpnn.hpp"

namespace lgplan {

struct LabeledGraphSample {
  LearningGraph graph;
  double target = 0.0;
};

struct TrainConfig {
  int batch_size = 16;
  double lr0 = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double holdout_frac = 0.25;
  double factor = 10.0;
  int patience = 10;
  double stop_below = 1e-5;
  // A holdout loss counts as an improvement when below best * (1 - threshold).
  double threshold = 1e-4;
  int max_epochs = 10000;
  uint64_t seed = 0;
  int jobs = 1;

  void validate() const;  // throws Error
};

// Reduce-on-plateau learning-rate schedule driven by the holdout loss.
class PlateauSchedule {
 public:
  PlateauSchedule(double lr0, double factor, int patience, double stop_below, double threshold);
  explicit PlateauSchedule(const TrainConfig& c)
      : PlateauSchedule(c.lr0, c.factor, c.patience, c.stop_below, c.threshold) {}

  // Records one epoch's loss; returns false once the rate fell below the
  // stop threshold.
  bool step(double loss);
  double lr() const { return lr_; }
  bool stopped() const { return stopped_; }

 private:
  double lr_;
  double factor_;
  int patience_;
  double stop_below_;
  double threshold_;
  double best_;
  int bad_epochs_ = 0;
  bool stopped_ = false;
};

class Adam {
 public:
  Adam(size_t n, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad, double lr);

 private:
  double beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long long t_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double holdout_loss = 0.0;
  double lr = 0.0;
  double seconds = 0.0;
};

struct TrainTrace {
  std::vector<EpochRecord> epochs;
  std::string stop_reason;  // "lr_below_threshold" | "max_epochs"

  // Header: epoch,train_loss,holdout_loss,lr,seconds. With timing off the
  // seconds column is written as 0.
  std::string to_csv(bool timing = true) const;
};

struct TrainResult {
  MpnnModel model;
  TrainTrace trace;
};

double mse(const MpnnModel& model, std::span<const LabeledGraphSample> samples,
           std::span<const size_t> indices, int jobs = 1);

// Adam + MSE minibatch training with a seeded holdout split driving the
// plateau schedule. Throws EmptyDataset (fewer than 2 samples) and
// NonFiniteLoss.
TrainResult train(std::span<const LabeledGraphSample> samples, const MpnnConfig& model_config,
                  const TrainConfig& config);

struct ValidationStats {
  int solved = 0;
  long long expansions = 0;
  double train_loss = 0.0;
};

// Most solved, then fewest expansions, then lowest training loss, then
// lowest index. Throws EmptyCandidates.
size_t select_model(std::span<const ValidationStats> candidates);

}  // namespace lgplan
