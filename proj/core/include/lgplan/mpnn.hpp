#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lgplan/graph.hpp"

namespace lgplan {

enum class Aggregator { kMean, kMax, kSum };
enum class Readout { kSum, kMean, kMax };

std::string_view to_string(Aggregator a);
std::string_view to_string(Readout r);
Aggregator parse_aggregator(std::string_view name);
Readout parse_readout(std::string_view name);

struct MpnnConfig {
  GraphKind kind = GraphKind::kSlg;
  int layers = 8;   // L
  int hidden = 64;  // F
  int T = 4;        // index-encoding width, only affects the LLG input dim
  Aggregator aggregator = Aggregator::kMean;
  Readout readout = Readout::kSum;
  uint64_t seed = 0;

  int input_dim() const { return feature_dim(kind, T); }
  int num_labels() const { return lgplan::num_labels(kind); }
};

// Relational message passing network:
//   h0_u      = P x_u
//   h(t+1)_u  = relu(W0 h_u + sum_l agg_{v in N_l(u)} W_l h_v + b)
//   y         = w2 . relu(W1 readout(h(L)) + b1) + b2
// Empty neighbourhoods aggregate to zero for every aggregator. All weights
// live in one flat parameter vector; the accessors return views into it.
class MpnnModel {
 public:
  using Mat = Eigen::Map<RowMatrix>;
  using ConstMat = Eigen::Map<const RowMatrix>;

  explicit MpnnModel(const MpnnConfig& config);  // Glorot-uniform init from config.seed

  const MpnnConfig& config() const { return config_; }
  size_t num_parameters() const { return params_.size(); }
  static size_t parameter_count(const MpnnConfig& config);

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  ConstMat input_proj() const;                 // F x d
  ConstMat self_weight(int layer) const;       // F x F
  ConstMat label_weight(int layer, int label) const;
  ConstMat bias(int layer) const;              // 1 x F

  // Throws DimensionMismatch if the graph kind or feature width differ.
  double forward(const LearningGraph& graph) const;
  // Positional results; `jobs` > 1 evaluates on worker threads.
  std::vector<double> forward_batch(std::span<const LearningGraph> graphs, int jobs = 1) const;
  std::vector<double> forward_batch(std::span<const LearningGraph* const> graphs,
                                    int jobs = 1) const;

  // Forward pass followed by backpropagation of dL/dy = output_grad(y);
  // adds dL/dtheta into `grad` (same layout as parameters()). Returns y.
  double forward_backward(const LearningGraph& graph,
                          const std::function<double(double)>& output_grad,
                          std::span<double> grad) const;

 private:
  struct Cache;
  void check(const LearningGraph& graph) const;
  ConstMat view(size_t offset, int rows, int cols) const;
  // Fills `cache` with the activations needed for backpropagation if given.
  double run(const LearningGraph& graph, Cache* cache) const;

  MpnnConfig config_;
  std::vector<double> params_;
  // Offsets into params_.
  size_t input_off_ = 0;
  std::vector<size_t> self_off_;
  std::vector<std::vector<size_t>> label_off_;
  std::vector<size_t> bias_off_;
  size_t head_w1_off_ = 0;
  size_t head_b1_off_ = 0;
  size_t head_w2_off_ = 0;
  size_t head_b2_off_ = 0;
};

}  // namespace lgplan
