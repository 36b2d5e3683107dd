#include "lgplan/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <thread>

#include "lgplan/errors.hpp"
#include "lgplan/random.hpp"

namespace lgplan {

void TrainConfig::validate() const {
  if (batch_size < 1) throw Error("batch size must be positive");
  if (!(holdout_frac > 0.0 && holdout_frac < 1.0)) throw Error("holdout fraction must lie in (0,1)");
  if (!(lr0 > stop_below)) throw Error("initial learning rate must exceed the stop threshold");
  if (!(factor > 1.0)) throw Error("learning-rate factor must exceed 1");
  if (patience < 1) throw Error("patience must be positive");
  if (max_epochs < 1) throw Error("max_epochs must be positive");
}

PlateauSchedule::PlateauSchedule(double lr0, double factor, int patience, double stop_below,
                                 double threshold)
    : lr_(lr0),
      factor_(factor),
      patience_(patience),
      stop_below_(stop_below),
      threshold_(threshold),
      best_(std::numeric_limits<double>::infinity()) {}

bool PlateauSchedule::step(double loss) {
  if (stopped_) return false;
  if (loss < best_ * (1.0 - threshold_) || std::isinf(best_)) {
    best_ = loss;
    bad_epochs_ = 0;
  } else if (++bad_epochs_ >= patience_) {
    lr_ /= factor_;
    bad_epochs_ = 0;
    // Relative tolerance so that 1e-3 / 10 / 10 still counts as 1e-5.
    if (lr_ < stop_below_ * (1.0 - 1e-9)) stopped_ = true;
  }
  return !stopped_;
}

Adam::Adam(size_t n, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
  }
}

std::string TrainTrace::to_csv(bool timing) const {
  std::string out = "epoch,train_loss,holdout_loss,lr,seconds\n";
  char buf[256];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.6f\n", e.epoch, e.train_loss,
                  e.holdout_loss, e.lr, timing ? e.seconds : 0.0);
    out += buf;
  }
  return out;
}

double mse(const MpnnModel& model, std::span<const LabeledGraphSample> samples,
           std::span<const size_t> indices, int jobs) {
  if (indices.empty()) return 0.0;
  std::vector<const LearningGraph*> graphs;
  for (size_t i : indices) graphs.push_back(&samples[i].graph);
  const auto pred = model.forward_batch(std::span<const LearningGraph* const>(graphs), jobs);
  double total = 0.0;
  for (size_t k = 0; k < indices.size(); ++k) {
    const double diff = pred[k] - samples[indices[k]].target;
    total += diff * diff;
  }
  return total / static_cast<double>(indices.size());
}

namespace {

// Sum of per-sample gradients of the batch MSE, reduced in sample order so
// the result does not depend on the worker count.
double batch_gradient(const MpnnModel& model, std::span<const LabeledGraphSample> samples,
                      std::span<const size_t> batch, int jobs, std::vector<double>& grad,
                      std::vector<std::vector<double>>& scratch) {
  const size_t n = batch.size();
  const double scale = 2.0 / static_cast<double>(n);
  std::vector<double> sq(n, 0.0);
  if (scratch.size() < n) scratch.resize(n);
  auto one = [&](size_t k) {
    auto& g = scratch[k];
    g.assign(model.num_parameters(), 0.0);
    const double target = samples[batch[k]].target;
    const double y = model.forward_backward(
        samples[batch[k]].graph, [&](double pred) { return scale * (pred - target); }, g);
    sq[k] = (y - target) * (y - target);
  };
  const size_t workers = std::min(static_cast<size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (size_t k = 0; k < n; ++k) one(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (size_t k = w; k < n; k += workers) one(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < grad.size(); ++i) grad[i] += scratch[k][i];
    loss += sq[k];
  }
  return loss / static_cast<double>(n);
}

}  // namespace

TrainResult train(std::span<const LabeledGraphSample> samples, const MpnnConfig& model_config,
                  const TrainConfig& config) {
  config.validate();
  if (samples.size() < 2) {
    throw EmptyDataset("training needs at least 2 samples, got " + std::to_string(samples.size()));
  }
  for (const auto& s : samples) {
    if (!std::isfinite(s.target)) throw NonFiniteLoss("non-finite training target");
  }

  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(config.seed, "train/split"));
  split_rng.shuffle(std::span<size_t>(order));
  size_t n_hold = static_cast<size_t>(
      std::llround(config.holdout_frac * static_cast<double>(samples.size())));
  n_hold = std::clamp<size_t>(n_hold, 1, samples.size() - 1);
  std::vector<size_t> holdout(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_hold));
  std::vector<size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_hold), order.end());

  TrainResult result{MpnnModel(model_config), {}};
  MpnnModel& model = result.model;
  Adam adam(model.num_parameters(), config.beta1, config.beta2, config.eps);
  PlateauSchedule schedule(config);
  Rng shuffle_rng(derive_seed(config.seed, "train/shuffle"));
  std::vector<double> grad(model.num_parameters(), 0.0);
  std::vector<std::vector<double>> scratch;

  result.trace.stop_reason = "max_epochs";
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = schedule.lr();
    shuffle_rng.shuffle(std::span<size_t>(train_idx));
    double loss_sum = 0.0;
    for (size_t start = 0; start < train_idx.size(); start += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(train_idx.size(), start + static_cast<size_t>(config.batch_size));
      std::span<const size_t> batch(train_idx.data() + start, end - start);
      const double loss = batch_gradient(model, samples, batch, config.jobs, grad, scratch);
      if (!std::isfinite(loss)) {
        throw NonFiniteLoss("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(start / static_cast<size_t>(config.batch_size)) +
                            " (lr " + std::to_string(lr) + ")");
      }
      loss_sum += loss * static_cast<double>(batch.size());
      adam.step(model.parameters(), grad, lr);
    }
    const double train_loss = loss_sum / static_cast<double>(train_idx.size());
    const double holdout_loss = mse(model, samples, holdout, config.jobs);
    if (!std::isfinite(holdout_loss)) {
      throw NonFiniteLoss("non-finite holdout loss at epoch " + std::to_string(epoch));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.trace.epochs.push_back({epoch, train_loss, holdout_loss, lr, seconds});
    if (!schedule.step(holdout_loss)) {
      result.trace.stop_reason = "lr_below_threshold";
      break;
    }
  }
  return result;
}

size_t select_model(std::span<const ValidationStats> candidates) {
  if (candidates.empty()) throw EmptyCandidates("no candidate models to select from");
  size_t best = 0;
  for (size_t i = 1; i < candidates.size(); ++i) {
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    if (a.solved != b.solved) {
      if (a.solved > b.solved) best = i;
    } else if (a.expansions != b.expansions) {
      if (a.expansions < b.expansions) best = i;
    } else if (a.train_loss < b.train_loss) {
      best = i;
    }
  }
  return best;
}

}  // namespace lgplan
