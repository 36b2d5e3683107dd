#include "lgplan/mpnn.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "lgplan/errors.hpp"
#include "lgplan/random.hpp"

namespace lgplan {

std::string_view to_string(Aggregator a) {
  switch (a) {
    case Aggregator::kMean: return "mean";
    case Aggregator::kMax: return "max";
    case Aggregator::kSum: return "sum";
  }
  return "?";
}

std::string_view to_string(Readout r) {
  switch (r) {
    case Readout::kSum: return "sum";
    case Readout::kMean: return "mean";
    case Readout::kMax: return "max";
  }
  return "?";
}

Aggregator parse_aggregator(std::string_view name) {
  if (name == "mean") return Aggregator::kMean;
  if (name == "max") return Aggregator::kMax;
  if (name == "sum") return Aggregator::kSum;
  throw Error("unknown aggregator '" + std::string(name) + "' (expected mean, max or sum)");
}

Readout parse_readout(std::string_view name) {
  if (name == "sum") return Readout::kSum;
  if (name == "mean") return Readout::kMean;
  if (name == "max") return Readout::kMax;
  throw Error("unknown readout '" + std::string(name) + "' (expected sum, mean or max)");
}

// ---------------------------------------------------------------------------

size_t MpnnModel::parameter_count(const MpnnConfig& c) {
  const size_t F = static_cast<size_t>(c.hidden);
  const size_t d = static_cast<size_t>(c.input_dim());
  const size_t R = static_cast<size_t>(c.num_labels());
  return F * d + static_cast<size_t>(c.layers) * ((1 + R) * F * F + F) + F * F + F + F + 1;
}

MpnnModel::MpnnModel(const MpnnConfig& config) : config_(config) {
  if (config.layers < 0 || config.hidden < 1) throw Error("invalid MPNN dimensions");
  const size_t F = static_cast<size_t>(config.hidden);
  const size_t d = static_cast<size_t>(config.input_dim());
  const int R = config.num_labels();
  size_t off = 0;
  auto take = [&](size_t n) {
    size_t at = off;
    off += n;
    return at;
  };
  input_off_ = take(F * d);
  for (int l = 0; l < config.layers; ++l) {
    self_off_.push_back(take(F * F));
    label_off_.emplace_back();
    for (int r = 0; r < R; ++r) label_off_.back().push_back(take(F * F));
    bias_off_.push_back(take(F));
  }
  head_w1_off_ = take(F * F);
  head_b1_off_ = take(F);
  head_w2_off_ = take(F);
  head_b2_off_ = take(1);
  params_.assign(off, 0.0);

  Rng rng(derive_seed(config.seed, "mpnn/init"));
  auto glorot = [&](size_t at, size_t fan_out, size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (size_t i = 0; i < fan_out * fan_in; ++i) params_[at + i] = rng.uniform(-limit, limit);
  };
  glorot(input_off_, F, d);
  for (int l = 0; l < config.layers; ++l) {
    glorot(self_off_[static_cast<size_t>(l)], F, F);
    for (int r = 0; r < R; ++r) glorot(label_off_[static_cast<size_t>(l)][static_cast<size_t>(r)], F, F);
  }
  glorot(head_w1_off_, F, F);
  glorot(head_w2_off_, 1, F);
}

MpnnModel::ConstMat MpnnModel::view(size_t offset, int rows, int cols) const {
  return ConstMat(params_.data() + offset, rows, cols);
}

MpnnModel::ConstMat MpnnModel::input_proj() const {
  return view(input_off_, config_.hidden, config_.input_dim());
}
MpnnModel::ConstMat MpnnModel::self_weight(int layer) const {
  return view(self_off_[static_cast<size_t>(layer)], config_.hidden, config_.hidden);
}
MpnnModel::ConstMat MpnnModel::label_weight(int layer, int label) const {
  return view(label_off_[static_cast<size_t>(layer)][static_cast<size_t>(label)], config_.hidden,
              config_.hidden);
}
MpnnModel::ConstMat MpnnModel::bias(int layer) const {
  return view(bias_off_[static_cast<size_t>(layer)], 1, config_.hidden);
}

void MpnnModel::check(const LearningGraph& graph) const {
  if (graph.kind != config_.kind) {
    throw DimensionMismatch("graph kind " + std::string(to_string(graph.kind)) +
                            " does not match model kind " +
                            std::string(to_string(config_.kind)));
  }
  if (graph.dim() != config_.input_dim()) {
    throw DimensionMismatch("graph feature width " + std::to_string(graph.dim()) +
                            " does not match model input width " +
                            std::to_string(config_.input_dim()));
  }
}

// ---------------------------------------------------------------------------

struct MpnnModel::Cache {
  std::vector<RowMatrix> H;  // H[0] .. H[L]
  std::vector<RowMatrix> Z;  // pre-activations of layers 0 .. L-1
  // Max aggregation: argmax neighbour per [layer][label][node * F + column].
  std::vector<std::vector<std::vector<int>>> argmax;
  Eigen::VectorXd g;
  std::vector<int> readout_arg;
  Eigen::VectorXd z1;
  Eigen::VectorXd a1;
};

namespace {

size_t flat(int u, int F, int c) {
  return static_cast<size_t>(u) * static_cast<size_t>(F) + static_cast<size_t>(c);
}

// out(u) += agg_{v in N(u)} M(v)
void aggregate(const LearningGraph& graph, int label, const RowMatrix& M, Aggregator agg,
               RowMatrix& out, std::vector<int>* arg) {
  const int n = graph.num_nodes();
  const int F = static_cast<int>(M.cols());
  if (arg) arg->assign(static_cast<size_t>(n) * static_cast<size_t>(F), -1);
  for (int u = 0; u < n; ++u) {
    auto nb = graph.neighbors(label, u);
    if (nb.empty()) continue;
    if (agg == Aggregator::kMax) {
      for (int c = 0; c < F; ++c) {
        int best = nb[0];
        double value = M(best, c);
        for (size_t k = 1; k < nb.size(); ++k) {
          const double x = M(nb[k], c);
          if (x > value) {
            value = x;
            best = nb[k];
          }
        }
        out(u, c) += value;
        if (arg) (*arg)[flat(u, F, c)] = best;
      }
    } else {
      Eigen::RowVectorXd acc = M.row(nb[0]);
      for (size_t k = 1; k < nb.size(); ++k) acc += M.row(nb[k]);
      if (agg == Aggregator::kMean) acc /= static_cast<double>(nb.size());
      out.row(u) += acc;
    }
  }
}

// Adjoint of aggregate: dM += (d out / d M)^T dOut.
void aggregate_backward(const LearningGraph& graph, int label, const RowMatrix& dOut,
                        Aggregator agg, const std::vector<int>& arg, RowMatrix& dM) {
  const int n = graph.num_nodes();
  const int F = static_cast<int>(dOut.cols());
  for (int u = 0; u < n; ++u) {
    auto nb = graph.neighbors(label, u);
    if (nb.empty()) continue;
    if (agg == Aggregator::kMax) {
      for (int c = 0; c < F; ++c) dM(arg[flat(u, F, c)], c) += dOut(u, c);
    } else {
      const double scale = agg == Aggregator::kMean ? 1.0 / static_cast<double>(nb.size()) : 1.0;
      for (int v : nb) dM.row(v) += scale * dOut.row(u);
    }
  }
}

}  // namespace

double MpnnModel::run(const LearningGraph& graph, Cache* cache) const {
  check(graph);
  const int n = graph.num_nodes();
  const int F = config_.hidden;
  const int R = config_.num_labels();
  const bool keep_arg = cache && config_.aggregator == Aggregator::kMax;

  RowMatrix H = graph.features * input_proj().transpose();
  if (cache) {
    cache->H.assign(1, H);
    cache->Z.clear();
    cache->argmax.assign(static_cast<size_t>(config_.layers),
                         std::vector<std::vector<int>>(static_cast<size_t>(R)));
  }
  std::vector<bool> has_edges(static_cast<size_t>(R));
  for (int r = 0; r < R; ++r) has_edges[static_cast<size_t>(r)] = graph.num_edges(r) > 0;

  RowMatrix M(n, F);
  for (int l = 0; l < config_.layers; ++l) {
    RowMatrix Z = H * self_weight(l).transpose();
    Z.rowwise() += bias(l).row(0);
    for (int r = 0; r < R; ++r) {
      if (!has_edges[static_cast<size_t>(r)]) continue;
      M.noalias() = H * label_weight(l, r).transpose();
      aggregate(graph, r, M, config_.aggregator, Z,
                keep_arg ? &cache->argmax[static_cast<size_t>(l)][static_cast<size_t>(r)] : nullptr);
    }
    H = Z.cwiseMax(0.0);
    if (cache) {
      cache->Z.push_back(std::move(Z));
      cache->H.push_back(H);
    }
  }

  Eigen::VectorXd g = Eigen::VectorXd::Zero(F);
  std::vector<int> arg;
  if (n > 0) {
    switch (config_.readout) {
      case Readout::kSum: g = H.colwise().sum().transpose(); break;
      case Readout::kMean: g = H.colwise().mean().transpose(); break;
      case Readout::kMax:
        arg.assign(static_cast<size_t>(F), 0);
        for (int c = 0; c < F; ++c) {
          Eigen::Index best = 0;
          g[c] = H.col(c).maxCoeff(&best);
          arg[static_cast<size_t>(c)] = static_cast<int>(best);
        }
        break;
    }
  }
  const ConstMat W1 = view(head_w1_off_, F, F);
  const ConstMat b1 = view(head_b1_off_, F, 1);
  const ConstMat w2 = view(head_w2_off_, 1, F);
  Eigen::VectorXd z1 = W1 * g + b1.col(0);
  Eigen::VectorXd a1 = z1.cwiseMax(0.0);
  const double y = w2.row(0).dot(a1) + params_[head_b2_off_];
  if (cache) {
    cache->g = std::move(g);
    cache->readout_arg = std::move(arg);
    cache->z1 = std::move(z1);
    cache->a1 = std::move(a1);
  }
  return y;
}

double MpnnModel::forward(const LearningGraph& graph) const { return run(graph, nullptr); }

std::vector<double> MpnnModel::forward_batch(std::span<const LearningGraph* const> graphs,
                                             int jobs) const {
  std::vector<double> out(graphs.size(), 0.0);
  const size_t workers = std::min(static_cast<size_t>(std::max(jobs, 1)), graphs.size());
  if (workers <= 1) {
    for (size_t i = 0; i < graphs.size(); ++i) out[i] = forward(*graphs[i]);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < graphs.size(); i += workers) out[i] = forward(*graphs[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> MpnnModel::forward_batch(std::span<const LearningGraph> graphs,
                                             int jobs) const {
  std::vector<const LearningGraph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const auto& g : graphs) ptrs.push_back(&g);
  return forward_batch(std::span<const LearningGraph* const>(ptrs), jobs);
}

double MpnnModel::forward_backward(const LearningGraph& graph,
                                   const std::function<double(double)>& output_grad,
                                   std::span<double> grad) const {
  if (grad.size() != params_.size()) throw DimensionMismatch("gradient buffer size");
  Cache cache;
  const double y = run(graph, &cache);
  const double dy = output_grad(y);

  const int n = graph.num_nodes();
  const int F = config_.hidden;
  const int R = config_.num_labels();
  auto gmat = [&](size_t off, int rows, int cols) { return Mat(grad.data() + off, rows, cols); };

  // Head.
  const ConstMat W1 = view(head_w1_off_, F, F);
  const ConstMat w2 = view(head_w2_off_, 1, F);
  gmat(head_w2_off_, 1, F).row(0) += dy * cache.a1.transpose();
  grad[head_b2_off_] += dy;
  Eigen::VectorXd dz1 = dy * w2.row(0).transpose();
  for (int c = 0; c < F; ++c) {
    if (cache.z1[c] <= 0.0) dz1[c] = 0.0;
  }
  gmat(head_w1_off_, F, F) += dz1 * cache.g.transpose();
  gmat(head_b1_off_, F, 1).col(0) += dz1;
  const Eigen::VectorXd dg = W1.transpose() * dz1;

  // Readout.
  RowMatrix dH = RowMatrix::Zero(n, F);
  if (n > 0) {
    switch (config_.readout) {
      case Readout::kSum: dH.rowwise() = dg.transpose(); break;
      case Readout::kMean: dH.rowwise() = dg.transpose() / static_cast<double>(n); break;
      case Readout::kMax:
        for (int c = 0; c < F; ++c) dH(cache.readout_arg[static_cast<size_t>(c)], c) = dg[c];
        break;
    }
  }

  // Message-passing layers, last to first.
  RowMatrix dM(n, F);
  for (int l = config_.layers - 1; l >= 0; --l) {
    const RowMatrix& Hin = cache.H[static_cast<size_t>(l)];
    RowMatrix dZ = dH.cwiseProduct(
        (cache.Z[static_cast<size_t>(l)].array() > 0.0).cast<double>().matrix());
    gmat(bias_off_[static_cast<size_t>(l)], 1, F).row(0) += dZ.colwise().sum();
    gmat(self_off_[static_cast<size_t>(l)], F, F).noalias() += dZ.transpose() * Hin;
    RowMatrix dHin = dZ * self_weight(l);
    for (int r = 0; r < R; ++r) {
      if (graph.num_edges(r) == 0) continue;
      dM.setZero();
      aggregate_backward(graph, r, dZ, config_.aggregator,
                         cache.argmax[static_cast<size_t>(l)][static_cast<size_t>(r)], dM);
      gmat(label_off_[static_cast<size_t>(l)][static_cast<size_t>(r)], F, F).noalias() +=
          dM.transpose() * Hin;
      dHin.noalias() += dM * label_weight(l, r);
    }
    dH = std::move(dHin);
  }
  gmat(input_off_, F, config_.input_dim()).noalias() += dH.transpose() * graph.features;
  return y;
}

}  // namespace lgplan
