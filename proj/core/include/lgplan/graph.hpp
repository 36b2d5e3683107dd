#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "lgplan/task.hpp"

namespace lgplan {

enum class GraphKind { kSlg, kFlg, kLlg };

std::string_view to_string(GraphKind kind);
GraphKind parse_graph_kind(std::string_view name);  // "slg" | "flg" | "llg"

// Edge label names in label-id order.
const std::vector<std::string>& label_names(GraphKind kind);
inline int num_labels(GraphKind kind) { return static_cast<int>(label_names(kind).size()); }
// Node feature dimension: 3, 5 and 5 + T.
int feature_dim(GraphKind kind, int T);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Edge {
  int u = 0;
  int v = 0;
  int label = 0;
};

// Undirected multigraph with one edge set per label and a dense feature row
// per node. Edges are stored once; adjacency is kept per label in CSR form.
class LearningGraph {
 public:
  GraphKind kind = GraphKind::kSlg;
  int T = 0;          // index-encoding width (LLG only)
  uint64_t seed = 0;  // index-encoder seed (LLG only)

  RowMatrix features;                   // num_nodes x dim
  std::vector<Edge> edges;
  std::vector<std::string> node_names;
  // Argument index i for LLG nodes p_i / p_{a,f,i}; 0 for every other node.
  std::vector<int> index_tags;

  int num_nodes() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  int num_labels() const { return static_cast<int>(offsets_.size()); }
  size_t num_edges(int label) const;

  std::span<const int> neighbors(int label, int u) const {
    const auto& off = offsets_[static_cast<size_t>(label)];
    const auto& nb = adjacency_[static_cast<size_t>(label)];
    return {nb.data() + off[static_cast<size_t>(u)],
            static_cast<size_t>(off[static_cast<size_t>(u) + 1] - off[static_cast<size_t>(u)])};
  }

  // Rebuilds the per-label adjacency from `edges`. Builders call this; call
  // it again after editing edges by hand.
  void finalize();

 private:
  std::vector<std::vector<int>> offsets_;
  std::vector<std::vector<int>> adjacency_;
};

// Deterministic injective map from argument indexes (1-based) to unit
// vectors in R^T. Every index gets its own seeded normal draw, normalised,
// so the vector for i does not depend on which other indexes were queried.
class IndexEncoder {
 public:
  static constexpr uint64_t kDefaultSeed = 0x5eed1d3c0de5ULL;

  explicit IndexEncoder(int T = 4, uint64_t seed = kDefaultSeed);

  int dim() const { return T_; }
  uint64_t seed() const { return seed_; }
  // Throws Error for i < 1.
  Eigen::VectorXd pe(int i) const;

 private:
  int T_;
  uint64_t seed_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<int, Eigen::VectorXd> cache_;
};

// Features [is_prop, in_state, in_goal]; labels pre, add, del.
LearningGraph build_slg(const StripsTask& task, const StripsState& state);

// Features [is_var, is_action, is_value, true, goal]; labels varval, pre, eff.
LearningGraph build_flg(const FdrTask& task, const FdrState& state);

// Lifted learning graph. The schema subgraph depends only on the task and
// is built once; build() appends the state/goal atoms.
class LlgBuilder {
 public:
  LlgBuilder(const LiftedTask& task, const IndexEncoder& encoder);

  // `state` is a set of ground atoms, static atoms included.
  LearningGraph build(std::span<const Atom> state) const;
  // Number of nodes before the state/goal atom layer.
  int base_nodes() const { return base_.num_nodes(); }

 private:
  const LiftedTask& task_;
  const IndexEncoder& encoder_;
  LearningGraph base_;
};

LearningGraph build_llg(const LiftedTask& task, std::span<const Atom> state,
                        const IndexEncoder& encoder);

// JSON document {kind, T, seed, labels, nodes: [{id, name, features}],
// edges: [{u, v, label}]}.
std::string graph_to_json(const LearningGraph& graph);
LearningGraph graph_from_json(std::string_view text);
std::string graph_to_dot(const LearningGraph& graph);

}  // namespace lgplan
