#include "lgplan/graph.hpp"

#include <algorithm>
#include <array>

#include "lgplan/errors.hpp"
#include "lgplan/random.hpp"

namespace lgplan {

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kSlg: return "slg";
    case GraphKind::kFlg: return "flg";
    case GraphKind::kLlg: return "llg";
  }
  return "?";
}

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "slg" || name == "SLG") return GraphKind::kSlg;
  if (name == "flg" || name == "FLG") return GraphKind::kFlg;
  if (name == "llg" || name == "LLG") return GraphKind::kLlg;
  throw Error("unknown graph kind '" + std::string(name) + "' (expected slg, flg or llg)");
}

const std::vector<std::string>& label_names(GraphKind kind) {
  static const std::vector<std::string> slg{"pre", "add", "del"};
  static const std::vector<std::string> flg{"varval", "pre", "eff"};
  static const std::vector<std::string> llg{"nu", "gamma", "pre", "add", "del"};
  switch (kind) {
    case GraphKind::kSlg: return slg;
    case GraphKind::kFlg: return flg;
    case GraphKind::kLlg: return llg;
  }
  return slg;
}

int feature_dim(GraphKind kind, int T) {
  switch (kind) {
    case GraphKind::kSlg: return 3;
    case GraphKind::kFlg: return 5;
    case GraphKind::kLlg: return 5 + T;
  }
  return 0;
}

size_t LearningGraph::num_edges(int label) const {
  if (static_cast<size_t>(label) >= offsets_.size()) return 0;
  return static_cast<size_t>(offsets_[static_cast<size_t>(label)].back()) / 2;
}

void LearningGraph::finalize() {
  const int labels = ::lgplan::num_labels(kind);
  const size_t n = static_cast<size_t>(num_nodes());
  offsets_.assign(static_cast<size_t>(labels), std::vector<int>(n + 1, 0));
  adjacency_.assign(static_cast<size_t>(labels), {});
  for (const auto& e : edges) {
    if (e.label < 0 || e.label >= labels) throw Error("edge label out of range");
    if (e.u < 0 || e.v < 0 || static_cast<size_t>(e.u) >= n || static_cast<size_t>(e.v) >= n) {
      throw Error("edge endpoint out of range");
    }
    if (e.u == e.v) throw Error("self-loop in learning graph");
    auto& off = offsets_[static_cast<size_t>(e.label)];
    ++off[static_cast<size_t>(e.u) + 1];
    ++off[static_cast<size_t>(e.v) + 1];
  }
  for (int l = 0; l < labels; ++l) {
    auto& off = offsets_[static_cast<size_t>(l)];
    for (size_t i = 0; i < n; ++i) off[i + 1] += off[i];
    adjacency_[static_cast<size_t>(l)].resize(static_cast<size_t>(off[n]));
  }
  std::vector<std::vector<int>> fill = offsets_;
  for (const auto& e : edges) {
    auto& f = fill[static_cast<size_t>(e.label)];
    auto& adj = adjacency_[static_cast<size_t>(e.label)];
    adj[static_cast<size_t>(f[static_cast<size_t>(e.u)]++)] = e.v;
    adj[static_cast<size_t>(f[static_cast<size_t>(e.v)]++)] = e.u;
  }
}

// ---------------------------------------------------------------------------

IndexEncoder::IndexEncoder(int T, uint64_t seed) : T_(T), seed_(seed) {
  if (T < 1) throw Error("index encoding dimension must be positive");
}

Eigen::VectorXd IndexEncoder::pe(int i) const {
  if (i < 1) throw Error("argument indexes start at 1");
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(i);
  if (it != cache_.end()) return it->second;
  Rng rng(hash_combine(derive_seed(seed_, "pe"), static_cast<uint64_t>(i)));
  Eigen::VectorXd v(T_);
  double norm = 0.0;
  do {
    for (int k = 0; k < T_; ++k) v[k] = rng.normal();
    norm = v.norm();
  } while (norm < 1e-12);
  v /= norm;
  cache_.emplace(i, v);
  return v;
}

// ---------------------------------------------------------------------------

namespace {

class Assembler {
 public:
  Assembler(GraphKind kind, int dim) : kind_(kind), dim_(dim) {}

  explicit Assembler(const LearningGraph& base)
      : kind_(base.kind),
        dim_(base.dim()),
        feats_(base.features.data(), base.features.data() + base.features.size()),
        names_(base.node_names),
        tags_(base.index_tags),
        edges_(base.edges) {}

  int add_node(std::string name, int tag = 0) {
    feats_.resize(feats_.size() + static_cast<size_t>(dim_), 0.0);
    names_.push_back(std::move(name));
    tags_.push_back(tag);
    return static_cast<int>(names_.size()) - 1;
  }

  void set(int node, int column, double value) {
    feats_[static_cast<size_t>(node) * static_cast<size_t>(dim_) + static_cast<size_t>(column)] =
        value;
  }

  void add_edge(int u, int v, int label) { edges_.push_back({u, v, label}); }

  int size() const { return static_cast<int>(names_.size()); }

  LearningGraph finish() const {
    LearningGraph g;
    g.kind = kind_;
    g.features = Eigen::Map<const RowMatrix>(feats_.data(), size(), dim_);
    g.edges = edges_;
    g.node_names = names_;
    g.index_tags = tags_;
    g.finalize();
    return g;
  }

 private:
  GraphKind kind_;
  int dim_;
  std::vector<double> feats_;
  std::vector<std::string> names_;
  std::vector<int> tags_;
  std::vector<Edge> edges_;
};

enum SlgLabel { kSlgPre = 0, kSlgAdd = 1, kSlgDel = 2 };
enum FlgLabel { kVarVal = 0, kFlgPre = 1, kFlgEff = 2 };
enum LlgLabel { kNu = 0, kGamma = 1, kLlgPre = 2, kLlgAdd = 3, kLlgDel = 4 };

}  // namespace

LearningGraph build_slg(const StripsTask& task, const StripsState& state) {
  Assembler g(GraphKind::kSlg, 3);
  const int np = static_cast<int>(task.propositions.size());
  for (int p = 0; p < np; ++p) {
    g.add_node(task.propositions[static_cast<size_t>(p)]);
    g.set(p, 0, 1.0);
    if (state.test(p)) g.set(p, 1, 1.0);
  }
  for (int p : task.goal) g.set(p, 2, 1.0);
  for (const auto& a : task.actions) {
    const int u = g.add_node(a.name);
    for (int p : a.pre) g.add_edge(u, p, kSlgPre);
    for (int p : a.add) g.add_edge(u, p, kSlgAdd);
    for (int p : a.del) g.add_edge(u, p, kSlgDel);
  }
  return g.finish();
}

LearningGraph build_flg(const FdrTask& task, const FdrState& state) {
  if (state.size() != task.variables.size()) {
    throw DimensionMismatch("FDR state is not a total assignment");
  }
  Assembler g(GraphKind::kFlg, 5);
  const size_t nv = task.variables.size();
  for (size_t v = 0; v < nv; ++v) {
    const int u = g.add_node("var:" + task.variables[v].name);
    g.set(u, 0, 1.0);
  }
  std::vector<std::vector<int>> value_node(nv);
  for (size_t v = 0; v < nv; ++v) {
    const auto& var = task.variables[v];
    for (size_t d = 0; d < var.values.size(); ++d) {
      const int u = g.add_node(var.name + "=" + var.values[d]);
      value_node[v].push_back(u);
      g.set(u, 2, 1.0);
      if (state[v] == static_cast<int>(d)) g.set(u, 3, 1.0);
      g.add_edge(static_cast<int>(v), u, kVarVal);
    }
  }
  for (const auto& f : task.goal) {
    g.set(value_node[static_cast<size_t>(f.var)][static_cast<size_t>(f.value)], 4, 1.0);
  }
  for (const auto& a : task.actions) {
    const int u = g.add_node(a.name);
    g.set(u, 1, 1.0);
    for (const auto& f : a.pre) {
      g.add_edge(value_node[static_cast<size_t>(f.var)][static_cast<size_t>(f.value)], u, kFlgPre);
    }
    for (const auto& f : a.eff) {
      g.add_edge(value_node[static_cast<size_t>(f.var)][static_cast<size_t>(f.value)], u, kFlgEff);
    }
  }
  return g.finish();
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kLlgIsPred = 0;
constexpr int kLlgIsObj = 1;
constexpr int kLlgIsSchema = 2;
constexpr int kLlgInState = 3;
constexpr int kLlgInGoal = 4;

void set_pe(Assembler& g, int node, const IndexEncoder& encoder, int i) {
  const Eigen::VectorXd v = encoder.pe(i);
  for (int k = 0; k < encoder.dim(); ++k) g.set(node, 5 + k, v[k]);
}

// The schema subgraph: predicates, objects and N(A) with E_nu and E_f.
Assembler llg_base(const LiftedTask& task, const IndexEncoder& encoder) {
  Assembler g(GraphKind::kLlg, 5 + encoder.dim());
  const int np = static_cast<int>(task.predicates.size());
  const int no = static_cast<int>(task.objects.size());
  for (int p = 0; p < np; ++p) {
    g.add_node("P:" + task.predicates[static_cast<size_t>(p)].name);
    g.set(p, kLlgIsPred, 1.0);
  }
  for (int o = 0; o < no; ++o) {
    const int u = g.add_node("O:" + task.objects[static_cast<size_t>(o)]);
    g.set(u, kLlgIsObj, 1.0);
  }
  for (int o = 0; o < no; ++o) {
    for (int p = 0; p < np; ++p) g.add_edge(np + o, p, kNu);
  }

  static constexpr std::array<const char*, 3> kListNames{"pre", "add", "del"};
  for (const auto& schema : task.schemas) {
    const int a = g.add_node("A:" + schema.name);
    g.set(a, kLlgIsSchema, 1.0);
    std::vector<int> param_node;
    for (const auto& param : schema.params) {
      const int u = g.add_node("A:" + schema.name + "." + param);
      param_node.push_back(u);
      g.add_edge(a, u, kNu);
    }
    const std::array<const std::vector<SchemaAtom>*, 3> lists{&schema.pre, &schema.add,
                                                              &schema.del};
    for (size_t f = 0; f < lists.size(); ++f) {
      const int label = kLlgPre + static_cast<int>(f);
      int k = 0;
      for (const auto& atom : *lists[f]) {
        const std::string base = "A:" + schema.name + "/" + kListNames[f] + "/" +
                                 std::to_string(k++) + ":" +
                                 task.predicates[static_cast<size_t>(atom.predicate)].name;
        const int paf = g.add_node(base);
        g.add_edge(atom.predicate, paf, label);
        if (atom.args.empty()) {
          g.add_edge(paf, a, label);
          continue;
        }
        for (size_t i = 0; i < atom.args.size(); ++i) {
          const int idx = static_cast<int>(i) + 1;
          const int pafi = g.add_node(base + "#" + std::to_string(idx), idx);
          set_pe(g, pafi, encoder, idx);
          g.add_edge(paf, pafi, label);
          const Term& t = atom.args[i];
          const int target = t.is_param() ? param_node[static_cast<size_t>(t.index)] : np + t.index;
          g.add_edge(pafi, target, label);
        }
      }
    }
  }
  return g;
}

}  // namespace

LlgBuilder::LlgBuilder(const LiftedTask& task, const IndexEncoder& encoder)
    : task_(task), encoder_(encoder), base_(llg_base(task, encoder).finish()) {}

LearningGraph LlgBuilder::build(std::span<const Atom> state) const {
  Assembler g(base_);
  const int np = static_cast<int>(task_.predicates.size());

  std::vector<Atom> atoms(state.begin(), state.end());
  atoms.insert(atoms.end(), task_.goal.begin(), task_.goal.end());
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  std::vector<Atom> in_state(state.begin(), state.end());
  std::sort(in_state.begin(), in_state.end());
  std::vector<Atom> in_goal = task_.goal;
  std::sort(in_goal.begin(), in_goal.end());

  for (const auto& atom : atoms) {
    const std::string name = task_.atom_name(atom);
    const int p = g.add_node(name);
    if (std::binary_search(in_state.begin(), in_state.end(), atom)) g.set(p, kLlgInState, 1.0);
    if (std::binary_search(in_goal.begin(), in_goal.end(), atom)) g.set(p, kLlgInGoal, 1.0);
    g.add_edge(p, atom.predicate, kGamma);
    for (size_t i = 0; i < atom.args.size(); ++i) {
      const int idx = static_cast<int>(i) + 1;
      const int pi = g.add_node(name + "#" + std::to_string(idx), idx);
      set_pe(g, pi, encoder_, idx);
      g.add_edge(p, pi, kGamma);
      g.add_edge(pi, np + atom.args[i], kGamma);
    }
  }
  LearningGraph out = g.finish();
  out.T = encoder_.dim();
  out.seed = encoder_.seed();
  return out;
}

LearningGraph build_llg(const LiftedTask& task, std::span<const Atom> state,
                        const IndexEncoder& encoder) {
  return LlgBuilder(task, encoder).build(state);
}

}  // namespace lgplan
