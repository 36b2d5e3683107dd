#include <algorithm>
#include <bit>
#include <map>
#include <unordered_set>

#include "lgplan/random.hpp"
#include "lgplan/theory.hpp"

namespace lgplan {

namespace {

constexpr uint64_t kEdgeNodeTag = 0xed6eULL;

// Graph with labelled edges replaced by coloured auxiliary nodes.
struct AuxGraph {
  std::vector<std::vector<uint64_t>> init;  // initial colour key per node
  std::vector<std::vector<int>> adj;
};

void append(AuxGraph& out, const LearningGraph& g) {
  const int base = static_cast<int>(out.init.size());
  const int n = g.num_nodes();
  const int plain = g.kind == GraphKind::kLlg ? feature_dim(GraphKind::kLlg, 0) : g.dim();
  for (int u = 0; u < n; ++u) {
    std::vector<uint64_t> key{static_cast<uint64_t>(g.kind)};
    for (int c = 0; c < plain; ++c) key.push_back(std::bit_cast<uint64_t>(g.features(u, c) + 0.0));
    const int tag = u < static_cast<int>(g.index_tags.size()) ? g.index_tags[static_cast<size_t>(u)] : 0;
    key.push_back(static_cast<uint64_t>(tag));
    out.init.push_back(std::move(key));
    out.adj.emplace_back();
  }
  for (const auto& e : g.edges) {
    const int x = static_cast<int>(out.init.size());
    out.init.push_back({kEdgeNodeTag, static_cast<uint64_t>(e.label)});
    out.adj.push_back({base + e.u, base + e.v});
    out.adj[static_cast<size_t>(base + e.u)].push_back(x);
    out.adj[static_cast<size_t>(base + e.v)].push_back(x);
  }
}

size_t distinct(const std::vector<uint64_t>& colors) {
  return std::unordered_set<uint64_t>(colors.begin(), colors.end()).size();
}

}  // namespace

ColorHistogram wl_refine(const LearningGraph& graph) {
  AuxGraph aux;
  append(aux, graph);
  const size_t n = aux.init.size();
  std::vector<uint64_t> color(n);
  for (size_t u = 0; u < n; ++u) {
    uint64_t h = 0x77ULL;
    for (uint64_t k : aux.init[u]) h = hash_combine(h, k);
    color[u] = h;
  }
  size_t classes = distinct(color);
  ColorHistogram out;
  std::vector<uint64_t> next(n);
  std::vector<uint64_t> nb;
  while (true) {
    for (size_t u = 0; u < n; ++u) {
      nb.clear();
      for (int v : aux.adj[u]) nb.push_back(color[static_cast<size_t>(v)]);
      std::sort(nb.begin(), nb.end());
      uint64_t h = hash_combine(0x3c0ULL, color[u]);
      for (uint64_t c : nb) h = hash_combine(h, c);
      next[u] = h;
    }
    ++out.rounds;
    color.swap(next);
    const size_t now = distinct(color);
    if (now == classes) break;
    classes = now;
  }
  std::map<uint64_t, int> counts;
  for (uint64_t c : color) ++counts[c];
  out.counts.assign(counts.begin(), counts.end());
  return out;
}

bool wl_equivalent_exact(const LearningGraph& a, const LearningGraph& b) {
  AuxGraph aux;
  append(aux, a);
  const size_t split = aux.init.size();
  append(aux, b);
  const size_t n = aux.init.size();

  std::vector<int> color(n);
  {
    std::map<std::vector<uint64_t>, int> dict;
    for (size_t u = 0; u < n; ++u) {
      color[u] = dict.try_emplace(aux.init[u], static_cast<int>(dict.size())).first->second;
    }
  }
  auto classes = [](const std::vector<int>& c) {
    return std::unordered_set<int>(c.begin(), c.end()).size();
  };
  size_t count = classes(color);
  std::vector<int> next(n);
  while (true) {
    std::map<std::pair<int, std::vector<int>>, int> dict;
    for (size_t u = 0; u < n; ++u) {
      std::vector<int> nb;
      for (int v : aux.adj[u]) nb.push_back(color[static_cast<size_t>(v)]);
      std::sort(nb.begin(), nb.end());
      next[u] = dict.try_emplace({color[u], std::move(nb)}, static_cast<int>(dict.size()))
                    .first->second;
    }
    color.swap(next);
    const size_t now = classes(color);
    if (now == count) break;
    count = now;
  }
  std::vector<int> ca(color.begin(), color.begin() + static_cast<std::ptrdiff_t>(split));
  std::vector<int> cb(color.begin() + static_cast<std::ptrdiff_t>(split), color.end());
  std::sort(ca.begin(), ca.end());
  std::sort(cb.begin(), cb.end());
  return ca == cb;
}

}  // namespace lgplan
