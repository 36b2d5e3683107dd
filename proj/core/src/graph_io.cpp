#include <algorithm>

#include <nlohmann/json.hpp>

#include "lgplan/errors.hpp"
#include "lgplan/graph.hpp"

namespace lgplan {

std::string graph_to_json(const LearningGraph& graph) {
  nlohmann::ordered_json doc;
  doc["kind"] = std::string(to_string(graph.kind));
  doc["T"] = graph.T;
  doc["seed"] = graph.seed;
  doc["labels"] = label_names(graph.kind);
  auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
  for (int u = 0; u < graph.num_nodes(); ++u) {
    std::vector<double> row(graph.features.row(u).data(),
                            graph.features.row(u).data() + graph.dim());
    nodes.push_back({{"id", u}, {"name", graph.node_names[static_cast<size_t>(u)]},
                     {"features", row}});
  }
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"u", e.u}, {"v", e.v}, {"label", label_names(graph.kind)[static_cast<size_t>(e.label)]}});
  }
  return doc.dump(1) + "\n";
}

LearningGraph graph_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(e.what(), 1, static_cast<int>(e.byte));
  }
  try {
    LearningGraph g;
    g.kind = parse_graph_kind(doc.at("kind").get<std::string>());
    g.T = doc.at("T").get<int>();
    g.seed = doc.at("seed").get<uint64_t>();
    const auto& nodes = doc.at("nodes");
    const int dim = feature_dim(g.kind, g.T);
    g.features.resize(static_cast<Eigen::Index>(nodes.size()), dim);
    g.index_tags.assign(nodes.size(), 0);
    for (size_t u = 0; u < nodes.size(); ++u) {
      const auto& node = nodes[u];
      if (node.at("id").get<size_t>() != u) throw Error("graph JSON: node ids must be contiguous");
      auto row = node.at("features").get<std::vector<double>>();
      if (static_cast<int>(row.size()) != dim) throw DimensionMismatch("graph JSON: feature width");
      for (int k = 0; k < dim; ++k) g.features(static_cast<Eigen::Index>(u), k) = row[static_cast<size_t>(k)];
      g.node_names.push_back(node.value("name", std::string()));
      if (g.kind == GraphKind::kLlg) {
        const auto& name = g.node_names.back();
        if (auto hash = name.rfind('#'); hash != std::string::npos) {
          g.index_tags[u] = std::stoi(name.substr(hash + 1));
        }
      }
    }
    const auto& labels = label_names(g.kind);
    for (const auto& e : doc.at("edges")) {
      const auto label = e.at("label").get<std::string>();
      auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) throw Error("graph JSON: unknown edge label '" + label + "'");
      g.edges.push_back({e.at("u").get<int>(), e.at("v").get<int>(),
                         static_cast<int>(it - labels.begin())});
    }
    g.finalize();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("graph JSON: ") + e.what());
  }
}

std::string graph_to_dot(const LearningGraph& graph) {
  static const char* kColors[] = {"black", "blue", "red", "darkgreen", "gray"};
  std::string out = "graph " + std::string(to_string(graph.kind)) + " {\n";
  for (int u = 0; u < graph.num_nodes(); ++u) {
    std::string name = graph.node_names[static_cast<size_t>(u)];
    std::string escaped;
    for (char c : name) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    out += "  n" + std::to_string(u) + " [label=\"" + escaped + "\"];\n";
  }
  const auto& labels = label_names(graph.kind);
  for (const auto& e : graph.edges) {
    out += "  n" + std::to_string(e.u) + " -- n" + std::to_string(e.v) + " [label=\"" +
           labels[static_cast<size_t>(e.label)] + "\", color=" + kColors[e.label % 5] + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace lgplan
