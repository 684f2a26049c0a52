#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vpla/graph.hpp"

namespace fx {

inline vpla::Node op(const std::string& id, const std::string& type, std::optional<vpla::Point> at = std::nullopt) {
  vpla::Node n;
  n.id = id;
  n.type_label = type;
  n.in_ports = {"in"};
  n.out_ports = {"out"};
  if (at) {
    n.position = at;
    n.size = vpla::Extent{40.0, 20.0};
  }
  return n;
}

inline vpla::Node operand(const std::string& id, const std::string& name,
                          std::optional<vpla::Point> at = std::nullopt) {
  vpla::Node n = op(id, "VAR", at);
  n.kind = vpla::NodeKind::Operand;
  n.params["name"] = name;
  return n;
}

inline vpla::Edge edge(const std::string& src, const std::string& dst,
                       std::optional<std::string> label = std::nullopt) {
  return {{src, "out"}, {dst, "in"}, std::move(label), vpla::Json::object()};
}

inline vpla::ProjectGraph graph(std::vector<vpla::Node> nodes, std::vector<vpla::Edge> edges,
                                const std::string& id = "p") {
  vpla::ProjectGraph g;
  g.project_id = id;
  g.nodes = std::move(nodes);
  g.edges = std::move(edges);
  return g;
}

/// a0 -> a1 -> ... with the given types, laid out left to right.
inline vpla::ProjectGraph chain(const std::vector<std::string>& types, const std::string& id = "chain",
                                const std::string& prefix = "c") {
  vpla::ProjectGraph g;
  g.project_id = id;
  for (std::size_t i = 0; i < types.size(); ++i) {
    g.nodes.push_back(op(prefix + std::to_string(i), types[i], vpla::Point{100.0 * static_cast<double>(i), 0.0}));
    if (i) g.edges.push_back(edge(prefix + std::to_string(i - 1), prefix + std::to_string(i)));
  }
  return g;
}

/// Appends `part` to `g` (ids must not clash).
inline void append(vpla::ProjectGraph& g, const vpla::ProjectGraph& part) {
  g.nodes.insert(g.nodes.end(), part.nodes.begin(), part.nodes.end());
  g.edges.insert(g.edges.end(), part.edges.begin(), part.edges.end());
}

}  // namespace fx
