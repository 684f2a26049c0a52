#include <algorithm>
#include <set>

#include "vpla/graph.hpp"

namespace vpla {

namespace {

using Scope = std::vector<const std::vector<CompositeBlockDef>*>;

const CompositeBlockDef* lookup(const Scope& scope, std::string_view type_id) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it)
    for (const auto& c : **it)
      if (c.type_id == type_id) return &c;
  return nullptr;
}

std::optional<Point> centroid(const ProjectGraph& g) {
  if (g.nodes.empty()) return std::nullopt;
  double x = 0, y = 0;
  for (const auto& n : g.nodes) {
    if (!n.position) return std::nullopt;
    x += n.position->x;
    y += n.position->y;
  }
  return Point{x / g.nodes.size(), y / g.nodes.size()};
}

struct Flattened {
  ProjectGraph graph;
  // (instance id, composite port) -> endpoint in the flattened graph
  std::map<PortRef, PortRef> instance_ports;
};

Flattened flatten_in_scope(const ProjectGraph& g, Scope& scope, int depth) {
  if (depth > 64) throw Error(ErrorCode::InvalidComposite, "composite nesting too deep");
  Flattened result;
  if (std::none_of(g.nodes.begin(), g.nodes.end(), [](const Node& n) { return n.composite; })) {
    result.graph = g;
    return result;
  }

  scope.push_back(&g.composites);
  ProjectGraph& out = result.graph;
  out.project_id = g.project_id;
  out.composites = g.composites;
  out.extra = g.extra;

  std::set<std::string> taken;
  for (const auto& n : g.nodes)
    if (!n.composite) taken.insert(n.id);

  for (const auto& n : g.nodes) {
    if (!n.composite) {
      out.nodes.push_back(n);
      continue;
    }
    const CompositeBlockDef* def = lookup(scope, n.type_label);
    if (!def) throw Error(ErrorCode::UnknownCompositeType, n.type_label);
    Flattened inner = flatten_in_scope(def->inner, scope, depth + 1);

    auto anchor = centroid(inner.graph);
    std::map<std::string, std::string> renamed;
    for (const auto& in : inner.graph.nodes) {
      std::string id = n.id + "/" + in.id;
      for (int k = 2; taken.count(id); ++k) id = n.id + "/" + in.id + "~" + std::to_string(k);
      taken.insert(id);
      renamed[in.id] = id;
    }
    for (const auto& in : inner.graph.nodes) {
      Node copy = in;
      copy.id = renamed[in.id];
      if (auto b = n.bindings.find(in.id); b != n.bindings.end())
        for (const auto& [k, v] : b->second) copy.params[k] = v;
      if (anchor && n.position && copy.position) {
        copy.position->x += n.position->x - anchor->x;
        copy.position->y += n.position->y - anchor->y;
      }
      out.nodes.push_back(std::move(copy));
    }
    for (const auto& e : inner.graph.edges) {
      Edge copy = e;
      copy.src.node = renamed.at(e.src.node);
      copy.dst.node = renamed.at(e.dst.node);
      out.edges.push_back(std::move(copy));
    }
    for (const auto& [port, target] : def->boundary) {
      PortRef endpoint = target;
      if (auto it = inner.instance_ports.find(target); it != inner.instance_ports.end()) endpoint = it->second;
      auto r = renamed.find(endpoint.node);
      if (r == renamed.end())
        throw Error(ErrorCode::InvalidComposite, def->type_id + ": boundary port " + port + " has no target");
      result.instance_ports[{n.id, port}] = {r->second, endpoint.port};
    }
  }

  auto resolve = [&](const PortRef& ref) -> PortRef {
    const Node* node = g.find_node(ref.node);
    if (!node || !node->composite) return ref;
    auto it = result.instance_ports.find(ref);
    if (it == result.instance_ports.end()) throw Error(ErrorCode::UnknownPort, ref.node + "." + ref.port);
    return it->second;
  };
  for (const auto& e : g.edges) {
    Edge copy = e;
    copy.src = resolve(e.src);
    copy.dst = resolve(e.dst);
    out.edges.push_back(std::move(copy));
  }
  scope.pop_back();
  return result;
}

}  // namespace

ProjectGraph flatten(const ProjectGraph& g) {
  Scope scope;
  return flatten_in_scope(g, scope, 0).graph;
}

}  // namespace vpla
