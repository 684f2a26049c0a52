#include "vpla/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>

namespace vpla {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorCode::UnknownPort: return "UnknownPort";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::InvalidComposite: return "InvalidComposite";
    case ErrorCode::PatternDisconnected: return "PatternDisconnected";
    case ErrorCode::UnknownCompositeType: return "UnknownCompositeType";
    case ErrorCode::MissingLayout: return "MissingLayout";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidMinsup: return "InvalidMinsup";
    case ErrorCode::SizeExceedsCutoff: return "SizeExceedsCutoff";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::EmptyCloneList: return "EmptyCloneList";
    case ErrorCode::OverlappingOccurrences: return "OverlappingOccurrences";
    case ErrorCode::StaleEmbedding: return "StaleEmbedding";
    case ErrorCode::NoReadablePaths: return "NoReadablePaths";
    case ErrorCode::Io: return "Io";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownPlan: return "UnknownPlan";
    case ErrorCode::NothingToUndo: return "NothingToUndo";
  }
  return "Unknown";
}

std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::Operator ? "operator" : "operand";
}

NodeKind node_kind_from_string(std::string_view text) {
  if (text == "operator") return NodeKind::Operator;
  if (text == "operand") return NodeKind::Operand;
  throw Error(ErrorCode::MalformedDocument, "unknown node kind '" + std::string(text) + "'");
}

bool Node::has_in_port(std::string_view port) const {
  return std::find(in_ports.begin(), in_ports.end(), port) != in_ports.end();
}

bool Node::has_out_port(std::string_view port) const {
  return std::find(out_ports.begin(), out_ports.end(), port) != out_ports.end();
}

std::string Node::operand_identifier() const {
  auto it = params.find("name");
  if (it != params.end() && it->second.is_string()) return it->second.get<std::string>();
  return type_label;
}

const Node* ProjectGraph::find_node(std::string_view id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

std::optional<std::size_t> ProjectGraph::node_index(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

const CompositeBlockDef* ProjectGraph::find_composite(std::string_view type_id) const {
  for (const auto& c : composites)
    if (c.type_id == type_id) return &c;
  return nullptr;
}

bool operator==(const ProjectGraph& a, const ProjectGraph& b) {
  return a.project_id == b.project_id && a.nodes == b.nodes && a.edges == b.edges &&
         a.composites == b.composites && a.extra == b.extra;
}

bool operator==(const CompositeBlockDef& a, const CompositeBlockDef& b) {
  return a.type_id == b.type_id && a.inner == b.inner && a.in_ports == b.in_ports &&
         a.out_ports == b.out_ports && a.boundary == b.boundary && a.extra == b.extra;
}

std::vector<std::string> Embedding::host_nodes(const ProjectGraph& pattern) const {
  std::vector<std::string> out;
  out.reserve(pattern.nodes.size());
  for (const auto& n : pattern.nodes) out.push_back(node_map.at(n.id));
  return out;
}

GraphIndex::GraphIndex(const ProjectGraph& g)
    : out_(g.nodes.size()), in_(g.nodes.size()), src_(g.edges.size()), dst_(g.edges.size()) {
  ids_.reserve(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) ids_.emplace(g.nodes[i].id, i);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto s = ids_.find(g.edges[e].src.node);
    auto d = ids_.find(g.edges[e].dst.node);
    if (s == ids_.end() || d == ids_.end())
      throw Error(ErrorCode::DanglingEdge,
                  g.edges[e].src.node + " -> " + g.edges[e].dst.node);
    src_[e] = s->second;
    dst_[e] = d->second;
    out_[s->second].push_back(e);
    in_[d->second].push_back(e);
  }
}

std::optional<std::size_t> GraphIndex::index_of(std::string_view id) const {
  auto it = ids_.find(std::string(id));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t GraphIndex::at(std::string_view id) const {
  auto idx = index_of(id);
  if (!idx) throw Error(ErrorCode::UnknownNode, std::string(id));
  return *idx;
}

namespace {

std::string describe(const Edge& e) {
  return e.src.node + "." + e.src.port + " -> " + e.dst.node + "." + e.dst.port;
}

using CompositeScope = std::vector<const std::vector<CompositeBlockDef>*>;

const CompositeBlockDef* lookup(const CompositeScope& scope, std::string_view type_id) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it)
    for (const auto& c : **it)
      if (c.type_id == type_id) return &c;
  return nullptr;
}

void validate_plain(const ProjectGraph& g) {
  std::set<std::string_view> ids;
  for (const auto& n : g.nodes) {
    if (!ids.insert(n.id).second) throw Error(ErrorCode::DuplicateNodeId, n.id);
    std::set<std::string_view> ins(n.in_ports.begin(), n.in_ports.end());
    std::set<std::string_view> outs(n.out_ports.begin(), n.out_ports.end());
    if (ins.size() != n.in_ports.size() || outs.size() != n.out_ports.size())
      throw Error(ErrorCode::MalformedDocument, "duplicate port name on node " + n.id);
    if (n.size && (n.size->w <= 0.0 || n.size->h <= 0.0))
      throw Error(ErrorCode::MalformedDocument, "non-positive size on node " + n.id);
  }
  std::set<std::tuple<std::string_view, std::string_view, std::string_view, std::string_view>> tuples;
  for (const auto& e : g.edges) {
    const Node* s = g.find_node(e.src.node);
    const Node* d = g.find_node(e.dst.node);
    if (!s || !d) throw Error(ErrorCode::DanglingEdge, describe(e));
    if (!s->has_out_port(e.src.port)) throw Error(ErrorCode::UnknownPort, s->id + "." + e.src.port);
    if (!d->has_in_port(e.dst.port)) throw Error(ErrorCode::UnknownPort, d->id + "." + e.dst.port);
    if (e.src.node == e.dst.node && e.src.port == e.dst.port)
      throw Error(ErrorCode::InvalidEdge, "self edge on one port pair: " + describe(e));
    if (!tuples.emplace(e.src.node, e.src.port, e.dst.node, e.dst.port).second)
      throw Error(ErrorCode::DuplicateEdge, describe(e));
  }
}

void validate_composite(const CompositeBlockDef& def, CompositeScope& scope,
                        std::vector<std::string>& active);

void validate_in_scope(const ProjectGraph& g, CompositeScope& scope, std::vector<std::string>& active) {
  validate_plain(g);
  scope.push_back(&g.composites);
  std::set<std::string_view> type_ids;
  for (const auto& c : g.composites)
    if (!type_ids.insert(c.type_id).second)
      throw Error(ErrorCode::InvalidComposite, "duplicate composite type " + c.type_id);
  for (const auto& c : g.composites) validate_composite(c, scope, active);
  // Instances referencing defined composites must not reach a composite that
  // is currently being expanded.
  for (const auto& n : g.nodes) {
    if (!n.composite) continue;
    if (std::find(active.begin(), active.end(), n.type_label) != active.end())
      throw Error(ErrorCode::InvalidComposite, "composite " + n.type_label + " contains itself");
  }
  scope.pop_back();
}

void validate_composite(const CompositeBlockDef& def, CompositeScope& scope,
                        std::vector<std::string>& active) {
  if (std::find(active.begin(), active.end(), def.type_id) != active.end())
    throw Error(ErrorCode::InvalidComposite, "composite " + def.type_id + " contains itself");
  active.push_back(def.type_id);
  validate_in_scope(def.inner, scope, active);
  // Follow instances inside the inner graph to their definitions so that
  // mutual recursion through sibling definitions is caught as well.
  scope.push_back(&def.inner.composites);
  for (const auto& n : def.inner.nodes) {
    if (!n.composite) continue;
    if (const CompositeBlockDef* used = lookup(scope, n.type_label)) {
      if (std::find(active.begin(), active.end(), used->type_id) != active.end())
        throw Error(ErrorCode::InvalidComposite, "composite cycle through " + used->type_id);
      validate_composite(*used, scope, active);
    }
  }
  scope.pop_back();
  std::set<std::string_view> declared;
  for (const auto& p : def.in_ports) declared.insert(p);
  for (const auto& p : def.out_ports) declared.insert(p);
  if (declared.size() != def.in_ports.size() + def.out_ports.size())
    throw Error(ErrorCode::InvalidComposite, def.type_id + ": duplicate boundary port");
  for (const auto& [port, target] : def.boundary) {
    if (!declared.count(port))
      throw Error(ErrorCode::InvalidComposite, def.type_id + ": undeclared boundary port " + port);
    const Node* n = def.inner.find_node(target.node);
    if (!n) throw Error(ErrorCode::InvalidComposite, def.type_id + ": boundary target " + target.node + " missing");
    bool is_in = std::find(def.in_ports.begin(), def.in_ports.end(), port) != def.in_ports.end();
    if (is_in ? !n->has_in_port(target.port) : !n->has_out_port(target.port))
      throw Error(ErrorCode::InvalidComposite, def.type_id + ": boundary port " + port + " maps to unknown inner port");
  }
  for (const auto& p : def.in_ports)
    if (!def.boundary.count(p)) throw Error(ErrorCode::InvalidComposite, def.type_id + ": unmapped port " + p);
  for (const auto& p : def.out_ports)
    if (!def.boundary.count(p)) throw Error(ErrorCode::InvalidComposite, def.type_id + ": unmapped port " + p);
  active.pop_back();
}

}  // namespace

void validate(const ProjectGraph& g) {
  CompositeScope scope;
  std::vector<std::string> active;
  validate_in_scope(g, scope, active);
}

std::vector<std::vector<std::size_t>> weak_components(const ProjectGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  GraphIndex index(g);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    std::size_t a = find(index.source(e)), b = find(index.target(e));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

bool is_weakly_connected(const ProjectGraph& g) {
  return !g.nodes.empty() && weak_components(g).size() == 1;
}

ProjectGraph induced_subgraph(const ProjectGraph& g, const std::vector<std::string>& node_ids) {
  std::set<std::string> keep;
  for (const auto& id : node_ids) {
    if (!g.find_node(id)) throw Error(ErrorCode::UnknownNode, id);
    keep.insert(id);
  }
  ProjectGraph out;
  out.project_id = g.project_id;
  out.composites = g.composites;
  for (const auto& n : g.nodes)
    if (keep.count(n.id)) out.nodes.push_back(n);
  for (const auto& e : g.edges)
    if (keep.count(e.src.node) && keep.count(e.dst.node)) out.edges.push_back(e);
  return out;
}

ProjectGraph expand_edge_params(const ProjectGraph& g) {
  ProjectGraph out = g;
  out.edges.clear();
  std::set<std::string> used;
  for (const auto& n : g.nodes) used.insert(n.id);
  std::size_t counter = 0;
  for (const auto& e : g.edges) {
    if (!e.label) {
      out.edges.push_back(e);
      continue;
    }
    std::string id;
    do {
      id = "param:" + *e.label + "#" + std::to_string(++counter);
    } while (used.count(id));
    used.insert(id);

    Node p;
    p.id = id;
    p.kind = NodeKind::Operand;
    p.type_label = *e.label;
    p.in_ports = {"in"};
    p.out_ports = {"out"};
    const Node* s = g.find_node(e.src.node);
    const Node* d = g.find_node(e.dst.node);
    if (s && d && s->position && d->position) {
      p.position = Point{(s->position->x + d->position->x) / 2.0, (s->position->y + d->position->y) / 2.0};
      p.size = Extent{20.0, 20.0};
    }
    out.nodes.push_back(std::move(p));

    Edge first;
    first.src = e.src;
    first.dst = {id, "in"};
    first.extra = e.extra;
    Edge second;
    second.src = {id, "out"};
    second.dst = e.dst;
    out.edges.push_back(std::move(first));
    out.edges.push_back(std::move(second));
  }
  return out;
}

namespace {

struct IsoNodeSig {
  NodeKind kind;
  std::string type;
  bool composite;
  std::vector<std::string> in_ports, out_ports;
  Json params;
  Json bindings;
  bool operator==(const IsoNodeSig&) const = default;
};

IsoNodeSig signature(const Node& n) {
  Json params = Json::object();
  for (const auto& [k, v] : n.params) params[k] = v;
  Json bindings = Json::object();
  for (const auto& [k, v] : n.bindings)
    for (const auto& [pk, pv] : v) bindings[k][pk] = pv;
  return {n.kind, n.type_label, n.composite, n.in_ports, n.out_ports, params, bindings};
}

using EdgeKey = std::tuple<std::size_t, std::string, std::size_t, std::string, std::optional<std::string>>;

}  // namespace

bool are_isomorphic(const ProjectGraph& a, const ProjectGraph& b) {
  const std::size_t n = a.nodes.size();
  if (n != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
  GraphIndex ia(a), ib(b);

  std::vector<IsoNodeSig> sa, sb;
  for (const auto& node : a.nodes) sa.push_back(signature(node));
  for (const auto& node : b.nodes) sb.push_back(signature(node));

  // Multiset of edges of b for membership tests.
  std::multiset<EdgeKey> edges_b;
  for (std::size_t e = 0; e < b.edges.size(); ++e)
    edges_b.emplace(ib.source(e), b.edges[e].src.port, ib.target(e), b.edges[e].dst.port, b.edges[e].label);

  // Candidate lists by signature + degree.
  std::vector<std::vector<std::size_t>> cand(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (sa[i] == sb[j] && ia.out_edges(i).size() == ib.out_edges(j).size() &&
          ia.in_edges(i).size() == ib.in_edges(j).size())
        cand[i].push_back(j);
  for (const auto& c : cand)
    if (c.empty()) return false;

  // Assign nodes in BFS order from the most constrained node of each
  // component so edge checks prune early.
  std::vector<std::size_t> order;
  std::vector<char> seen(n, 0);
  while (order.size() < n) {
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!seen[i] && (start == n || cand[i].size() < cand[start].size())) start = i;
    std::vector<std::size_t> queue{start};
    seen[start] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      std::size_t v = queue[q];
      order.push_back(v);
      auto visit = [&](std::size_t u) {
        if (!seen[u]) {
          seen[u] = 1;
          queue.push_back(u);
        }
      };
      for (auto e : ia.out_edges(v)) visit(ia.target(e));
      for (auto e : ia.in_edges(v)) visit(ia.source(e));
    }
  }
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;

  std::vector<std::size_t> map(n, n);
  std::vector<char> used(n, 0);

  auto edges_ok = [&](std::size_t v) {
    // Every a-edge between v and already mapped nodes must exist in b with
    // the same multiplicity.
    std::multiset<EdgeKey> need;
    auto add = [&](std::size_t e) {
      std::size_t s = ia.source(e), t = ia.target(e);
      if (pos[s] > pos[v] || pos[t] > pos[v]) return;
      need.emplace(map[s], a.edges[e].src.port, map[t], a.edges[e].dst.port, a.edges[e].label);
    };
    for (auto e : ia.out_edges(v)) add(e);
    for (auto e : ia.in_edges(v))
      if (ia.source(e) != v) add(e);
    for (auto it = need.begin(); it != need.end(); it = need.upper_bound(*it))
      if (edges_b.count(*it) < need.count(*it)) return false;
    return true;
  };

  std::function<bool(std::size_t)> solve = [&](std::size_t depth) {
    if (depth == n) return true;
    std::size_t v = order[depth];
    for (std::size_t c : cand[v]) {
      if (used[c]) continue;
      map[v] = c;
      used[c] = 1;
      if (edges_ok(v) && solve(depth + 1)) return true;
      used[c] = 0;
      map[v] = n;
    }
    return false;
  };
  return solve(0);
}

}  // namespace vpla
