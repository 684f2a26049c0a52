#include "dfs_code.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>
#include <tuple>

namespace vpla::detail {

const Arc* LabeledGraph::arc(int from, int to) const {
  for (const auto& a : adj[static_cast<std::size_t>(from)])
    if (a.to == to) return &a;
  return nullptr;
}

bool LabeledGraph::connected() const {
  if (label.empty()) return false;
  std::vector<char> seen(label.size(), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& a : adj[static_cast<std::size_t>(v)])
      if (!seen[static_cast<std::size_t>(a.to)]) {
        seen[static_cast<std::size_t>(a.to)] = 1;
        ++count;
        stack.push_back(a.to);
      }
  }
  return count == size();
}

LabelAlphabet::LabelAlphabet(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  names_ = std::move(labels);
  for (std::size_t i = 0; i < names_.size(); ++i) ids_[names_[i]] = static_cast<int>(i);
}

int LabelAlphabet::id(const std::string& label) const {
  auto it = ids_.find(label);
  if (it == ids_.end()) return -1;
  return it->second;
}

LabeledGraph to_labeled(const ProjectGraph& view, const LabelAlphabet& alphabet) {
  LabeledGraph g;
  GraphIndex index(view);
  const std::size_t n = view.nodes.size();
  g.label.resize(n);
  g.adj.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string l = view.nodes[i].composite ? "composite:" + view.nodes[i].type_label
                                            : std::string(to_string(view.nodes[i].kind)) + ":" +
                                                  view.nodes[i].type_label;
    g.label[i] = alphabet.id(l);
    if (g.label[i] < 0) throw Error(ErrorCode::InvalidArgument, "label outside alphabet: " + l);
  }
  std::set<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t e = 0; e < view.edges.size(); ++e) {
    auto s = index.source(e), t = index.target(e);
    if (s != t) arcs.insert({s, t});
  }
  std::set<std::pair<std::size_t, std::size_t>> done;
  for (auto [s, t] : arcs) {
    auto key = std::minmax(s, t);
    if (!done.insert(key).second) continue;
    const bool fwd = arcs.count({key.first, key.second}) > 0;
    const bool bwd = arcs.count({key.second, key.first}) > 0;
    const int el = fwd && bwd ? kArcBoth : fwd ? kArcForward : kArcBackward;
    const int eid = g.edge_count++;
    g.adj[key.first].push_back({static_cast<int>(key.second), el, eid});
    g.adj[key.second].push_back({static_cast<int>(key.first), reverse_arc(el), eid});
  }
  return g;
}

int vertex_count(const DfsCode& code) {
  int n = 0;
  for (const auto& e : code) n = std::max({n, e.from + 1, e.to + 1});
  return n;
}

LabeledGraph graph_from_code(const DfsCode& code) {
  LabeledGraph g;
  const int n = vertex_count(code);
  g.label.assign(static_cast<std::size_t>(n), -1);
  g.adj.resize(static_cast<std::size_t>(n));
  for (const auto& e : code) {
    g.label[static_cast<std::size_t>(e.from)] = e.from_label;
    g.label[static_cast<std::size_t>(e.to)] = e.to_label;
    const int eid = g.edge_count++;
    g.adj[static_cast<std::size_t>(e.from)].push_back({e.to, e.elabel, eid});
    g.adj[static_cast<std::size_t>(e.to)].push_back({e.from, reverse_arc(e.elabel), eid});
  }
  return g;
}

std::vector<int> rightmost_path(const DfsCode& code) {
  std::vector<int> path;
  int old_from = -1;
  for (int i = static_cast<int>(code.size()) - 1; i >= 0; --i) {
    const auto& e = code[static_cast<std::size_t>(i)];
    if (e.forward() && (path.empty() || old_from == e.to)) {
      path.push_back(i);
      old_from = e.from;
    }
  }
  return path;
}

namespace {

struct Partial {
  std::vector<int> vmap;  // dfs index -> graph vertex
  std::vector<char> vused;
  std::vector<char> eused;
};

// Greedy construction of the minimum code, keeping every partial embedding
// that realises the current prefix. With `target` set, stops at the first
// edge that differs from it.
bool build_minimum(const LabeledGraph& g, const DfsCode* target, MinimumCode* out) {
  constexpr int kInf = std::numeric_limits<int>::max();
  DfsCode code;
  std::vector<Partial> parts;

  std::tuple<int, int, int> best{kInf, kInf, kInf};
  for (int v = 0; v < g.size(); ++v)
    for (const auto& a : g.adj[static_cast<std::size_t>(v)])
      if (g.label[static_cast<std::size_t>(v)] <= g.label[static_cast<std::size_t>(a.to)])
        best = std::min(best, {g.label[static_cast<std::size_t>(v)], a.elabel, g.label[static_cast<std::size_t>(a.to)]});
  if (std::get<0>(best) == kInf) throw Error(ErrorCode::InvalidArgument, "graph without edges has no DFS code");
  const DfsEdge first{0, 1, std::get<0>(best), std::get<1>(best), std::get<2>(best)};
  if (target && (target->empty() || (*target)[0] != first)) return false;
  code.push_back(first);
  for (int v = 0; v < g.size(); ++v)
    for (const auto& a : g.adj[static_cast<std::size_t>(v)])
      if (g.label[static_cast<std::size_t>(v)] == first.from_label && a.elabel == first.elabel &&
          g.label[static_cast<std::size_t>(a.to)] == first.to_label) {
        Partial p;
        p.vmap = {v, a.to};
        p.vused.assign(static_cast<std::size_t>(g.size()), 0);
        p.eused.assign(static_cast<std::size_t>(g.edge_count), 0);
        p.vused[static_cast<std::size_t>(v)] = p.vused[static_cast<std::size_t>(a.to)] = 1;
        p.eused[static_cast<std::size_t>(a.eid)] = 1;
        parts.push_back(std::move(p));
      }

  const int minlabel = first.from_label;
  auto vlabel = [&](int dfs) {
    for (const auto& e : code) {
      if (e.from == dfs) return e.from_label;
      if (e.to == dfs) return e.to_label;
    }
    return -1;
  };

  while (true) {
    const auto rmpath = rightmost_path(code);
    const int maxtoc = code[static_cast<std::size_t>(rmpath[0])].to;
    std::optional<DfsEdge> next;
    std::vector<Partial> grown;

    // Backward edges from the rightmost vertex, smallest target first.
    for (int i = static_cast<int>(rmpath.size()) - 1; i >= 1 && !next; --i) {
      const int t = code[static_cast<std::size_t>(rmpath[static_cast<std::size_t>(i)])].from;
      int el = kInf;
      for (const auto& p : parts) {
        const Arc* a = g.arc(p.vmap[static_cast<std::size_t>(maxtoc)], p.vmap[static_cast<std::size_t>(t)]);
        if (a && !p.eused[static_cast<std::size_t>(a->eid)]) el = std::min(el, a->elabel);
      }
      if (el == kInf) continue;
      next = DfsEdge{maxtoc, t, vlabel(maxtoc), el, vlabel(t)};
      for (const auto& p : parts) {
        const Arc* a = g.arc(p.vmap[static_cast<std::size_t>(maxtoc)], p.vmap[static_cast<std::size_t>(t)]);
        if (a && !p.eused[static_cast<std::size_t>(a->eid)] && a->elabel == el) {
          Partial q = p;
          q.eused[static_cast<std::size_t>(a->eid)] = 1;
          grown.push_back(std::move(q));
        }
      }
    }

    // Forward edges: from the rightmost vertex, then up the rightmost path.
    auto try_forward = [&](int from) {
      std::pair<int, int> key{kInf, kInf};
      for (const auto& p : parts)
        for (const auto& a : g.adj[static_cast<std::size_t>(p.vmap[static_cast<std::size_t>(from)])]) {
          const int tl = g.label[static_cast<std::size_t>(a.to)];
          if (p.vused[static_cast<std::size_t>(a.to)] || tl < minlabel) continue;
          key = std::min(key, {a.elabel, tl});
        }
      if (key.first == kInf) return;
      next = DfsEdge{from, maxtoc + 1, vlabel(from), key.first, key.second};
      for (const auto& p : parts)
        for (const auto& a : g.adj[static_cast<std::size_t>(p.vmap[static_cast<std::size_t>(from)])]) {
          if (p.vused[static_cast<std::size_t>(a.to)] || a.elabel != key.first ||
              g.label[static_cast<std::size_t>(a.to)] != key.second)
            continue;
          Partial q = p;
          q.vmap.push_back(a.to);
          q.vused[static_cast<std::size_t>(a.to)] = 1;
          q.eused[static_cast<std::size_t>(a.eid)] = 1;
          grown.push_back(std::move(q));
        }
    };
    if (!next) try_forward(maxtoc);
    for (std::size_t i = 0; i < rmpath.size() && !next; ++i)
      try_forward(code[static_cast<std::size_t>(rmpath[i])].from);

    if (!next) break;
    if (target && (code.size() >= target->size() || (*target)[code.size()] != *next)) return false;
    code.push_back(*next);
    parts = std::move(grown);
  }

  if (target) return code.size() == target->size();
  if (out) {
    out->code = std::move(code);
    out->orderings.clear();
    for (auto& p : parts) out->orderings.push_back(std::move(p.vmap));
    std::sort(out->orderings.begin(), out->orderings.end());
  }
  return true;
}

}  // namespace

MinimumCode minimum_code(const LabeledGraph& g) {
  MinimumCode m;
  build_minimum(g, nullptr, &m);
  return m;
}

bool is_minimal(const DfsCode& code) {
  if (code.empty()) return true;
  return build_minimum(graph_from_code(code), &code, nullptr);
}

namespace {

const char* direction_symbol(int elabel) {
  return elabel == kArcForward ? ">" : elabel == kArcBackward ? "<" : "<>";
}

}  // namespace

std::string code_to_string(const DfsCode& code, const LabelAlphabet& alphabet) {
  std::string out = "[";
  for (std::size_t i = 0; i < code.size(); ++i) {
    const auto& e = code[i];
    if (i) out += ',';
    out += '[' + std::to_string(e.from) + ',' + std::to_string(e.to) + ',' + Json(alphabet.name(e.from_label)).dump() +
           ",\"" + direction_symbol(e.elabel) + "\"," + Json(alphabet.name(e.to_label)).dump() + ']';
  }
  return out + "]";
}

std::string single_vertex_code(const std::string& label) { return "[" + Json(label).dump() + "]"; }

Node node_from_label(const std::string& id, const std::string& label) {
  Node n;
  n.id = id;
  auto colon = label.find(':');
  const std::string kind = label.substr(0, colon);
  n.type_label = colon == std::string::npos ? std::string() : label.substr(colon + 1);
  if (kind == "composite") {
    n.kind = NodeKind::Operator;
    n.composite = true;
  } else {
    n.kind = node_kind_from_string(kind);
  }
  n.in_ports = {std::string(kAnyPort)};
  n.out_ports = {std::string(kAnyPort)};
  return n;
}

ProjectGraph pattern_graph(const DfsCode& code, const LabelAlphabet& alphabet) {
  ProjectGraph p;
  const int n = vertex_count(code);
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (const auto& e : code) {
    labels[static_cast<std::size_t>(e.from)] = e.from_label;
    labels[static_cast<std::size_t>(e.to)] = e.to_label;
  }
  for (int i = 0; i < n; ++i)
    p.nodes.push_back(node_from_label(std::to_string(i), alphabet.name(labels[static_cast<std::size_t>(i)])));
  const std::string any(kAnyPort);
  for (const auto& e : code) {
    const std::string a = std::to_string(e.from), b = std::to_string(e.to);
    if (e.elabel == kArcForward || e.elabel == kArcBoth) p.edges.push_back({{a, any}, {b, any}, std::nullopt, Json::object()});
    if (e.elabel == kArcBackward || e.elabel == kArcBoth) p.edges.push_back({{b, any}, {a, any}, std::nullopt, Json::object()});
  }
  return p;
}

ProjectGraph single_vertex_pattern(const std::string& label) {
  ProjectGraph p;
  p.nodes.push_back(node_from_label("0", label));
  return p;
}

}  // namespace vpla::detail
