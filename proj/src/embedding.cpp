#include <algorithm>
#include <functional>

#include "vpla/graph.hpp"

namespace vpla {

namespace {

bool port_matches(const std::string& pattern_port, const std::string& host_port) {
  return pattern_port == kAnyPort || pattern_port == host_port;
}

bool edge_matches(const Edge& pe, const Edge& he) {
  if (!port_matches(pe.src.port, he.src.port) || !port_matches(pe.dst.port, he.dst.port)) return false;
  return !pe.label || pe.label == he.label;
}

bool node_matches(const Node& p, const Node& h) {
  return p.kind == h.kind && p.type_label == h.type_label && p.composite == h.composite;
}

}  // namespace

std::vector<Embedding> find_embeddings(const ProjectGraph& pattern, const ProjectGraph& host) {
  if (pattern.nodes.empty()) throw Error(ErrorCode::InvalidArgument, "pattern has no nodes");
  if (!is_weakly_connected(pattern)) throw Error(ErrorCode::PatternDisconnected, pattern.project_id);

  const GraphIndex pi(pattern);
  const GraphIndex hi(host);
  const std::size_t k = pattern.nodes.size();
  const std::size_t n = host.nodes.size();

  // Connected visiting order so every node after the first has a mapped
  // neighbour.
  std::vector<std::size_t> order{0};
  std::vector<char> seen(k, 0);
  seen[0] = 1;
  for (std::size_t q = 0; q < order.size(); ++q) {
    std::size_t v = order[q];
    auto visit = [&](std::size_t u) {
      if (!seen[u]) {
        seen[u] = 1;
        order.push_back(u);
      }
    };
    for (auto e : pi.out_edges(v)) visit(pi.target(e));
    for (auto e : pi.in_edges(v)) visit(pi.source(e));
  }
  std::vector<std::size_t> rank(k);
  for (std::size_t i = 0; i < k; ++i) rank[order[i]] = i;

  std::vector<std::size_t> map(k, n);
  std::vector<char> used(n, 0);
  std::vector<std::vector<std::size_t>> node_maps;

  auto host_has = [&](const Edge& pe, std::size_t hs, std::size_t ht) {
    for (auto he : hi.out_edges(hs))
      if (hi.target(he) == ht && edge_matches(pe, host.edges[he])) return true;
    return false;
  };

  auto feasible = [&](std::size_t v, std::size_t h) {
    if (!node_matches(pattern.nodes[v], host.nodes[h])) return false;
    if (hi.out_edges(h).size() < pi.out_edges(v).size() || hi.in_edges(h).size() < pi.in_edges(v).size())
      return false;
    for (auto e : pi.out_edges(v)) {
      std::size_t t = pi.target(e);
      if (t != v && rank[t] > rank[v]) continue;
      if (!host_has(pattern.edges[e], h, t == v ? h : map[t])) return false;
    }
    for (auto e : pi.in_edges(v)) {
      std::size_t s = pi.source(e);
      if (s == v || rank[s] > rank[v]) continue;
      if (!host_has(pattern.edges[e], map[s], h)) return false;
    }
    return true;
  };

  std::function<void(std::size_t)> extend = [&](std::size_t depth) {
    if (depth == k) {
      node_maps.push_back(map);
      return;
    }
    std::size_t v = order[depth];
    for (std::size_t h = 0; h < n; ++h) {
      if (used[h] || !feasible(v, h)) continue;
      map[v] = h;
      used[h] = 1;
      extend(depth + 1);
      used[h] = 0;
    }
    map[v] = n;
  };
  extend(0);

  // Injective edge assignment for each node map (first feasible in
  // pattern-edge order, host edges tried in index order).
  std::vector<Embedding> out;
  std::vector<char> edge_used(host.edges.size(), 0);
  for (const auto& nm : node_maps) {
    std::vector<std::size_t> emap(pattern.edges.size(), host.edges.size());
    std::function<bool(std::size_t)> assign = [&](std::size_t pe) {
      if (pe == pattern.edges.size()) return true;
      std::size_t hs = nm[pi.source(pe)], ht = nm[pi.target(pe)];
      for (auto he : hi.out_edges(hs)) {
        if (edge_used[he] || hi.target(he) != ht || !edge_matches(pattern.edges[pe], host.edges[he])) continue;
        edge_used[he] = 1;
        emap[pe] = he;
        if (assign(pe + 1)) {
          edge_used[he] = 0;
          return true;
        }
        edge_used[he] = 0;
      }
      return false;
    };
    std::fill(edge_used.begin(), edge_used.end(), 0);
    if (!assign(0)) continue;
    Embedding emb;
    for (std::size_t i = 0; i < k; ++i) emb.node_map[pattern.nodes[i].id] = host.nodes[nm[i]].id;
    emb.edge_map = std::move(emap);
    out.push_back(std::move(emb));
  }

  std::sort(out.begin(), out.end(), [&](const Embedding& a, const Embedding& b) {
    return a.host_nodes(pattern) < b.host_nodes(pattern);
  });
  return out;
}

}  // namespace vpla
