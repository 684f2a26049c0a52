#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

#include "vpla/encapsulation.hpp"

namespace vpla {

namespace {

// Rank per node: longest path over the condensation of the digraph, so
// every strongly connected component shares one layer.
std::vector<int> layer_ranks(const ProjectGraph& g, const GraphIndex& index) {
  const std::size_t n = g.nodes.size();
  std::vector<int> comp(n, -1), low(n, 0), num(n, -1);
  std::vector<std::size_t> stack;
  std::vector<char> on_stack(n, 0);
  int counter = 0, comps = 0;
  std::function<void(std::size_t)> strongconnect = [&](std::size_t v) {
    num[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (auto e : index.out_edges(v)) {
      const auto w = index.target(e);
      if (num[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], num[w]);
      }
    }
    if (low[v] == num[v]) {
      while (true) {
        const auto w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        comp[w] = comps;
        if (w == v) break;
      }
      ++comps;
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (num[v] < 0) strongconnect(v);

  // Tarjan emits components in reverse topological order.
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(comps));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int a = comp[index.source(e)], b = comp[index.target(e)];
    if (a != b) succ[static_cast<std::size_t>(a)].push_back(b);
  }
  std::vector<int> rank(static_cast<std::size_t>(comps), 0);
  for (int c = comps - 1; c >= 0; --c)
    for (int d : succ[static_cast<std::size_t>(c)])
      rank[static_cast<std::size_t>(d)] = std::max(rank[static_cast<std::size_t>(d)], rank[static_cast<std::size_t>(c)] + 1);
  std::vector<int> out(n);
  for (std::size_t v = 0; v < n; ++v) out[v] = rank[static_cast<std::size_t>(comp[v])];
  return out;
}

std::vector<std::vector<std::size_t>> ordered_layers(const ProjectGraph& g, const GraphIndex& index,
                                                     const std::vector<int>& rank) {
  const int depth = rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end()) + 1;
  std::vector<std::vector<std::size_t>> layers(static_cast<std::size_t>(depth));
  for (std::size_t v = 0; v < g.nodes.size(); ++v) layers[static_cast<std::size_t>(rank[v])].push_back(v);
  for (auto& layer : layers)
    std::sort(layer.begin(), layer.end(), [&](auto a, auto b) { return g.nodes[a].id < g.nodes[b].id; });

  std::vector<double> slot(g.nodes.size(), 0.0);
  auto renumber = [&] {
    for (auto& layer : layers)
      for (std::size_t i = 0; i < layer.size(); ++i) slot[layer[i]] = static_cast<double>(i);
  };
  renumber();
  auto sweep = [&](std::size_t l, int neighbour_rank) {
    std::vector<std::pair<double, std::size_t>> keyed;
    for (auto v : layers[l]) {
      double sum = 0.0;
      int count = 0;
      auto visit = [&](std::size_t u) {
        if (rank[u] == neighbour_rank) {
          sum += slot[u];
          ++count;
        }
      };
      for (auto e : index.out_edges(v)) visit(index.target(e));
      for (auto e : index.in_edges(v)) visit(index.source(e));
      keyed.emplace_back(count ? sum / count : slot[v], v);
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < keyed.size(); ++i) layers[l][i] = keyed[i].second;
    for (std::size_t i = 0; i < layers[l].size(); ++i) slot[layers[l][i]] = static_cast<double>(i);
  };
  for (int iter = 0; iter < 8; ++iter) {
    if (iter % 2 == 0)
      for (std::size_t l = 1; l < layers.size(); ++l) sweep(l, static_cast<int>(l) - 1);
    else
      for (std::size_t l = layers.size(); l-- > 1;) sweep(l - 1, static_cast<int>(l));
  }
  return layers;
}

ProjectGraph place(const ProjectGraph& g, const std::vector<std::vector<std::size_t>>& layers, bool left_to_right) {
  double w = 0.0, h = 0.0;
  for (const auto& n : g.nodes) {
    w = std::max(w, n.size->w);
    h = std::max(h, n.size->h);
  }
  const double step_rank = (left_to_right ? w : h) + 60.0;
  const double step_slot = (left_to_right ? h : w) + 40.0;
  ProjectGraph out = g;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const double centre = (static_cast<double>(layers[l].size()) - 1.0) / 2.0;
    for (std::size_t i = 0; i < layers[l].size(); ++i) {
      const double along = static_cast<double>(l) * step_rank;
      const double across = (static_cast<double>(i) - centre) * step_slot;
      out.nodes[layers[l][i]].position = left_to_right ? Point{along, across} : Point{across, along};
    }
  }
  return out;
}

}  // namespace

ProjectGraph optimize_layout(const ProjectGraph& g, const LayoutWeights& w, std::uint64_t seed) {
  w.check();
  for (const auto& n : g.nodes)
    if (!n.position || !n.size) throw Error(ErrorCode::MissingLayout, n.id);
  if (g.nodes.size() < 2) return g;

  GraphIndex index(g);
  const auto layers = ordered_layers(g, index, layer_ranks(g, index));
  ProjectGraph best = g;
  double best_score = layout_quality(g, w);
  for (bool ltr : {true, false}) {
    ProjectGraph candidate = place(g, layers, ltr);
    const double s = layout_quality(candidate, w);
    if (s < best_score) {
      best_score = s;
      best = std::move(candidate);
    }
  }

  // Hill climbing: single-node moves kept only when the score drops.
  double cell = 0.0;
  for (const auto& n : g.nodes) cell = std::max({cell, n.size->w, n.size->h});
  cell += 40.0;
  const double steps[] = {-cell, -cell / 2, -cell / 4, 0.0, cell / 4, cell / 2, cell};
  std::mt19937_64 rng(seed);
  const std::size_t iterations = std::min<std::size_t>(1500, 60 * g.nodes.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    const std::size_t v = rng() % best.nodes.size();
    const double dx = steps[rng() % 7], dy = steps[rng() % 7];
    if (dx == 0.0 && dy == 0.0) continue;
    Point& p = *best.nodes[v].position;
    const Point old = p;
    p.x += dx;
    p.y += dy;
    const double s = layout_quality(best, w);
    if (s < best_score - 1e-12)
      best_score = s;
    else
      p = old;
  }
  return best;
}

}  // namespace vpla
