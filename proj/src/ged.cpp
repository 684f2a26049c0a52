#include "vpla/ged.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

#include "vpla/mining.hpp"

namespace vpla {

void EditCosts::check() const {
  for (double c : {node_insert, node_delete, node_substitute, edge_insert, edge_delete, edge_substitute})
    if (!(c >= 0.0) || std::isinf(c)) throw Error(ErrorCode::InvalidArgument, "edit costs must be finite and >= 0");
}

GedEngine::GedEngine(EditCosts costs) : costs_(costs) {
  costs_.check();
  edge_labels_[""] = 0;
}

GedEngine::Graph GedEngine::prepare(const ProjectGraph& g) {
  Graph out;
  const int n = static_cast<int>(g.nodes.size());
  GraphIndex index(g);
  for (const auto& node : g.nodes) {
    out.ids.push_back(node.id);
    auto [it, fresh] = node_labels_.emplace(mining_label(node), static_cast<int>(node_labels_.size()));
    out.label.push_back(it->second);
  }
  std::vector<std::vector<int>> pairs(static_cast<std::size_t>(n * n));
  out.degree.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto s = index.source(e), t = index.target(e);
    const std::string key = g.edges[e].label.value_or("");
    auto [it, fresh] = edge_labels_.emplace(key, static_cast<int>(edge_labels_.size()));
    pairs[s * static_cast<std::size_t>(n) + t].push_back(it->second);
    ++out.degree[s];
    ++out.degree[t];
  }
  out.offset.push_back(0);
  for (auto& p : pairs) {
    std::sort(p.begin(), p.end());
    out.pair_labels.insert(out.pair_labels.end(), p.begin(), p.end());
    out.offset.push_back(static_cast<std::uint32_t>(out.pair_labels.size()));
  }
  out.edge_count = static_cast<int>(g.edges.size());
  return out;
}

double GedEngine::pair_cost(const Graph& a, int u, int v, const Graph& b, int x, int y) const {
  const auto ka = static_cast<std::size_t>(u * a.size() + v);
  const auto kb = static_cast<std::size_t>(x * b.size() + y);
  const int* pa = a.pair_labels.data() + a.offset[ka];
  const int* ea = a.pair_labels.data() + a.offset[ka + 1];
  const int* pb = b.pair_labels.data() + b.offset[kb];
  const int* eb = b.pair_labels.data() + b.offset[kb + 1];
  const long na = ea - pa, nb = eb - pb;
  if (na == 0 && nb == 0) return 0.0;
  long common = 0;
  while (pa != ea && pb != eb) {
    if (*pa < *pb) {
      ++pa;
    } else if (*pb < *pa) {
      ++pb;
    } else {
      ++common;
      ++pa;
      ++pb;
    }
  }
  const long ra = na - common, rb = nb - common, m = std::min(ra, rb);
  return static_cast<double>(m) * std::min(costs_.edge_substitute, costs_.edge_delete + costs_.edge_insert) +
         static_cast<double>(ra - m) * costs_.edge_delete + static_cast<double>(rb - m) * costs_.edge_insert;
}

double GedEngine::assignment_cost(const Graph& a, const Graph& b, const std::vector<int>& map) const {
  const int n1 = a.size(), n2 = b.size();
  double cost = 0.0;
  std::array<char, 64> small{};
  std::vector<char> large;
  char* hit = small.data();
  if (n2 > static_cast<int>(small.size())) {
    large.assign(static_cast<std::size_t>(n2), 0);
    hit = large.data();
  }
  for (int u = 0; u < n1; ++u) {
    const int x = map[static_cast<std::size_t>(u)];
    if (x < 0) {
      cost += costs_.node_delete;
    } else {
      hit[static_cast<std::size_t>(x)] = 1;
      if (a.label[static_cast<std::size_t>(u)] != b.label[static_cast<std::size_t>(x)]) cost += costs_.node_substitute;
    }
  }
  for (int x = 0; x < n2; ++x)
    if (!hit[static_cast<std::size_t>(x)]) cost += costs_.node_insert;
  for (int u = 0; u < n1; ++u)
    for (int v = 0; v < n1; ++v) {
      const int x = map[static_cast<std::size_t>(u)], y = map[static_cast<std::size_t>(v)];
      if (x < 0 || y < 0)
        cost += a.pair_size(u, v) * costs_.edge_delete;
      else
        cost += pair_cost(a, u, v, b, x, y);
    }
  for (int x = 0; x < n2; ++x)
    for (int y = 0; y < n2; ++y)
      if (!hit[static_cast<std::size_t>(x)] || !hit[static_cast<std::size_t>(y)])
        cost += b.pair_size(x, y) * costs_.edge_insert;
  return cost;
}

namespace {

double node_bound(const std::vector<int>& la, const std::vector<int>& lb, const EditCosts& c) {
  std::vector<int> x = la, y = lb;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::vector<int> common;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
  const double r1 = static_cast<double>(x.size()), r2 = static_cast<double>(y.size());
  const double m = std::min(r1, r2);
  return (m - static_cast<double>(common.size())) * std::min(c.node_substitute, c.node_delete + c.node_insert) +
         (r1 - m) * c.node_delete + (r2 - m) * c.node_insert;
}

double edge_bound(int r1, int r2, const EditCosts& c) {
  return r1 > r2 ? (r1 - r2) * c.edge_delete : (r2 - r1) * c.edge_insert;
}

}  // namespace

double GedEngine::lower_bound(const Graph& a, const Graph& b) const {
  return node_bound(a.label, b.label, costs_) + edge_bound(a.edge_count, b.edge_count, costs_);
}

double GedEngine::greedy_assignment(const Graph& a, const Graph& b, std::vector<int>& map) const {
  const int n1 = a.size(), n2 = b.size();
  thread_local std::vector<int> order, by_id;
  thread_local std::vector<char> used;
  order.resize(static_cast<std::size_t>(n1));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return a.degree[static_cast<std::size_t>(x)] > a.degree[static_cast<std::size_t>(y)];
  });

  // Equal labels first (closest degree), then the rest by degree.
  map.assign(static_cast<std::size_t>(n1), -1);
  used.assign(static_cast<std::size_t>(n2), 0);
  auto closest = [&](int u, bool same_label) {
    int best = -1, best_gap = 0;
    for (int x = 0; x < n2; ++x) {
      if (used[static_cast<std::size_t>(x)]) continue;
      if (same_label && a.label[static_cast<std::size_t>(u)] != b.label[static_cast<std::size_t>(x)]) continue;
      const int gap = std::abs(a.degree[static_cast<std::size_t>(u)] - b.degree[static_cast<std::size_t>(x)]);
      if (best < 0 || gap < best_gap) {
        best = x;
        best_gap = gap;
      }
    }
    return best;
  };
  for (int u : order) {
    const int x = closest(u, true);
    if (x >= 0) {
      map[static_cast<std::size_t>(u)] = x;
      used[static_cast<std::size_t>(x)] = 1;
    }
  }
  if (costs_.node_substitute < costs_.node_delete + costs_.node_insert)
    for (int u : order) {
      if (map[static_cast<std::size_t>(u)] >= 0) continue;
      const int x = closest(u, false);
      if (x >= 0) {
        map[static_cast<std::size_t>(u)] = x;
        used[static_cast<std::size_t>(x)] = 1;
      }
    }

  by_id.assign(static_cast<std::size_t>(n1), -1);
  for (int u = 0; u < n1; ++u)
    for (int x = 0; x < n2; ++x)
      if (a.ids[static_cast<std::size_t>(u)] == b.ids[static_cast<std::size_t>(x)]) {
        by_id[static_cast<std::size_t>(u)] = x;
        break;
      }

  double best = assignment_cost(a, b, map);
  if (double c = assignment_cost(a, b, by_id); c < best) {
    best = c;
    map = by_id;
  }
  return best;
}

double GedEngine::partial_cost(const Graph& a, const Graph& b, const std::vector<int>& map, const std::vector<char>& hit,
                               const int* us, int nu, const int* xs, int nx) const {
  const int n1 = a.size(), n2 = b.size();
  auto in = [](const int* set, int n, int v) { return std::find(set, set + n, v) != set + n; };
  auto a_pair = [&](int u, int v) {
    const int x = map[static_cast<std::size_t>(u)], y = map[static_cast<std::size_t>(v)];
    return x < 0 || y < 0 ? a.pair_size(u, v) * costs_.edge_delete : pair_cost(a, u, v, b, x, y);
  };
  auto b_pair = [&](int x, int y) {
    return hit[static_cast<std::size_t>(x)] && hit[static_cast<std::size_t>(y)] ? 0.0 : b.pair_size(x, y) * costs_.edge_insert;
  };
  double c = 0.0;
  for (int i = 0; i < nu; ++i) {
    const int u = us[i], x = map[static_cast<std::size_t>(u)];
    if (x < 0)
      c += costs_.node_delete;
    else if (a.label[static_cast<std::size_t>(u)] != b.label[static_cast<std::size_t>(x)])
      c += costs_.node_substitute;
    for (int w = 0; w < n1; ++w) {
      c += a_pair(u, w);
      if (!in(us, nu, w)) c += a_pair(w, u);
    }
  }
  for (int i = 0; i < nx; ++i) {
    const int x = xs[i];
    if (!hit[static_cast<std::size_t>(x)]) c += costs_.node_insert;
    for (int y = 0; y < n2; ++y) {
      c += b_pair(x, y);
      if (!in(xs, nx, y)) c += b_pair(y, x);
    }
  }
  return c;
}

double GedEngine::upper_bound(const Graph& a, const Graph& b) const {
  const int n1 = a.size(), n2 = b.size();
  thread_local std::vector<int> map;
  thread_local std::vector<char> taken;
  double best = greedy_assignment(a, b, map);
  taken.assign(static_cast<std::size_t>(n2), 0);
  for (int x : map)
    if (x >= 0) taken[static_cast<std::size_t>(x)] = 1;

  // Local search: move one node to a free target (or delete it), or swap
  // the targets of two nodes; first improvement wins. On larger graphs moves
  // are scored on the terms they touch only.
  const bool incremental = n1 * n2 > 36;
  for (int pass = 0; pass < 32 && best > 0.0; ++pass) {
    bool improved = false;
    for (int u = 0; u < n1 && !improved; ++u) {
      const int old = map[static_cast<std::size_t>(u)];
      for (int x = -1; x < n2 && !improved; ++x) {
        if (x == old || (x >= 0 && taken[static_cast<std::size_t>(x)])) continue;
        int xs[2];
        int nx = 0;
        if (old >= 0) xs[nx++] = old;
        if (x >= 0) xs[nx++] = x;
        const double before = incremental ? partial_cost(a, b, map, taken, &u, 1, xs, nx) : best;
        map[static_cast<std::size_t>(u)] = x;
        if (old >= 0) taken[static_cast<std::size_t>(old)] = 0;
        if (x >= 0) taken[static_cast<std::size_t>(x)] = 1;
        const double after = incremental ? partial_cost(a, b, map, taken, &u, 1, xs, nx) : assignment_cost(a, b, map);
        if (after < before - 1e-12) {
          improved = true;
        } else {
          map[static_cast<std::size_t>(u)] = old;
          if (x >= 0) taken[static_cast<std::size_t>(x)] = 0;
          if (old >= 0) taken[static_cast<std::size_t>(old)] = 1;
        }
      }
      for (int v = u + 1; v < n1 && !improved; ++v) {
        if (map[static_cast<std::size_t>(u)] == map[static_cast<std::size_t>(v)]) continue;
        const int us[2] = {u, v};
        const double before = incremental ? partial_cost(a, b, map, taken, us, 2, nullptr, 0) : best;
        std::swap(map[static_cast<std::size_t>(u)], map[static_cast<std::size_t>(v)]);
        const double after = incremental ? partial_cost(a, b, map, taken, us, 2, nullptr, 0) : assignment_cost(a, b, map);
        if (after < before - 1e-12)
          improved = true;
        else
          std::swap(map[static_cast<std::size_t>(u)], map[static_cast<std::size_t>(v)]);
      }
    }
    if (!improved) break;
    best = assignment_cost(a, b, map);
  }
  return best;
}

namespace {

constexpr int kMax = static_cast<int>(kMaxExactNodes);

struct State {
  double g;
  double f;
  std::uint32_t used;
  int e2_inside;  // b-edges with both endpoints already in the image
  std::int8_t depth;
  bool goal;
  std::array<std::int8_t, kMax> map;
};

struct Scratch {
  std::vector<State> states;
  std::vector<int> heap;
};

}  // namespace

double GedEngine::exact(const Graph& a, const Graph& b, double cap) const {
  const int n1 = a.size(), n2 = b.size();
  if (n1 > kMax || n2 > kMax)
    throw Error(ErrorCode::SizeExceedsCutoff, "exact GED limited to " + std::to_string(kMax) + " nodes");
  const EditCosts& c = costs_;
  if (n1 == 0) return n2 * c.node_insert + b.edge_count * c.edge_insert;

  thread_local std::vector<int> seed_map;
  double best = std::min(cap, greedy_assignment(a, b, seed_map));
  if (best <= 0.0) return best;

  // Local label ids, shared by both graphs.
  std::array<int, 2 * kMax> seen{};
  int labels = 0;
  auto local = [&](int global) {
    for (int i = 0; i < labels; ++i)
      if (seen[static_cast<std::size_t>(i)] == global) return i;
    seen[static_cast<std::size_t>(labels)] = global;
    return labels++;
  };
  std::array<int, kMax> la{}, lb{};
  for (int u = 0; u < n1; ++u) la[static_cast<std::size_t>(u)] = local(a.label[static_cast<std::size_t>(u)]);
  for (int x = 0; x < n2; ++x) lb[static_cast<std::size_t>(x)] = local(b.label[static_cast<std::size_t>(x)]);

  std::array<int, kMax> order{};
  std::iota(order.begin(), order.begin() + n1, 0);
  std::stable_sort(order.begin(), order.begin() + n1, [&](int x, int y) {
    return a.degree[static_cast<std::size_t>(x)] > a.degree[static_cast<std::size_t>(y)];
  });

  // rest1[d][l]: label counts among order[d..]; inside1[d]: a-edges between
  // order[0..d-1].
  std::array<std::array<int, 2 * kMax>, kMax + 1> rest1{};
  for (int d = n1 - 1; d >= 0; --d) {
    rest1[static_cast<std::size_t>(d)] = rest1[static_cast<std::size_t>(d + 1)];
    ++rest1[static_cast<std::size_t>(d)][static_cast<std::size_t>(la[static_cast<std::size_t>(order[static_cast<std::size_t>(d)])])];
  }
  std::array<int, kMax + 1> inside1{};
  for (int d = 0; d < n1; ++d) {
    const int u = order[static_cast<std::size_t>(d)];
    int add = a.pair_size(u, u);
    for (int t = 0; t < d; ++t)
      add += a.pair_size(u, order[static_cast<std::size_t>(t)]) + a.pair_size(order[static_cast<std::size_t>(t)], u);
    inside1[static_cast<std::size_t>(d + 1)] = inside1[static_cast<std::size_t>(d)] + add;
  }
  const double sub_or_swap = std::min(c.node_substitute, c.node_delete + c.node_insert);

  thread_local Scratch scratch;
  auto& states = scratch.states;
  auto& heap = scratch.heap;
  states.clear();
  heap.clear();
  auto before = [&](int x, int y) {  // heap order: smaller f first, deeper first
    const State& s = states[static_cast<std::size_t>(x)];
    const State& t = states[static_cast<std::size_t>(y)];
    if (s.f != t.f) return s.f > t.f;
    return s.depth < t.depth;
  };

  State root{};
  root.map.fill(-1);
  states.push_back(root);
  heap.push_back(0);
  constexpr double kEps = 1e-9;

  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), before);
    const int idx = heap.back();
    heap.pop_back();
    const State s = states[static_cast<std::size_t>(idx)];
    if (s.f >= best - kEps) break;
    if (s.goal) return s.g;

    const int d = s.depth;
    const int u = order[static_cast<std::size_t>(d)];
    std::array<int, 2 * kMax> rest2{};
    for (int x = 0; x < n2; ++x)
      if (!(s.used >> x & 1u)) ++rest2[static_cast<std::size_t>(lb[static_cast<std::size_t>(x)])];
    const int free2 = n2 - std::popcount(s.used);

    for (int x = -1; x < n2; ++x) {
      if (x >= 0 && (s.used >> x & 1u)) continue;
      double cost = 0.0;
      int e2 = s.e2_inside;
      if (x < 0) {
        cost += c.node_delete;
        int gone = a.pair_size(u, u);
        for (int t = 0; t < d; ++t) {
          const int w = order[static_cast<std::size_t>(t)];
          gone += a.pair_size(u, w) + a.pair_size(w, u);
        }
        cost += gone * c.edge_delete;
      } else {
        if (la[static_cast<std::size_t>(u)] != lb[static_cast<std::size_t>(x)]) cost += c.node_substitute;
        cost += pair_cost(a, u, u, b, x, x);
        e2 += b.pair_size(x, x);
        for (int t = 0; t < d; ++t) {
          const int w = order[static_cast<std::size_t>(t)];
          const int y = s.map[static_cast<std::size_t>(t)];
          if (y < 0) {
            cost += (a.pair_size(u, w) + a.pair_size(w, u)) * c.edge_delete;
          } else {
            cost += pair_cost(a, u, w, b, x, y) + pair_cost(a, w, u, b, y, x);
            e2 += b.pair_size(x, y) + b.pair_size(y, x);
          }
        }
      }
      State t = s;
      t.g = s.g + cost;
      t.depth = static_cast<std::int8_t>(d + 1);
      t.map[static_cast<std::size_t>(d)] = static_cast<std::int8_t>(x);
      t.e2_inside = e2;
      if (x >= 0) t.used = s.used | (1u << x);
      if (d + 1 == n1) {
        const int left = free2 - (x >= 0 ? 1 : 0);
        t.g += left * c.node_insert + (b.edge_count - e2) * c.edge_insert;
        t.f = t.g;
        t.goal = true;
        if (t.f < best - kEps) best = t.f;  // any complete assignment is an upper bound
      } else {
        const int r1 = n1 - d - 1;
        const int r2 = free2 - (x >= 0 ? 1 : 0);
        int common = 0;
        const auto& rl = rest1[static_cast<std::size_t>(d + 1)];
        for (int l = 0; l < labels; ++l) {
          int have2 = rest2[static_cast<std::size_t>(l)] - (x >= 0 && lb[static_cast<std::size_t>(x)] == l ? 1 : 0);
          common += std::min(rl[static_cast<std::size_t>(l)], have2);
        }
        const int m = std::min(r1, r2);
        const double h = (m - common) * sub_or_swap + (r1 - m) * c.node_delete + (r2 - m) * c.node_insert +
                         edge_bound(a.edge_count - inside1[static_cast<std::size_t>(d + 1)], b.edge_count - e2, c);
        t.f = t.g + h;
      }
      if (t.f >= best - kEps && !(t.goal && t.f <= best + kEps)) continue;
      states.push_back(t);
      heap.push_back(static_cast<int>(states.size()) - 1);
      std::push_heap(heap.begin(), heap.end(), before);
    }
  }
  return best;
}

double ged_exact(const ProjectGraph& g1, const ProjectGraph& g2, const EditCosts& costs, std::size_t exact_cutoff) {
  const std::size_t limit = std::min(exact_cutoff, kMaxExactNodes);
  if (g1.nodes.size() > limit || g2.nodes.size() > limit)
    throw Error(ErrorCode::SizeExceedsCutoff, "graphs with " + std::to_string(std::max(g1.nodes.size(), g2.nodes.size())) +
                                                  " nodes exceed the exact cutoff of " + std::to_string(limit));
  GedEngine engine(costs);
  const auto a = engine.prepare(g1);
  const auto b = engine.prepare(g2);
  return engine.exact(a, b);
}

double ged_upper_bound(const ProjectGraph& g1, const ProjectGraph& g2, const EditCosts& costs) {
  GedEngine engine(costs);
  const auto a = engine.prepare(g1);
  const auto b = engine.prepare(g2);
  return engine.upper_bound(a, b);
}

}  // namespace vpla
