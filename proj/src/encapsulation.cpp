#include "vpla/encapsulation.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "vpla/graph_json.hpp"

namespace vpla {

bool clone_precedes(const FrequentSubgraph& a, const FrequentSubgraph& b) {
  if (a.support != b.support) return a.support > b.support;
  if (a.size() != b.size()) return a.size() > b.size();
  return a.canonical_code < b.canonical_code;
}

const FrequentSubgraph& select_clone(const std::vector<FrequentSubgraph>& clones) {
  if (clones.empty()) throw Error(ErrorCode::EmptyCloneList, "no clones to choose from");
  return *std::min_element(clones.begin(), clones.end(), clone_precedes);
}

namespace {

using EdgeShape = std::tuple<std::size_t, std::string, std::size_t, std::string, std::optional<std::string>>;

struct Built {
  CompositeBlockDef def;
  std::vector<Embedding> occurrences;
  std::vector<std::vector<std::size_t>> members;  // host node indices in pattern order
  std::vector<std::map<std::string, std::map<std::string, Json>>> bindings;
  // (is_input, pattern position, inner port) -> boundary port name
  std::map<std::tuple<bool, std::size_t, std::string>, std::string> ports;
};

std::string inner_id(std::size_t k) { return "n" + std::to_string(k); }

bool same_shape(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.type_label != b.type_label || a.composite != b.composite) return false;
  if (a.in_ports != b.in_ports || a.out_ports != b.out_ports || a.bindings != b.bindings) return false;
  if (a.params.size() != b.params.size()) return false;
  for (const auto& [k, v] : a.params)
    if (!b.params.count(k)) return false;
  return true;
}

std::string fresh_type_id(const ProjectGraph& g) {
  std::set<std::string> taken;
  for (const auto& c : g.composites) taken.insert(c.type_id);
  for (int k = 1;; ++k) {
    std::string id = "composite_" + std::to_string(k);
    if (!taken.count(id)) return id;
  }
}

// Derives the composite definition from g. Occurrences that do not match the
// first one are dropped (`strict` = false) or reported as stale.
Built build(const ProjectGraph& g, const ProjectGraph& pattern, const std::vector<Embedding>& occurrences,
            const std::string& type_id, bool strict) {
  if (occurrences.empty()) throw Error(ErrorCode::InvalidArgument, "plan has no occurrences");
  GraphIndex index(g);
  const std::size_t k = pattern.nodes.size();

  std::vector<std::vector<std::size_t>> members;
  std::set<std::size_t> claimed;
  for (const auto& occ : occurrences) {
    std::vector<std::size_t> m;
    for (const auto& pn : pattern.nodes) {
      auto it = occ.node_map.find(pn.id);
      if (it == occ.node_map.end()) throw Error(ErrorCode::StaleEmbedding, "occurrence misses pattern node " + pn.id);
      auto idx = index.index_of(it->second);
      if (!idx) throw Error(ErrorCode::StaleEmbedding, "node " + it->second + " no longer exists");
      m.push_back(*idx);
    }
    for (auto v : m)
      if (!claimed.insert(v).second) throw Error(ErrorCode::OverlappingOccurrences, "node " + g.nodes[v].id);
    members.push_back(std::move(m));
  }

  std::vector<int> owner(g.nodes.size(), -1), position(g.nodes.size(), -1);
  auto shape_of = [&](std::size_t occ) {
    std::vector<EdgeShape> shape;
    std::vector<int> pos(g.nodes.size(), -1);
    for (std::size_t i = 0; i < k; ++i) pos[members[occ][i]] = static_cast<int>(i);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const int a = pos[index.source(e)], b = pos[index.target(e)];
      if (a >= 0 && b >= 0)
        shape.emplace_back(a, g.edges[e].src.port, b, g.edges[e].dst.port, g.edges[e].label);
    }
    std::sort(shape.begin(), shape.end());
    return shape;
  };

  Built out;
  const auto reference = shape_of(0);
  std::vector<std::size_t> kept;
  for (std::size_t o = 0; o < members.size(); ++o) {
    bool ok = o == 0 || shape_of(o) == reference;
    for (std::size_t i = 0; ok && i < k; ++i)
      ok = same_shape(g.nodes[members[0][i]], g.nodes[members[o][i]]);
    if (!ok) {
      if (strict) throw Error(ErrorCode::StaleEmbedding, "occurrence " + std::to_string(o) + " no longer matches");
      continue;
    }
    kept.push_back(o);
  }
  for (std::size_t slot = 0; slot < kept.size(); ++slot) {
    const auto o = kept[slot];
    out.occurrences.push_back(occurrences[o]);
    out.members.push_back(members[o]);
    for (std::size_t i = 0; i < k; ++i) {
      owner[members[o][i]] = static_cast<int>(slot);
      position[members[o][i]] = static_cast<int>(i);
    }
  }

  CompositeBlockDef& def = out.def;
  def.type_id = type_id;
  def.inner.project_id = type_id;
  const auto& first = out.members[0];
  for (std::size_t i = 0; i < k; ++i) {
    Node n = g.nodes[first[i]];
    n.id = inner_id(i);
    def.inner.nodes.push_back(std::move(n));
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto s = index.source(e), t = index.target(e);
    if (owner[s] == 0 && owner[t] == 0) {
      Edge copy = g.edges[e];
      copy.src.node = inner_id(static_cast<std::size_t>(position[s]));
      copy.dst.node = inner_id(static_cast<std::size_t>(position[t]));
      def.inner.edges.push_back(std::move(copy));
    }
  }

  // One boundary port per distinct inner endpoint touched by any crossing
  // edge, numbered in edge order.
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto s = index.source(e), t = index.target(e);
    if (owner[s] >= 0 && owner[s] != owner[t]) {
      auto key = std::make_tuple(false, static_cast<std::size_t>(position[s]), g.edges[e].src.port);
      if (!out.ports.count(key)) {
        std::string name = "p_out_" + std::to_string(def.out_ports.size() + 1);
        def.out_ports.push_back(name);
        def.boundary[name] = {inner_id(std::get<1>(key)), std::get<2>(key)};
        out.ports[key] = name;
      }
    }
    if (owner[t] >= 0 && owner[s] != owner[t]) {
      auto key = std::make_tuple(true, static_cast<std::size_t>(position[t]), g.edges[e].dst.port);
      if (!out.ports.count(key)) {
        std::string name = "p_in_" + std::to_string(def.in_ports.size() + 1);
        def.in_ports.push_back(name);
        def.boundary[name] = {inner_id(std::get<1>(key)), std::get<2>(key)};
        out.ports[key] = name;
      }
    }
  }

  for (const auto& m : out.members) {
    std::map<std::string, std::map<std::string, Json>> b;
    for (std::size_t i = 0; i < k; ++i)
      for (const auto& [name, value] : g.nodes[m[i]].params)
        if (def.inner.nodes[i].params.at(name) != value) b[inner_id(i)][name] = value;
    out.bindings.push_back(std::move(b));
  }
  return out;
}

EncapsulationPlan make_plan(const ProjectGraph& g, FrequentSubgraph pattern, std::vector<Embedding> occurrences) {
  Built b = build(g, pattern.pattern, occurrences, fresh_type_id(g), false);
  EncapsulationPlan plan;
  plan.pattern = std::move(pattern);
  plan.occurrences = std::move(b.occurrences);
  plan.new_composite = std::move(b.def);
  plan.bindings = std::move(b.bindings);
  plan.predicted_node_delta = -static_cast<int>(plan.occurrences.size() * (plan.pattern.pattern.nodes.size() - 1));
  return plan;
}

}  // namespace

EncapsulationPlan plan_encapsulation(const ProjectGraph& g, const FrequentSubgraph& clone) {
  std::vector<Embedding> occurrences;
  if (!clone.embeddings_by_project.empty()) {
    occurrences = clone.embeddings_by_project.begin()->second;
  } else {
    // Greedy vertex-disjoint selection over all embeddings in the mining view.
    std::set<std::string> used;
    for (auto& e : find_embeddings(clone.pattern, mining_view(g))) {
      bool free = std::none_of(e.node_map.begin(), e.node_map.end(),
                               [&](const auto& kv) { return used.count(kv.second) > 0; });
      if (!free) continue;
      for (const auto& [p, h] : e.node_map) used.insert(h);
      occurrences.push_back(std::move(e));
    }
  }
  return make_plan(g, clone, std::move(occurrences));
}

EncapsulationPlan plan_from_selection(const ProjectGraph& g, const std::vector<std::string>& node_ids) {
  std::set<std::string> distinct(node_ids.begin(), node_ids.end());
  if (distinct.size() != node_ids.size()) throw Error(ErrorCode::InvalidArgument, "selection repeats a node");
  if (node_ids.size() < 2) throw Error(ErrorCode::InvalidArgument, "select at least two nodes");
  const ProjectGraph sub = induced_subgraph(g, node_ids);
  if (!is_weakly_connected(sub)) throw Error(ErrorCode::PatternDisconnected, "selection is not connected");

  FrequentSubgraph clone;
  clone.pattern = mining_view(sub);
  std::map<std::string, std::string> rename;
  for (std::size_t i = 0; i < sub.nodes.size(); ++i) rename[sub.nodes[i].id] = std::to_string(i);
  Embedding occ;
  for (auto& n : clone.pattern.nodes) {
    occ.node_map[rename[n.id]] = n.id;
    n.id = rename[n.id];
  }
  for (auto& e : clone.pattern.edges) {
    e.src.node = rename[e.src.node];
    e.dst.node = rename[e.dst.node];
  }
  clone.pattern.project_id.clear();
  clone.canonical_code = canonical_code(clone.pattern);
  clone.support = 1;
  return make_plan(g, std::move(clone), {occ});
}

std::vector<EncapsulationPlan> find_clone_plans(const ProjectGraph& g, int min_occurrences,
                                                std::size_t max_pattern_nodes) {
  MiningOptions options;
  options.max_pattern_nodes = max_pattern_nodes;
  auto clones = mine_single_graph(g, min_occurrences, options);
  std::sort(clones.begin(), clones.end(), clone_precedes);
  std::vector<EncapsulationPlan> plans;
  for (const auto& c : clones) {
    auto plan = plan_encapsulation(g, c);
    if (static_cast<int>(plan.occurrences.size()) >= min_occurrences) plans.push_back(std::move(plan));
  }
  return plans;
}

EncapsulationResult encapsulate(const ProjectGraph& g, const EncapsulationPlan& plan) {
  Built b = build(g, plan.pattern.pattern, plan.occurrences, plan.new_composite.type_id, true);
  if (b.def != plan.new_composite || b.bindings != plan.bindings)
    throw Error(ErrorCode::StaleEmbedding, "project changed since the plan was made");
  if (g.find_composite(b.def.type_id))
    throw Error(ErrorCode::StaleEmbedding, "composite type " + b.def.type_id + " already exists");

  GraphIndex index(g);
  std::vector<int> owner(g.nodes.size(), -1), position(g.nodes.size(), -1);
  for (std::size_t o = 0; o < b.members.size(); ++o)
    for (std::size_t i = 0; i < b.members[o].size(); ++i) {
      owner[b.members[o][i]] = static_cast<int>(o);
      position[b.members[o][i]] = static_cast<int>(i);
    }

  std::set<std::string> ids;
  for (const auto& n : g.nodes) ids.insert(n.id);
  EncapsulationResult out;
  for (std::size_t o = 0; o < b.members.size(); ++o) {
    std::string id = b.def.type_id + "_" + std::to_string(o + 1);
    while (ids.count(id)) id += "_";
    ids.insert(id);
    out.instance_ids.push_back(id);
  }

  ProjectGraph& r = out.graph;
  r.project_id = g.project_id;
  r.extra = g.extra;
  r.composites = g.composites;
  std::vector<char> emitted(b.members.size(), 0);
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const int o = owner[v];
    if (o < 0) {
      r.nodes.push_back(g.nodes[v]);
      continue;
    }
    if (emitted[static_cast<std::size_t>(o)]) continue;
    emitted[static_cast<std::size_t>(o)] = 1;
    Node inst;
    inst.id = out.instance_ids[static_cast<std::size_t>(o)];
    inst.kind = NodeKind::Operator;
    inst.type_label = b.def.type_id;
    inst.composite = true;
    inst.in_ports = b.def.in_ports;
    inst.out_ports = b.def.out_ports;
    inst.bindings = b.bindings[static_cast<std::size_t>(o)];
    const auto& m = b.members[static_cast<std::size_t>(o)];
    const bool placed = std::all_of(m.begin(), m.end(), [&](auto i) { return g.nodes[i].position.has_value(); });
    if (placed) {
      Point c{0, 0};
      for (auto i : m) {
        c.x += g.nodes[i].position->x / static_cast<double>(m.size());
        c.y += g.nodes[i].position->y / static_cast<double>(m.size());
      }
      inst.position = c;
    }
    const bool sized = std::all_of(m.begin(), m.end(), [&](auto i) { return g.nodes[i].size.has_value(); });
    if (sized) {
      Extent e{0, 0};
      for (auto i : m) {
        e.w = std::max(e.w, g.nodes[i].size->w);
        e.h = std::max(e.h, g.nodes[i].size->h);
      }
      inst.size = e;
    }
    r.nodes.push_back(std::move(inst));
  }

  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto s = index.source(e), t = index.target(e);
    if (owner[s] >= 0 && owner[s] == owner[t]) continue;
    Edge copy = g.edges[e];
    if (owner[s] >= 0) {
      copy.src = {out.instance_ids[static_cast<std::size_t>(owner[s])],
                  b.ports.at({false, static_cast<std::size_t>(position[s]), g.edges[e].src.port})};
    }
    if (owner[t] >= 0) {
      copy.dst = {out.instance_ids[static_cast<std::size_t>(owner[t])],
                  b.ports.at({true, static_cast<std::size_t>(position[t]), g.edges[e].dst.port})};
    }
    r.edges.push_back(std::move(copy));
  }
  r.composites.push_back(b.def);
  out.def = std::move(b.def);
  validate(r);
  return out;
}

MetricsDelta metrics_delta(const ProjectGraph& before, const ProjectGraph& after, const LayoutWeights& w) {
  MetricsDelta d;
  d.before = compute_report(before, w);
  d.after = compute_report(after, w);
  std::map<std::string, double> a;
  for (const auto& [k, v] : d.after.values()) a[k] = v;
  for (const auto& [k, v] : d.before.values())
    if (auto it = a.find(k); it != a.end()) d.delta[k] = it->second - v;
  return d;
}

Json metrics_delta_to_json(const MetricsDelta& d) {
  Json delta = Json::object();
  for (const auto& [k, v] : d.delta) delta[k] = v;
  return {{"before", report_to_json(d.before)}, {"after", report_to_json(d.after)}, {"delta", delta}};
}

Json plan_summary_to_json(const EncapsulationPlan& plan, const std::string& plan_id) {
  Json occ = Json::array();
  for (const auto& o : plan.occurrences) occ.push_back(o.host_nodes(plan.pattern.pattern));
  return {{"plan_id", plan_id},
          {"canonical_code", plan.pattern.canonical_code},
          {"support", plan.pattern.support},
          {"pattern_nodes", plan.pattern.pattern.nodes.size()},
          {"pattern_edges", plan.pattern.pattern.edges.size()},
          {"occurrences", occ},
          {"predicted_node_delta", plan.predicted_node_delta},
          {"composite", composite_to_json(plan.new_composite)}};
}

}  // namespace vpla
