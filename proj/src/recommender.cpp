#include "vpla/recommender.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace vpla {

ProjectGraph upstream_graph(const ProjectGraph& g, const std::string& selected, std::size_t max_nodes,
                            std::size_t max_hops) {
  GraphIndex index(g);
  const auto start = index.index_of(selected);
  if (!start) throw Error(ErrorCode::UnknownNode, selected);
  if (max_nodes == 0) throw Error(ErrorCode::InvalidArgument, "max_nodes must be >= 1");

  std::vector<std::size_t> picked = {*start};
  std::vector<char> seen(g.nodes.size(), 0);
  seen[*start] = 1;
  std::vector<std::size_t> layer = {*start};
  for (std::size_t hop = 0; hop < max_hops && !layer.empty() && picked.size() < max_nodes; ++hop) {
    std::vector<std::size_t> next;
    for (auto v : layer)
      for (auto e : index.in_edges(v)) {
        const auto u = index.source(e);
        if (!seen[u]) {
          seen[u] = 1;
          next.push_back(u);
        }
      }
    std::sort(next.begin(), next.end(), [&](auto a, auto b) { return g.nodes[a].id < g.nodes[b].id; });
    for (auto u : next) {
      if (picked.size() == max_nodes) break;
      picked.push_back(u);
    }
    layer = std::move(next);
  }
  std::vector<std::string> ids;
  for (auto i : picked) ids.push_back(g.nodes[i].id);
  return induced_subgraph(g, ids);
}

Recommender::Recommender(StructuralTable table, EditCosts costs) : table_(std::move(table)), engine_(costs) {
  std::map<std::string, std::size_t> by_code;
  std::map<std::string, std::size_t> by_template;
  for (std::size_t r = 0; r < table_.rows.size(); ++r) {
    const auto& row = table_.rows[r];
    const std::string key = row.candidate.template_key();
    auto [t, fresh_t] = by_template.emplace(key, template_keys_.size());
    if (fresh_t) {
      template_keys_.push_back(key);
      template_rows_.emplace_back();
    }
    template_rows_[t->second].push_back(r);

    auto [u, fresh_u] = by_code.emplace(row.upstream_code, upstreams_.size());
    if (fresh_u) upstreams_.push_back({engine_.prepare(mining_view(row.upstream)), {}});
    auto& list = upstreams_[u->second].templates;
    if (std::find(list.begin(), list.end(), t->second) == list.end()) list.push_back(t->second);
  }
}

std::vector<Recommendation> Recommender::recommend(const ProjectGraph& g, const std::string& selected,
                                                   const RecommendOptions& options) const {
  if (options.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (!g.find_node(selected)) throw Error(ErrorCode::UnknownNode, selected);
  if (table_.rows.empty()) return {};

  const ProjectGraph source = table_.provenance.expand_edge_params ? expand_edge_params(g) : g;
  const ProjectGraph reference = mining_view(upstream_graph(source, selected, options.max_nodes, options.max_hops));
  GedEngine::Graph ref;
  {
    std::lock_guard lock(engine_mutex_);
    ref = engine_.prepare(reference);
  }

  // Upstreams in order of a cheap lower bound; an upstream is only scored
  // exactly while it can still lower some candidate's best distance.
  std::vector<std::pair<double, std::size_t>> queue;
  queue.reserve(upstreams_.size());
  for (std::size_t u = 0; u < upstreams_.size(); ++u) queue.emplace_back(engine_.lower_bound(ref, upstreams_[u].graph), u);
  std::sort(queue.begin(), queue.end());

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(template_keys_.size(), kInf);
  for (const auto& [bound, u] : queue) {
    const auto& up = upstreams_[u];
    double cap = 0.0;
    for (auto t : up.templates) cap = std::max(cap, best[t]);
    if (bound >= cap) continue;
    const auto size = static_cast<std::size_t>(std::max(ref.size(), up.graph.size()));
    const double d = size <= std::min(options.exact_cutoff, kMaxExactNodes) ? engine_.exact(ref, up.graph, cap)
                                                                              : engine_.upper_bound(ref, up.graph);
    for (auto t : up.templates) best[t] = std::min(best[t], d);
  }

  std::vector<Recommendation> out;
  out.reserve(template_keys_.size());
  for (std::size_t t = 0; t < template_keys_.size(); ++t) {
    Recommendation r;
    const auto& first = table_.rows[template_rows_[t].front()].candidate;
    r.kind = first.kind;
    r.type_label = first.type_label;
    r.composite = first.composite;
    for (const auto& e : first.edges) r.edge_dirs.push_back(e.dir);
    std::sort(r.edge_dirs.begin(), r.edge_dirs.end());
    r.label = template_keys_[t];
    r.min_ged = best[t];
    for (auto row : template_rows_[t]) r.summed_confidence += table_.rows[row].confidence;
    r.contributing_rows = template_rows_[t];
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.min_ged != b.min_ged) return a.min_ged < b.min_ged;
    if (a.summed_confidence != b.summed_confidence) return a.summed_confidence > b.summed_confidence;
    return a.label < b.label;
  });
  if (out.size() > options.k) out.resize(options.k);
  return out;
}

std::vector<Recommendation> recommend(const ProjectGraph& g, const std::string& selected,
                                      const StructuralTable& table, std::size_t k) {
  RecommendOptions options;
  options.k = k;
  return Recommender(table).recommend(g, selected, options);
}

Json recommendation_to_json(const Recommendation& r) {
  Json dirs = Json::array();
  for (auto d : r.edge_dirs) dirs.push_back(to_string(d));
  Json cand = {{"kind", to_string(r.kind)}, {"type", r.type_label}, {"edges", dirs}};
  if (r.composite) cand["composite"] = true;
  return {{"candidate", cand},
          {"label", r.label},
          {"min_ged", r.min_ged},
          {"summed_confidence", r.summed_confidence},
          {"contributing_rows", r.contributing_rows}};
}

}  // namespace vpla
