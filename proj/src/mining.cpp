#include "vpla/mining.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "dfs_code.hpp"

namespace vpla {

using detail::DfsCode;
using detail::DfsEdge;
using detail::LabelAlphabet;
using detail::LabeledGraph;

std::string mining_label(const Node& n) {
  if (n.composite) return "composite:" + n.type_label;
  return std::string(to_string(n.kind)) + ":" + n.type_label;
}

ProjectGraph mining_view(const ProjectGraph& g) {
  ProjectGraph v;
  v.project_id = g.project_id;
  const std::string any(kAnyPort);
  for (const auto& n : g.nodes) {
    Node m;
    m.id = n.id;
    m.kind = n.kind;
    m.type_label = n.type_label;
    m.composite = n.composite;
    m.in_ports = {any};
    m.out_ports = {any};
    v.nodes.push_back(std::move(m));
  }
  GraphIndex index(g);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto s = index.source(e), t = index.target(e);
    if (s == t || !seen.insert({s, t}).second) continue;
    v.edges.push_back({{g.nodes[s].id, any}, {g.nodes[t].id, any}, std::nullopt, Json::object()});
  }
  return v;
}

namespace {

LabelAlphabet alphabet_of(const std::vector<const ProjectGraph*>& graphs) {
  std::vector<std::string> labels;
  for (const auto* g : graphs)
    for (const auto& n : g->nodes) labels.push_back(mining_label(n));
  return LabelAlphabet(std::move(labels));
}

std::string code_string_of(const LabeledGraph& lg, const LabelAlphabet& alphabet) {
  if (lg.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty pattern");
  if (!lg.connected()) throw Error(ErrorCode::PatternDisconnected, "pattern is not connected");
  if (lg.size() == 1) return detail::single_vertex_code(alphabet.name(lg.label[0]));
  return detail::code_to_string(detail::minimum_code(lg).code, alphabet);
}

}  // namespace

std::string canonical_code(const ProjectGraph& pattern) {
  const ProjectGraph view = mining_view(pattern);
  const LabelAlphabet alphabet = alphabet_of({&view});
  return code_string_of(detail::to_labeled(view, alphabet), alphabet);
}

ProjectGraph pattern_from_code(const std::string& code) {
  Json j;
  try {
    j = Json::parse(code);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("pattern code: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::MalformedDocument, "pattern code must be a non-empty array");
  if (j.size() == 1 && j[0].is_string()) return detail::single_vertex_pattern(j[0].get<std::string>());
  std::vector<std::string> labels;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 5) throw Error(ErrorCode::MalformedDocument, "bad code edge");
    labels.push_back(e[2].get<std::string>());
    labels.push_back(e[4].get<std::string>());
  }
  LabelAlphabet alphabet(labels);
  DfsCode dfs;
  for (const auto& e : j) {
    const std::string dir = e[3].get<std::string>();
    const int el = dir == ">" ? detail::kArcForward : dir == "<" ? detail::kArcBackward : detail::kArcBoth;
    dfs.push_back({e[0].get<int>(), e[1].get<int>(), alphabet.id(e[2].get<std::string>()), el,
                   alphabet.id(e[4].get<std::string>())});
  }
  return detail::pattern_graph(dfs, alphabet);
}

int default_minsup(std::size_t corpus_size) {
  return std::max(2, static_cast<int>(std::ceil(0.05 * static_cast<double>(corpus_size))));
}

namespace {

struct PDfs {
  int gid;
  int from;
  int to;
  int eid;
  const PDfs* prev;
};
using Projected = std::vector<PDfs>;

enum class Mode { Transaction, SingleGraph };

struct Found {
  DfsCode code;
  int support;
  // (gid, vmap) per kept embedding
  std::vector<std::pair<int, std::vector<int>>> embeddings;
};

// Pattern growth by rightmost extension over minimum DFS codes.
class Miner {
 public:
  Miner(const std::vector<LabeledGraph>& graphs, Mode mode, int threshold, std::size_t max_nodes,
        bool keep_embeddings, const std::vector<std::vector<std::string>>* host_ids)
      : graphs_(graphs),
        mode_(mode),
        threshold_(threshold),
        max_nodes_(static_cast<int>(max_nodes)),
        keep_(keep_embeddings),
        host_ids_(host_ids) {
    std::size_t vmax = 0, emax = 0;
    for (const auto& g : graphs_) {
      vmax = std::max(vmax, g.label.size());
      emax = std::max(emax, static_cast<std::size_t>(g.edge_count));
    }
    vused_.assign(vmax, 0);
    eused_.assign(emax, 0);
  }

  std::vector<Found> run() {
    if (max_nodes_ < 2) return {};
    std::map<std::tuple<int, int, int>, Projected> root;
    for (int gid = 0; gid < static_cast<int>(graphs_.size()); ++gid) {
      const auto& g = graphs_[static_cast<std::size_t>(gid)];
      for (int v = 0; v < g.size(); ++v)
        for (const auto& a : g.adj[static_cast<std::size_t>(v)])
          if (g.label[static_cast<std::size_t>(v)] <= g.label[static_cast<std::size_t>(a.to)])
            root[{g.label[static_cast<std::size_t>(v)], a.elabel, g.label[static_cast<std::size_t>(a.to)]}].push_back(
                {gid, v, a.to, a.eid, nullptr});
    }
    for (const auto& [key, proj] : root) {
      code_.push_back({0, 1, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
      project(proj);
      code_.pop_back();
    }
    return std::move(found_);
  }

 private:
  // Host vertex per dfs index for one projection; also marks used
  // vertices/edges in the scratch buffers (caller clears them).
  std::vector<int> history(const PDfs* p, std::vector<int>* touched_v, std::vector<int>* touched_e) {
    chain_.clear();
    for (; p; p = p->prev) chain_.push_back(p);
    std::reverse(chain_.begin(), chain_.end());
    std::vector<int> vmap(static_cast<std::size_t>(detail::vertex_count(code_)), -1);
    for (std::size_t k = 0; k < chain_.size(); ++k) {
      vmap[static_cast<std::size_t>(code_[k].from)] = chain_[k]->from;
      vmap[static_cast<std::size_t>(code_[k].to)] = chain_[k]->to;
      if (touched_e) {
        eused_[static_cast<std::size_t>(chain_[k]->eid)] = 1;
        touched_e->push_back(chain_[k]->eid);
      }
    }
    if (touched_v)
      for (int h : vmap) {
        vused_[static_cast<std::size_t>(h)] = 1;
        touched_v->push_back(h);
      }
    return vmap;
  }

  void clear(const std::vector<int>& tv, const std::vector<int>& te) {
    for (int v : tv) vused_[static_cast<std::size_t>(v)] = 0;
    for (int e : te) eused_[static_cast<std::size_t>(e)] = 0;
  }

  // Embeddings sorted lexicographically by host id sequence.
  std::vector<std::pair<int, std::vector<int>>> embeddings(const Projected& proj) {
    std::vector<std::pair<int, std::vector<int>>> out;
    out.reserve(proj.size());
    for (const auto& p : proj) out.emplace_back(p.gid, history(&p, nullptr, nullptr));
    auto less = [this](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      const auto& ids = (*host_ids_)[static_cast<std::size_t>(a.first)];
      for (std::size_t i = 0; i < a.second.size(); ++i) {
        const auto& x = ids[static_cast<std::size_t>(a.second[i])];
        const auto& y = ids[static_cast<std::size_t>(b.second[i])];
        if (x != y) return x < y;
      }
      return false;
    };
    std::sort(out.begin(), out.end(), less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void project(const Projected& proj) {
    int support = 0;
    std::vector<std::pair<int, std::vector<int>>> kept;
    if (mode_ == Mode::Transaction) {
      int last = -1;
      std::set<int> gids;
      for (const auto& p : proj)
        if (p.gid != last) {
          gids.insert(p.gid);
          last = p.gid;
        }
      support = static_cast<int>(gids.size());
      if (support < threshold_) return;
      if (!detail::is_minimal(code_)) return;
      if (keep_) kept = embeddings(proj);
    } else {
      auto all = embeddings(proj);
      // Anti-monotone bound: disjoint embeddings cannot outnumber the
      // distinct images of any single pattern vertex.
      const std::size_t k = all.empty() ? 1 : all[0].second.size();
      std::size_t bound = all.size();
      std::set<int> covered;
      for (std::size_t i = 0; i < k; ++i) {
        std::set<int> images;
        for (const auto& e : all) images.insert(e.second[i]);
        bound = std::min(bound, images.size());
        covered.insert(images.begin(), images.end());
      }
      bound = std::min(bound, covered.size() / k);
      if (static_cast<int>(bound) < threshold_) return;
      if (!detail::is_minimal(code_)) return;
      std::vector<char> used(graphs_[0].label.size(), 0);
      for (auto& e : all) {
        bool free = std::all_of(e.second.begin(), e.second.end(), [&](int v) { return !used[static_cast<std::size_t>(v)]; });
        if (!free) continue;
        for (int v : e.second) used[static_cast<std::size_t>(v)] = 1;
        ++support;
        if (keep_) kept.push_back(e);
      }
    }
    if (support >= threshold_) found_.push_back({code_, support, std::move(kept)});

    const auto rmpath = detail::rightmost_path(code_);
    const int maxtoc = code_[static_cast<std::size_t>(rmpath[0])].to;
    const int minlabel = code_[0].from_label;
    const bool can_grow = detail::vertex_count(code_) < max_nodes_;

    std::map<std::pair<int, int>, Projected> backward;                       // (to, elabel)
    std::map<std::tuple<int, int, int>, Projected, std::greater<>> forward;  // (from, elabel, tolabel)

    std::vector<int> tv, te;
    for (const auto& p : proj) {
      tv.clear();
      te.clear();
      const auto vmap = history(&p, &tv, &te);
      const auto& g = graphs_[static_cast<std::size_t>(p.gid)];
      const int right = vmap[static_cast<std::size_t>(maxtoc)];
      for (int i = static_cast<int>(rmpath.size()) - 1; i >= 1; --i) {
        const int t = code_[static_cast<std::size_t>(rmpath[static_cast<std::size_t>(i)])].from;
        const auto* a = g.arc(right, vmap[static_cast<std::size_t>(t)]);
        if (a && !eused_[static_cast<std::size_t>(a->eid)])
          backward[{t, a->elabel}].push_back({p.gid, right, a->to, a->eid, &p});
      }
      if (can_grow) {
        auto extend = [&](int from_dfs) {
          const int from = vmap[static_cast<std::size_t>(from_dfs)];
          for (const auto& a : g.adj[static_cast<std::size_t>(from)]) {
            const int tl = g.label[static_cast<std::size_t>(a.to)];
            if (vused_[static_cast<std::size_t>(a.to)] || tl < minlabel) continue;
            forward[{from_dfs, a.elabel, tl}].push_back({p.gid, from, a.to, a.eid, &p});
          }
        };
        extend(maxtoc);
        for (int idx : rmpath) extend(code_[static_cast<std::size_t>(idx)].from);
      }
      clear(tv, te);
    }

    auto label_of = [this](int dfs) {
      for (const auto& e : code_) {
        if (e.from == dfs) return e.from_label;
        if (e.to == dfs) return e.to_label;
      }
      return -1;
    };
    for (const auto& [key, next] : backward) {
      code_.push_back({maxtoc, key.first, label_of(maxtoc), key.second, label_of(key.first)});
      project(next);
      code_.pop_back();
    }
    // Forward children: deepest source first, then by edge and node label.
    std::vector<std::pair<std::tuple<int, int, int>, const Projected*>> order;
    for (const auto& [key, next] : forward) order.emplace_back(key, &next);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a.first) != std::get<0>(b.first)) return std::get<0>(a.first) > std::get<0>(b.first);
      return std::make_pair(std::get<1>(a.first), std::get<2>(a.first)) <
             std::make_pair(std::get<1>(b.first), std::get<2>(b.first));
    });
    for (const auto& [key, next] : order) {
      code_.push_back({std::get<0>(key), maxtoc + 1, label_of(std::get<0>(key)), std::get<1>(key), std::get<2>(key)});
      project(*next);
      code_.pop_back();
    }
  }

  const std::vector<LabeledGraph>& graphs_;
  Mode mode_;
  int threshold_;
  int max_nodes_;
  bool keep_;
  const std::vector<std::vector<std::string>>* host_ids_;
  DfsCode code_;
  std::vector<Found> found_;
  std::vector<const PDfs*> chain_;
  std::vector<char> vused_;
  std::vector<char> eused_;
};

struct Prepared {
  std::vector<ProjectGraph> views;
  LabelAlphabet alphabet;
  std::vector<LabeledGraph> graphs;
  std::vector<std::vector<std::string>> ids;
  std::vector<std::map<std::pair<int, int>, std::size_t>> first_edge;
  std::vector<std::string> keys;
};

Prepared prepare(const std::vector<const ProjectGraph*>& corpus) {
  Prepared p;
  std::vector<const ProjectGraph*> view_ptrs;
  p.views.reserve(corpus.size());
  for (const auto* g : corpus) p.views.push_back(mining_view(*g));
  for (const auto& v : p.views) view_ptrs.push_back(&v);
  p.alphabet = alphabet_of(view_ptrs);
  std::map<std::string, int> id_count;
  for (const auto* g : corpus) ++id_count[g->project_id];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const ProjectGraph& g = *corpus[i];
    p.graphs.push_back(detail::to_labeled(p.views[i], p.alphabet));
    std::vector<std::string> ids;
    for (const auto& n : g.nodes) ids.push_back(n.id);
    p.ids.push_back(std::move(ids));
    GraphIndex index(g);
    std::map<std::pair<int, int>, std::size_t> first;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      first.emplace(std::make_pair(static_cast<int>(index.source(e)), static_cast<int>(index.target(e))), e);
    p.first_edge.push_back(std::move(first));
    const bool unique = !g.project_id.empty() && id_count[g.project_id] == 1;
    p.keys.push_back(unique ? g.project_id : g.project_id + "#" + std::to_string(i));
  }
  return p;
}

std::vector<FrequentSubgraph> finish(std::vector<Found> found, const Prepared& prep) {
  std::vector<FrequentSubgraph> out;
  out.reserve(found.size());
  for (auto& f : found) {
    FrequentSubgraph s;
    s.pattern = detail::pattern_graph(f.code, prep.alphabet);
    s.canonical_code = detail::code_to_string(f.code, prep.alphabet);
    s.support = f.support;
    for (const auto& [gid, vmap] : f.embeddings) {
      const auto g = static_cast<std::size_t>(gid);
      Embedding e;
      for (std::size_t k = 0; k < vmap.size(); ++k)
        e.node_map[std::to_string(k)] = prep.ids[g][static_cast<std::size_t>(vmap[k])];
      for (const auto& pe : s.pattern.edges) {
        const int a = vmap[static_cast<std::size_t>(std::stoi(pe.src.node))];
        const int b = vmap[static_cast<std::size_t>(std::stoi(pe.dst.node))];
        e.edge_map.push_back(prep.first_edge[g].at({a, b}));
      }
      s.embeddings_by_project[prep.keys[g]].push_back(std::move(e));
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.canonical_code < b.canonical_code; });
  return out;
}

}  // namespace

std::vector<FrequentSubgraph> mine_frequent(const std::vector<ProjectGraph>& corpus, int minsup,
                                            const MiningOptions& options) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus is empty");
  if (minsup < 2) throw Error(ErrorCode::InvalidMinsup, "minsup must be >= 2, got " + std::to_string(minsup));
  std::vector<const ProjectGraph*> ptrs;
  for (const auto& g : corpus) ptrs.push_back(&g);
  Prepared prep = prepare(ptrs);
  Miner miner(prep.graphs, Mode::Transaction, minsup, options.max_pattern_nodes, options.keep_embeddings, &prep.ids);
  return finish(miner.run(), prep);
}

std::vector<FrequentSubgraph> mine_single_graph(const ProjectGraph& g, int min_occurrences,
                                                const MiningOptions& options) {
  if (min_occurrences < 2)
    throw Error(ErrorCode::InvalidMinsup, "min_occurrences must be >= 2, got " + std::to_string(min_occurrences));
  Prepared prep = prepare({&g});
  Miner miner(prep.graphs, Mode::SingleGraph, min_occurrences, options.max_pattern_nodes, options.keep_embeddings,
              &prep.ids);
  return finish(miner.run(), prep);
}

// ---------------------------------------------------------------------------

namespace {

// Backtracking subgraph-isomorphism test in mining-view semantics (arc
// labels must match exactly).
bool contains(const LabeledGraph& host, const LabeledGraph& pat) {
  const int n = pat.size();
  if (n > host.size()) return false;
  // BFS order over the (connected) pattern.
  std::vector<int> order = {0};
  std::vector<char> in_order(static_cast<std::size_t>(n), 0);
  in_order[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& a : pat.adj[static_cast<std::size_t>(order[i])])
      if (!in_order[static_cast<std::size_t>(a.to)]) {
        in_order[static_cast<std::size_t>(a.to)] = 1;
        order.push_back(a.to);
      }
  if (static_cast<int>(order.size()) != n) return false;
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(host.size()), 0);
  std::function<bool(std::size_t)> step = [&](std::size_t depth) {
    if (depth == order.size()) return true;
    const int pv = order[depth];
    for (int hv = 0; hv < host.size(); ++hv) {
      if (used[static_cast<std::size_t>(hv)] || host.label[static_cast<std::size_t>(hv)] != pat.label[static_cast<std::size_t>(pv)])
        continue;
      if (host.adj[static_cast<std::size_t>(hv)].size() < pat.adj[static_cast<std::size_t>(pv)].size()) continue;
      bool ok = true;
      for (const auto& a : pat.adj[static_cast<std::size_t>(pv)]) {
        const int mapped = map[static_cast<std::size_t>(a.to)];
        if (mapped < 0) continue;
        const auto* h = host.arc(hv, mapped);
        if (!h || h->elabel != a.elabel) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      map[static_cast<std::size_t>(pv)] = hv;
      used[static_cast<std::size_t>(hv)] = 1;
      if (step(depth + 1)) return true;
      map[static_cast<std::size_t>(pv)] = -1;
      used[static_cast<std::size_t>(hv)] = 0;
    }
    return false;
  };
  return step(0);
}

LabeledGraph subgraph(const LabeledGraph& g, const std::vector<int>& keep) {
  LabeledGraph s;
  std::vector<int> pos(static_cast<std::size_t>(g.size()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) pos[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
  s.label.resize(keep.size());
  s.adj.resize(keep.size());
  std::map<int, int> eids;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    s.label[i] = g.label[static_cast<std::size_t>(keep[i])];
    for (const auto& a : g.adj[static_cast<std::size_t>(keep[i])]) {
      const int j = pos[static_cast<std::size_t>(a.to)];
      if (j < 0) continue;
      auto [it, fresh] = eids.emplace(a.eid, s.edge_count);
      if (fresh) ++s.edge_count;
      s.adj[i].push_back({j, a.elabel, it->second});
    }
  }
  return s;
}

CandidateDirection direction_from_arc(int elabel) {
  // elabel is seen from the candidate vertex.
  if (elabel == detail::kArcForward) return CandidateDirection::Out;
  if (elabel == detail::kArcBackward) return CandidateDirection::In;
  return CandidateDirection::Both;
}

}  // namespace

std::string_view to_string(CandidateDirection d) {
  switch (d) {
    case CandidateDirection::In: return "in";
    case CandidateDirection::Out: return "out";
    case CandidateDirection::Both: return "both";
  }
  return "in";
}

CandidateDirection candidate_direction_from_string(std::string_view s) {
  if (s == "in") return CandidateDirection::In;
  if (s == "out") return CandidateDirection::Out;
  if (s == "both") return CandidateDirection::Both;
  throw Error(ErrorCode::MalformedDocument, "unknown candidate direction '" + std::string(s) + "'");
}

namespace {

std::string candidate_label(const Candidate& c) {
  if (c.composite) return "composite:" + c.type_label;
  return std::string(to_string(c.kind)) + ":" + c.type_label;
}

}  // namespace

std::string Candidate::key() const {
  std::string k = candidate_label(*this);
  for (const auto& e : edges) k += "|" + std::string(to_string(e.dir)) + "@" + e.upstream_node;
  return k;
}

std::string Candidate::template_key() const {
  std::vector<std::string> dirs;
  for (const auto& e : edges) dirs.emplace_back(to_string(e.dir));
  std::sort(dirs.begin(), dirs.end());
  std::string k = candidate_label(*this);
  for (const auto& d : dirs) k += "|" + d;
  return k;
}

int transaction_support(const ProjectGraph& pattern, const std::vector<ProjectGraph>& corpus) {
  const ProjectGraph pv = mining_view(pattern);
  std::vector<const ProjectGraph*> ptrs = {&pv};
  std::vector<ProjectGraph> views;
  views.reserve(corpus.size());
  for (const auto& g : corpus) views.push_back(mining_view(g));
  for (const auto& v : views) ptrs.push_back(&v);
  const LabelAlphabet alphabet = alphabet_of(ptrs);
  const LabeledGraph p = detail::to_labeled(pv, alphabet);
  if (p.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty pattern");
  if (!p.connected()) throw Error(ErrorCode::PatternDisconnected, "pattern is not connected");
  int support = 0;
  for (const auto& v : views)
    if (contains(detail::to_labeled(v, alphabet), p)) ++support;
  return support;
}

StructuralTable build_structural_table(const std::vector<FrequentSubgraph>& patterns,
                                       const std::vector<ProjectGraph>& corpus) {
  StructuralTable table;
  table.provenance.corpus_size = corpus.size();

  std::vector<ProjectGraph> views;
  views.reserve(corpus.size());
  for (const auto& g : corpus) views.push_back(mining_view(g));
  std::vector<const ProjectGraph*> ptrs;
  for (const auto& v : views) ptrs.push_back(&v);
  for (const auto& p : patterns) ptrs.push_back(&p.pattern);
  const LabelAlphabet alphabet = alphabet_of(ptrs);
  std::vector<LabeledGraph> hosts;
  for (const auto& v : views) hosts.push_back(detail::to_labeled(v, alphabet));

  std::map<std::string, int> support_by_code;
  for (const auto& p : patterns) support_by_code[p.canonical_code] = p.support;
  std::map<int, int> label_support;
  for (const auto& h : hosts) {
    std::set<int> present(h.label.begin(), h.label.end());
    for (int l : present) ++label_support[l];
  }
  auto upstream_support = [&](const std::string& code, const LabeledGraph& up) {
    if (auto it = support_by_code.find(code); it != support_by_code.end()) return it->second;
    if (up.size() == 1) return label_support[up.label[0]];
    int s = 0;
    for (const auto& h : hosts)
      if (contains(h, up)) ++s;
    support_by_code[code] = s;
    return s;
  };

  std::map<std::pair<std::string, std::string>, StructuralTableRow> rows;
  for (const auto& p : patterns) {
    const LabeledGraph g = detail::to_labeled(mining_view(p.pattern), alphabet);
    for (int v = 0; v < g.size(); ++v) {
      const auto& arcs = g.adj[static_cast<std::size_t>(v)];
      const bool downstream = std::any_of(arcs.begin(), arcs.end(), [](const detail::Arc& a) {
        return a.elabel == detail::kArcBackward || a.elabel == detail::kArcBoth;
      });
      if (!downstream) continue;
      std::vector<int> rest;
      for (int u = 0; u < g.size(); ++u)
        if (u != v) rest.push_back(u);
      const LabeledGraph up = subgraph(g, rest);
      if (!up.connected()) continue;

      std::vector<int> local(static_cast<std::size_t>(g.size()), -1);
      for (std::size_t i = 0; i < rest.size(); ++i) local[static_cast<std::size_t>(rest[i])] = static_cast<int>(i);

      std::string code;
      ProjectGraph upstream;
      std::vector<std::vector<int>> orderings;
      if (up.size() == 1) {
        code = detail::single_vertex_code(alphabet.name(up.label[0]));
        upstream = detail::single_vertex_pattern(alphabet.name(up.label[0]));
        orderings = {{0}};
      } else {
        auto m = detail::minimum_code(up);
        code = detail::code_to_string(m.code, alphabet);
        upstream = detail::pattern_graph(m.code, alphabet);
        orderings = std::move(m.orderings);
      }

      // Attachment points named by canonical index; among automorphic
      // orderings take the lexicographically smallest edge list.
      std::optional<std::vector<CandidateEdge>> best;
      for (const auto& ord : orderings) {
        std::vector<int> canon(ord.size());
        for (std::size_t i = 0; i < ord.size(); ++i) canon[static_cast<std::size_t>(ord[i])] = static_cast<int>(i);
        std::vector<CandidateEdge> edges;
        for (const auto& a : arcs)
          edges.push_back({direction_from_arc(a.elabel),
                           std::to_string(canon[static_cast<std::size_t>(local[static_cast<std::size_t>(a.to)])])});
        std::sort(edges.begin(), edges.end());
        if (!best || edges < *best) best = std::move(edges);
      }

      const Node label_node = detail::node_from_label("", alphabet.name(g.label[static_cast<std::size_t>(v)]));
      StructuralTableRow row;
      row.upstream = std::move(upstream);
      row.upstream_code = code;
      row.candidate.kind = label_node.kind;
      row.candidate.type_label = label_node.type_label;
      row.candidate.composite = label_node.composite;
      row.candidate.edges = std::move(*best);
      row.support_full = p.support;
      row.support_upstream = upstream_support(code, up);
      if (row.support_upstream <= 0) continue;
      row.confidence = static_cast<double>(row.support_full) / row.support_upstream;
      // The same (upstream, candidate) pair always describes the same full
      // pattern, so duplicates carry identical counts.
      rows.emplace(std::make_pair(code, row.candidate.key()), std::move(row));
    }
  }
  for (auto& [key, row] : rows) table.rows.push_back(std::move(row));
  return table;
}

}  // namespace vpla
