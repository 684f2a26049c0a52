#include "vpla/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "vpla/graph_json.hpp"

namespace vpla {

namespace fs = std::filesystem;

std::vector<std::string> project_files(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (const auto& entry : fs::directory_iterator(p, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path().string());
    } else if (fs::is_regular_file(p, ec)) {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  return files;
}

PreprocessResult preprocess(const std::vector<std::string>& paths, const PreprocessOptions& options) {
  const auto files = project_files(paths);
  if (files.empty()) throw Error(ErrorCode::NoReadablePaths, "no project files under the given paths");

  PreprocessResult out;
  CorpusManifest& m = out.manifest;
  m.corpus_id = options.corpus_id;
  if (m.corpus_id.empty()) m.corpus_id = fs::path(paths.front()).filename().string();
  if (m.corpus_id.empty()) m.corpus_id = "corpus";
  m.source_paths = files;
  m.total = files.size();
  m.expand_edge_params = options.expand_edge_params;
  for (const auto& f : files) {
    ProjectGraph g;
    try {
      g = load_project_file(f);
    } catch (const Error& e) {
      ++m.dropped_faulty;
      m.faults[f] = e.what();
      continue;
    }
    if (g.nodes.empty()) {
      ++m.dropped_empty;
      continue;
    }
    if (options.expand_edge_params) g = expand_edge_params(g);
    out.projects.push_back(std::move(g));
    out.retained_paths.push_back(f);
  }
  m.retained = out.projects.size();
  return out;
}

Json manifest_to_json(const CorpusManifest& m) {
  Json faults = Json::object();
  for (const auto& [k, v] : m.faults) faults[k] = v;
  return {{"corpus_id", m.corpus_id},
          {"source_paths", m.source_paths},
          {"counts",
           {{"total", m.total},
            {"dropped_faulty", m.dropped_faulty},
            {"dropped_empty", m.dropped_empty},
            {"retained", m.retained}}},
          {"options", {{"expand_edge_params", m.expand_edge_params}}},
          {"faults", faults}};
}

namespace {

// Bounded draw straight from the engine so corpora are identical across
// standard libraries.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

Node block(const std::string& id, const std::string& type) {
  Node n;
  n.id = id;
  n.kind = NodeKind::Operator;
  n.type_label = type;
  n.in_ports = {"in"};
  n.out_ports = {"out"};
  return n;
}

ProjectGraph chain_motif(const std::vector<std::string>& types) {
  ProjectGraph g;
  for (std::size_t i = 0; i < types.size(); ++i) {
    g.nodes.push_back(block("m" + std::to_string(i), types[i]));
    if (i) g.edges.push_back({{"m" + std::to_string(i - 1), "out"}, {"m" + std::to_string(i), "in"}, std::nullopt, Json::object()});
  }
  return g;
}

}  // namespace

std::vector<Motif> default_motifs() {
  Motif fan;
  fan.name = "fan";
  fan.graph = chain_motif({"TIMER", "COMPARE"});
  fan.graph.nodes.push_back(block("m2", "COUNTER"));
  fan.graph.edges.push_back({{"m0", "out"}, {"m2", "in"}, std::nullopt, Json::object()});
  fan.frequency = 0.5;
  return {{"chain", chain_motif({"AND", "OR", "NOT"}), 0.7}, fan};
}

GeneratedCorpus generate_corpus(const GeneratorOptions& options) {
  if (options.n_projects == 0) throw Error(ErrorCode::InvalidArgument, "n_projects must be >= 1");
  if (options.block_alphabet.empty()) throw Error(ErrorCode::InvalidArgument, "empty block alphabet");
  if (!(options.noise_rate >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_rate must be >= 0");
  std::mt19937_64 rng(options.seed);
  GeneratedCorpus out;
  out.projects.resize(options.n_projects);

  for (const auto& motif : options.motifs) {
    validate(motif.graph);
    const auto count = std::min(options.n_projects, static_cast<std::size_t>(std::llround(
                                                         std::clamp(motif.frequency, 0.0, 1.0) * options.n_projects)));
    std::vector<std::size_t> order(options.n_projects);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[draw(rng, i)]);
    order.resize(count);
    std::sort(order.begin(), order.end());
    out.planted[motif.name] = order;
  }

  for (std::size_t p = 0; p < options.n_projects; ++p) {
    ProjectGraph& g = out.projects[p];
    char name[32];
    std::snprintf(name, sizeof name, "project_%04zu", p);
    g.project_id = name;
    std::size_t next = 0;
    auto fresh = [&] { return "b" + std::to_string(next++); };
    std::size_t planted_nodes = 0;
    for (const auto& motif : options.motifs) {
      const auto& where = out.planted[motif.name];
      if (!std::binary_search(where.begin(), where.end(), p)) continue;
      std::map<std::string, std::string> ids;
      for (const auto& n : motif.graph.nodes) {
        Node copy = n;
        copy.id = ids[n.id] = fresh();
        copy.position.reset();
        copy.size.reset();
        g.nodes.push_back(std::move(copy));
      }
      for (auto e : motif.graph.edges) {
        e.src.node = ids[e.src.node];
        e.dst.node = ids[e.dst.node];
        g.edges.push_back(std::move(e));
      }
      planted_nodes += motif.graph.nodes.size();
    }
    const auto noise = static_cast<std::size_t>(std::llround(options.noise_rate * static_cast<double>(std::max<std::size_t>(planted_nodes, 3))));
    for (std::size_t i = 0; i < noise; ++i)
      g.nodes.push_back(block(fresh(), options.block_alphabet[draw(rng, options.block_alphabet.size())]));
    if (g.nodes.empty()) g.nodes.push_back(block(fresh(), options.block_alphabet[draw(rng, options.block_alphabet.size())]));

    // Noise edges between random blocks with generic ports; duplicates and
    // self-loops are skipped.
    std::set<std::tuple<std::string, std::string>> present;
    for (const auto& e : g.edges) present.emplace(e.src.node, e.dst.node);
    for (std::size_t i = 0; i < noise && g.nodes.size() > 1; ++i) {
      const auto& a = g.nodes[draw(rng, g.nodes.size())];
      const auto& b = g.nodes[draw(rng, g.nodes.size())];
      if (a.id == b.id || a.out_ports.empty() || b.in_ports.empty()) continue;
      if (!present.emplace(a.id, b.id).second) continue;
      g.edges.push_back({{a.id, a.out_ports.front()}, {b.id, b.in_ports.front()}, std::nullopt, Json::object()});
    }

    if (options.with_layout) {
      const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(g.nodes.size()))));
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double jitter = static_cast<double>(draw(rng, 21)) - 10.0;
        g.nodes[i].position = Point{120.0 * static_cast<double>(i % cols) + jitter, 80.0 * static_cast<double>(i / cols)};
        g.nodes[i].size = Extent{60.0, 40.0};
      }
    }
    validate(g);
  }
  return out;
}

namespace {

std::string default_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(1) << '\n';
}

}  // namespace

StructuralTable build_table(const std::vector<ProjectGraph>& corpus, const PipelineOptions& options,
                            std::size_t* pattern_count) {
  const int minsup = options.minsup > 0 ? options.minsup : default_minsup(corpus.size());
  MiningOptions mining;
  mining.max_pattern_nodes = options.max_pattern_nodes;
  mining.keep_embeddings = false;
  const auto patterns = mine_frequent(corpus, minsup, mining);
  if (pattern_count) *pattern_count = patterns.size();
  StructuralTable table = build_structural_table(patterns, corpus);
  table.provenance.corpus_id = options.corpus_id;
  table.provenance.minsup = minsup;
  table.provenance.max_pattern_nodes = options.max_pattern_nodes;
  table.provenance.corpus_size = corpus.size();
  table.provenance.expand_edge_params = options.expand_edge_params;
  table.provenance.mined_at = options.mined_at.empty() ? default_timestamp() : options.mined_at;
  return table;
}

PipelineResult run_pipeline(const std::vector<std::string>& paths, const PipelineOptions& options) {
  PreprocessOptions pre;
  pre.expand_edge_params = options.expand_edge_params;
  pre.corpus_id = options.corpus_id;
  auto prepared = preprocess(paths, pre);

  PipelineOptions effective = options;
  effective.corpus_id = prepared.manifest.corpus_id;
  PipelineResult out;
  out.table = build_table(prepared.projects, effective, &out.pattern_count);
  out.manifest = std::move(prepared.manifest);
  if (!options.output_dir.empty()) {
    fs::create_directories(options.output_dir);
    write_json(fs::path(options.output_dir) / "table.json", table_to_json(out.table));
    write_json(fs::path(options.output_dir) / "manifest.json", manifest_to_json(out.manifest));
  }
  return out;
}

}  // namespace vpla
