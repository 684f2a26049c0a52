#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "vpla/corpus.hpp"
#include "vpla/encapsulation.hpp"
#include "vpla/graph_json.hpp"
#include "vpla/http_service.hpp"
#include "vpla/metrics.hpp"
#include "vpla/recommender.hpp"
#include "vpla/session.hpp"

namespace fs = std::filesystem;
using namespace vpla;

namespace {

std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }

std::string table_path_or_env(const std::string& given) {
  if (!given.empty()) return given;
  if (const char* env = std::getenv("VPLA_TABLE")) return env;
  return {};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
}

int cmd_analyze(const std::vector<std::string>& paths, const std::string& out_csv, const std::string& selection_out,
                bool strict, bool expand) {
  const auto files = project_files(paths);
  if (files.empty()) {
    std::cerr << "no projects\n";
    return 1;
  }
  std::vector<MetricsReport> reports;
  std::size_t faulty = 0;
  for (const auto& f : files) {
    try {
      ProjectGraph g = load_project_file(f);
      if (expand) g = expand_edge_params(g);
      reports.push_back(compute_report(g));
    } catch (const Error& e) {
      ++faulty;
      std::cerr << "faulty project " << f << ": " << e.what() << '\n';
    }
  }
  if (reports.empty()) {
    std::cerr << "no projects\n";
    return strict ? 2 : 1;
  }

  std::ostringstream csv;
  write_metrics_csv(csv, reports);
  if (out_csv.empty())
    std::cout << csv.str();
  else
    write_text(out_csv, csv.str());

  Json selection;
  try {
    selection = selection_to_json(select_metrics(reports));
  } catch (const Error& e) {
    selection = {{"error", e.what()}};
  }
  if (!selection_out.empty())
    write_text(selection_out, selection.dump(2) + "\n");
  else
    std::cerr << selection.dump(2) << '\n';
  return strict && faulty > 0 ? 2 : 0;
}

int cmd_mine(const std::vector<std::string>& paths, int minsup, std::size_t max_nodes, const std::string& out,
             bool expand, const std::string& corpus_id, const std::string& mined_at) {
  PreprocessOptions pre;
  pre.expand_edge_params = expand;
  pre.corpus_id = corpus_id;
  auto prepared = preprocess(paths, pre);
  PipelineOptions options;
  options.minsup = minsup;
  options.max_pattern_nodes = max_nodes;
  options.expand_edge_params = expand;
  options.corpus_id = prepared.manifest.corpus_id;
  options.mined_at = mined_at;
  std::size_t patterns = 0;
  const auto table = build_table(prepared.projects, options, &patterns);
  const fs::path table_path(out);
  if (table_path.has_parent_path()) fs::create_directories(table_path.parent_path());
  save_table(table, out);
  const fs::path manifest_path = table_path.parent_path() / "manifest.json";
  write_text(manifest_path.string(), manifest_to_json(prepared.manifest).dump(1) + "\n");
  std::cerr << "projects " << prepared.manifest.retained << "/" << prepared.manifest.total << ", minsup "
            << table.provenance.minsup << ", patterns " << patterns << ", rows " << table.rows.size() << '\n';
  return 0;
}

int cmd_recommend(const std::string& project, const std::string& node, const std::string& table_arg, std::size_t k,
                  bool json) {
  const std::string table_path = table_path_or_env(table_arg);
  if (table_path.empty()) throw Error(ErrorCode::InvalidArgument, "no table: pass --table or set VPLA_TABLE");
  const Recommender rec(load_table(table_path));
  const ProjectGraph g = load_project_file(project);
  RecommendOptions options;
  options.k = k;
  const auto list = rec.recommend(g, node, options);
  if (json) {
    Json out = Json::array();
    for (const auto& r : list) out.push_back(recommendation_to_json(r));
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  std::size_t rank = 1;
  for (const auto& r : list)
    std::cout << rank++ << '\t' << r.label << "\tged=" << format_number(r.min_ged)
              << "\tconfidence=" << format_number(r.summed_confidence) << '\n';
  return 0;
}

int cmd_encapsulate(const std::string& project, int min_occurrences, std::size_t max_nodes, int rounds,
                    const std::string& out) {
  const ProjectGraph original = load_project_file(project);
  ProjectGraph g = original;
  Json applied = Json::array();
  for (int round = 0; round < rounds; ++round) {
    const auto plans = find_clone_plans(g, min_occurrences, max_nodes);
    if (plans.empty()) break;
    auto result = encapsulate(g, plans.front());
    applied.push_back({{"composite", result.def.type_id},
                       {"occurrences", plans.front().occurrences.size()},
                       {"instance_ids", result.instance_ids}});
    g = std::move(result.graph);
  }
  if (!out.empty())
    save_project_file(g, out);
  else
    std::cout << serialize_project(g) << '\n';
  const Json report = {{"applied", applied}, {"metrics_delta", metrics_delta_to_json(metrics_delta(original, g))}};
  (out.empty() ? std::cerr : std::cout) << report.dump(2) << '\n';
  return 0;
}

int cmd_serve(const std::string& table_arg, const std::string& host, int port, const std::string& snapshot_dir) {
  std::shared_ptr<const Recommender> rec;
  const std::string table_path = table_path_or_env(table_arg);
  if (!table_path.empty())
    rec = std::make_shared<const Recommender>(load_table(table_path));
  else
    std::cerr << "no table loaded; recommendations will be empty\n";
  SessionConfig config;
  config.snapshot_dir = snapshot_dir;
  SessionManager sessions(rec, config);
  HttpServer server(sessions);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << host << ":" << port << '\n';
    return 1;
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  std::cerr << "listening on http://" << host << ":" << bound << '\n';
  server.run();
  g_stop = true;
  watcher.join();
  return 0;
}

int cmd_generate(const std::string& out_dir, std::uint64_t seed, std::size_t n, double noise) {
  GeneratorOptions options;
  options.seed = seed;
  options.n_projects = n;
  options.noise_rate = noise;
  options.motifs = default_motifs();
  const auto corpus = generate_corpus(options);
  fs::create_directories(out_dir);
  for (const auto& g : corpus.projects) save_project_file(g, (fs::path(out_dir) / (g.project_id + ".json")).string());
  Json planted = Json::object();
  for (const auto& [name, where] : corpus.planted) planted[name] = where;
  std::cout << Json{{"projects", corpus.projects.size()}, {"planted", planted}}.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metrics, structural recommendations and clone encapsulation for block-based PLC projects"};
  app.require_subcommand(1);

  std::vector<std::string> paths;
  std::string out, table_out = "table.json", selection_out, table, node, project, host = "127.0.0.1", snapshot_dir, corpus_id, mined_at;
  bool strict = false, expand = false, json = false;
  int minsup = 0, min_occurrences = 2, rounds = 1, port = 8080;
  std::size_t max_nodes = 6, k = 5, n_projects = 20;
  std::uint64_t seed = 1;
  double noise = 0.3;

  auto* analyze = app.add_subcommand("analyze", "Metrics CSV and non-redundant metric selection");
  analyze->add_option("paths", paths, "Project files or directories")->required();
  analyze->add_option("-o,--output", out, "CSV output file (default: stdout)");
  analyze->add_option("--selection", selection_out, "Selection report file (default: stderr)");
  analyze->add_flag("--strict", strict, "Exit 2 when any project is faulty");
  analyze->add_flag("--expand-edge-params", expand);

  auto* mine = app.add_subcommand("mine", "Build the structural table from a corpus");
  mine->add_option("paths", paths, "Project files or directories")->required();
  mine->add_option("--minsup", minsup, "Minimum support (default: scaled to corpus size)");
  mine->add_option("--max-pattern-nodes", max_nodes);
  mine->add_option("-o,--output", table_out, "Table file; manifest.json is written next to it")->capture_default_str();
  mine->add_flag("--expand-edge-params", expand);
  mine->add_option("--corpus-id", corpus_id);
  mine->add_option("--mined-at", mined_at, "Timestamp recorded in the table");

  auto* recommend = app.add_subcommand("recommend", "Rank blocks to use next after a node");
  recommend->add_option("project", project)->required();
  recommend->add_option("--node", node)->required();
  recommend->add_option("--table", table, "Structural table (default: $VPLA_TABLE)");
  recommend->add_option("-k", k)->check(CLI::PositiveNumber);
  recommend->add_flag("--json", json);

  auto* encap = app.add_subcommand("encapsulate", "Replace repeated subgraphs by a composite block");
  encap->add_option("project", project)->required();
  encap->add_option("--min-occurrences", min_occurrences)->check(CLI::Range(2, 1 << 20));
  encap->add_option("--max-pattern-nodes", max_nodes);
  encap->add_option("--rounds", rounds)->check(CLI::PositiveNumber);
  encap->add_option("-o,--output", out, "Rewritten project (default: stdout)");

  auto* serve = app.add_subcommand("serve", "HTTP service for the editor");
  serve->add_option("--table", table, "Structural table (default: $VPLA_TABLE)");
  serve->add_option("--host", host);
  serve->add_option("--port", port, "0 picks a free port");
  serve->add_option("--snapshot-dir", snapshot_dir);

  auto* generate = app.add_subcommand("generate", "Write a synthetic corpus with planted motifs");
  generate->add_option("-o,--output", out)->required();
  generate->add_option("--seed", seed);
  generate->add_option("-n,--projects", n_projects);
  generate->add_option("--noise-rate", noise);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(paths, out, selection_out, strict, expand);
    if (*mine) return cmd_mine(paths, minsup, max_nodes, table_out, expand, corpus_id, mined_at);
    if (*recommend) return cmd_recommend(project, node, table, k, json);
    if (*encap) return cmd_encapsulate(project, min_occurrences, max_nodes, rounds, out);
    if (*serve) return cmd_serve(table, host, port, snapshot_dir);
    if (*generate) return cmd_generate(out, seed, n_projects, noise);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    if (e.code() == ErrorCode::NoReadablePaths) std::cerr << "no projects\n";
    return 1;
  }
  return 0;
}
