#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"
#include "vpla/corpus.hpp"
#include "vpla/graph_json.hpp"

using namespace vpla;
namespace fs = std::filesystem;

TEST_CASE("preprocess: faulty and empty files are dropped") {
  test::TempDir dir;
  save_project_file(fx::chain({"A", "B"}, "good1"), dir.file("a.json"));
  save_project_file(fx::chain({"A", "C"}, "good2"), dir.file("b.json"));
  save_project_file(fx::graph({}, {}, "empty"), dir.file("c.json"));
  std::ofstream(dir.file("d.json")) << "{ not json";
  std::ofstream(dir.file("e.json")) << R"({"project_id":"x","nodes":[],"edges":[{"src":["q","out"],"dst":["r","in"]}]})";
  std::ofstream(dir.file("notes.txt")) << "ignored";

  const auto r = preprocess({dir.path()});
  CHECK(r.manifest.total == 5);
  CHECK(r.manifest.dropped_faulty == 2);
  CHECK(r.manifest.dropped_empty == 1);
  CHECK(r.manifest.retained == 2);
  CHECK(r.projects.size() == 2);
  CHECK(r.projects[0].project_id == "good1");
  CHECK(r.manifest.faults.count(dir.file("d.json")) == 1);
  CHECK(r.manifest.faults.at(dir.file("d.json")).rfind("MalformedDocument", 0) == 0);
  CHECK(r.manifest.faults.at(dir.file("e.json")).rfind("DanglingEdge", 0) == 0);
  CHECK(r.manifest.corpus_id == fs::path(dir.path()).filename().string());

  const auto j = manifest_to_json(r.manifest);
  CHECK(j["counts"]["retained"] == 2);
  CHECK(j["source_paths"].size() == 5);

  PreprocessOptions named;
  named.corpus_id = "named";
  CHECK(preprocess({dir.path()}, named).manifest.corpus_id == "named");
}

TEST_CASE("preprocess: nothing readable") {
  test::TempDir dir;
  try {
    preprocess({dir.path()});
    FAIL("expected NoReadablePaths");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoReadablePaths);
  }
  CHECK_THROWS_AS(preprocess({dir.file("missing.json")}), Error);
}

TEST_CASE("preprocess: edge parameter expansion") {
  test::TempDir dir;
  auto g = fx::chain({"A", "B"}, "p");
  g.edges[0].label = "x";
  save_project_file(g, dir.file("p.json"));
  PreprocessOptions o;
  o.expand_edge_params = true;
  const auto r = preprocess({dir.path()}, o);
  CHECK(r.projects[0].nodes.size() == 3);
  CHECK(r.manifest.expand_edge_params);
  CHECK(preprocess({dir.path()}).projects[0].nodes.size() == 2);
}

TEST_CASE("generate_corpus") {
  GeneratorOptions o;
  o.seed = 5;
  o.n_projects = 20;
  o.motifs = default_motifs();
  const auto a = generate_corpus(o);
  const auto b = generate_corpus(o);
  REQUIRE(a.projects.size() == 20);
  for (std::size_t i = 0; i < a.projects.size(); ++i) CHECK(a.projects[i] == b.projects[i]);
  CHECK(a.planted == b.planted);

  o.seed = 6;
  const auto c = generate_corpus(o);
  bool differs = false;
  for (std::size_t i = 0; i < a.projects.size(); ++i) differs = differs || !(a.projects[i] == c.projects[i]);
  CHECK(differs);

  for (const auto& m : o.motifs) {
    const auto& idx = a.planted.at(m.name);
    CHECK(idx.size() == static_cast<std::size_t>(std::lround(m.frequency * 20)));
    for (std::size_t i : idx) CHECK(!find_embeddings(m.graph, a.projects[i]).empty());
  }
  for (const auto& p : a.projects) {
    validate(p);
    for (const auto& n : p.nodes) CHECK(n.position.has_value());
  }

  // Planted motifs are recovered by mining.
  PipelineOptions po;
  po.minsup = 8;
  po.max_pattern_nodes = 3;
  const auto table = build_table(a.projects, po);
  const auto head = canonical_code(mining_view(fx::chain({"AND", "OR"})));
  bool found = false;
  for (const auto& r : table.rows)
    found = found || (r.upstream_code == head && r.candidate.type_label == "NOT");
  CHECK(found);
  CHECK(transaction_support(o.motifs[0].graph, a.projects) >= po.minsup);
}

TEST_CASE("run_pipeline writes table and manifest") {
  test::TempDir in, out;
  GeneratorOptions o;
  o.n_projects = 8;
  o.motifs = default_motifs();
  for (const auto& p : generate_corpus(o).projects) save_project_file(p, in.file(p.project_id + ".json"));
  std::ofstream(in.file("broken.json")) << "[]";

  PipelineOptions po;
  po.output_dir = out.path();
  po.mined_at = "2020-01-02T03:04:05Z";
  po.corpus_id = "demo";
  const auto r = run_pipeline({in.path()}, po);
  CHECK(r.manifest.retained == 8);
  CHECK(r.manifest.dropped_faulty == 1);
  CHECK(r.table.provenance.minsup == default_minsup(8));
  CHECK(r.table.provenance.corpus_size == 8);
  CHECK(r.table.provenance.corpus_id == "demo");
  REQUIRE(fs::exists(out.file("table.json")));
  REQUIRE(fs::exists(out.file("manifest.json")));
  const auto loaded = load_table(out.file("table.json"));
  CHECK(loaded.rows.size() == r.table.rows.size());
  CHECK(loaded.provenance.mined_at == "2020-01-02T03:04:05Z");

  // Deterministic timestamp when none is given.
  PipelineOptions plain;
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(run_pipeline({in.path()}, plain).table.provenance.mined_at == "1970-01-01T00:00:00Z");
  ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
  CHECK(run_pipeline({in.path()}, plain).table.provenance.mined_at == "1970-01-02T00:00:00Z");
  ::unsetenv("SOURCE_DATE_EPOCH");

  // Same input, same bytes.
  test::TempDir again;
  po.output_dir = again.path();
  run_pipeline({in.path()}, po);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(slurp(out.file("table.json")) == slurp(again.file("table.json")));
}
