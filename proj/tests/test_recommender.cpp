#include <algorithm>
#include <random>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "vpla/recommender.hpp"

using namespace vpla;

namespace {

StructuralTableRow row(const ProjectGraph& upstream_src, const std::string& attach, const std::string& type,
                       double confidence, CandidateDirection dir = CandidateDirection::In) {
  StructuralTableRow r;
  r.upstream = mining_view(upstream_src);
  r.upstream_code = canonical_code(r.upstream);
  r.candidate.type_label = type;
  r.candidate.edges = {{dir, attach}};
  r.confidence = confidence;
  r.support_upstream = 10;
  r.support_full = static_cast<int>(confidence * 10);
  return r;
}

std::vector<std::string> labels(const std::vector<Recommendation>& recs) {
  std::vector<std::string> out;
  for (const auto& r : recs) out.push_back(r.type_label);
  return out;
}

}  // namespace

TEST_CASE("upstream_graph") {
  SUBCASE("no predecessors") {
    const auto g = fx::chain({"A", "B"});
    const auto u = upstream_graph(g, "c0");
    CHECK(u.nodes.size() == 1);
  }
  SUBCASE("chain a->b->c->d, two hops") {
    const auto g = fx::graph({fx::op("a", "A"), fx::op("b", "B"), fx::op("c", "C"), fx::op("d", "D")},
                             {fx::edge("a", "b"), fx::edge("b", "c"), fx::edge("c", "d")});
    const auto u = upstream_graph(g, "d", 10, 2);
    std::vector<std::string> ids;
    for (const auto& n : u.nodes) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<std::string>{"b", "c", "d"});
    CHECK(u.edges.size() == 2);
  }
  SUBCASE("cycle") {
    const auto g = fx::graph({fx::op("a", "A"), fx::op("b", "B")}, {fx::edge("a", "b"), fx::edge("b", "a")});
    const auto u = upstream_graph(g, "a");
    CHECK(u.nodes.size() == 2);
    CHECK(u.edges.size() == 2);
  }
  SUBCASE("truncation keeps the closest layers, ids ascending") {
    const auto g = fx::graph({fx::op("s", "S"), fx::op("p2", "P"), fx::op("p1", "P"), fx::op("q", "Q")},
                             {fx::edge("p2", "s"), fx::edge("p1", "s"), fx::edge("q", "p1")});
    const auto u = upstream_graph(g, "s", 2);
    REQUIRE(u.nodes.size() == 2);
    CHECK(u.find_node("s"));
    CHECK(u.find_node("p1"));
  }
  SUBCASE("unknown node") { CHECK_THROWS_AS(upstream_graph(fx::chain({"A"}), "zz"), Error); }
}

TEST_CASE("recommend: fixture semantics") {
  const auto a = fx::graph({fx::op("x", "A")}, {});
  const auto query = fx::graph({fx::op("n", "A")}, {});

  SUBCASE("empty table") { CHECK(recommend(query, "n", StructuralTable{}, 5).empty()); }

  SUBCASE("same upstream, ranked by confidence") {
    StructuralTable t;
    t.rows = {row(a, "x", "B", 0.6), row(a, "x", "C", 0.9)};
    const auto recs = recommend(query, "n", t, 5);
    CHECK(labels(recs) == std::vector<std::string>{"C", "B"});
    CHECK(recs[0].min_ged == 0.0);
    CHECK(recs[0].summed_confidence == 0.9);
    CHECK(recs[1].min_ged == 0.0);
  }

  SUBCASE("merged rows: summed confidence and minimum distance") {
    const auto ref = fx::graph({fx::op("p", "P"), fx::op("q", "Q"), fx::op("s", "S")}, {fx::edge("p", "q"), fx::edge("q", "s")});
    const auto up1 = fx::graph({fx::op("p", "P"), fx::op("q", "Q"), fx::op("t", "T")}, {fx::edge("p", "q"), fx::edge("q", "t")});
    const auto up2 = fx::graph({fx::op("q", "Q"), fx::op("s", "S")}, {fx::edge("q", "s")});
    StructuralTable t;
    t.rows = {row(up1, "t", "B", 0.3), row(up2, "s", "B", 0.4)};
    const auto recs = recommend(ref, "s", t, 5);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].type_label == "B");
    CHECK(recs[0].min_ged == 1.0);
    CHECK(recs[0].summed_confidence == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(recs[0].contributing_rows == std::vector<std::size_t>{0, 1});
  }

  SUBCASE("errors") {
    StructuralTable t;
    t.rows = {row(a, "x", "B", 0.6)};
    CHECK_THROWS_AS(recommend(query, "missing", t, 5), Error);
    CHECK_THROWS_AS(recommend(query, "n", t, 0), Error);
  }
}

namespace {

struct Brute {
  std::string label;
  int ged;
  double confidence;
};

// Scores every row with the exhaustive GED oracle and applies the merge
// and ordering rules directly.
std::vector<Brute> brute_recommend(const ProjectGraph& g, const std::string& selected, const StructuralTable& t,
                                   std::size_t max_nodes) {
  const auto ref = oracle::from_project(upstream_graph(g, selected, max_nodes, 3));
  std::map<std::string, Brute> merged;
  for (const auto& r : t.rows) {
    const int d = oracle::ged(ref, oracle::from_project(r.upstream));
    auto [it, fresh] = merged.emplace(r.candidate.template_key(), Brute{r.candidate.template_key(), d, 0.0});
    it->second.ged = std::min(it->second.ged, d);
    it->second.confidence += r.confidence;
  }
  std::vector<Brute> out;
  for (auto& [k, b] : merged) out.push_back(b);
  std::sort(out.begin(), out.end(), [](const Brute& a, const Brute& b) {
    if (a.ged != b.ged) return a.ged < b.ged;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.label < b.label;
  });
  return out;
}

std::vector<ProjectGraph> corpus(std::mt19937_64& rng, std::size_t n) {
  std::vector<ProjectGraph> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(oracle::random_project(rng, 6, {"A", "B", "C"}, "c" + std::to_string(i)));
  return out;
}

}  // namespace

TEST_CASE("recommend agrees with brute-force scoring") {
  std::mt19937_64 rng(61);
  for (int round = 0; round < 6; ++round) {
    const auto projects = corpus(rng, 8);
    MiningOptions mo;
    mo.max_pattern_nodes = 4;
    const auto table = build_structural_table(mine_frequent(projects, 2, mo), projects);
    if (table.rows.empty()) continue;
    const Recommender rec(table);
    for (int q = 0; q < 6; ++q) {
      const auto g = oracle::random_project(rng, 6, {"A", "B", "C"}, "q");
      const auto& sel = g.nodes[rng() % g.nodes.size()].id;
      RecommendOptions options;
      options.k = 1000;
      options.max_nodes = 4;
      const auto got = rec.recommend(g, sel, options);
      const auto want = brute_recommend(g, sel, table, 4);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].label == want[i].label);
        CHECK(got[i].min_ged == want[i].ged);
        CHECK(got[i].summed_confidence == doctest::Approx(want[i].confidence).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("recommend: properties") {
  std::mt19937_64 rng(62);
  const auto projects = corpus(rng, 10);
  MiningOptions mo;
  mo.max_pattern_nodes = 4;
  const auto table = build_structural_table(mine_frequent(projects, 2, mo), projects);
  REQUIRE(!table.rows.empty());
  const Recommender rec(table);
  std::set<std::string> distinct;
  for (const auto& r : table.rows) distinct.insert(r.candidate.template_key());

  for (int q = 0; q < 20; ++q) {
    const auto g = oracle::random_project(rng, 7, {"A", "B", "C"}, "q");
    const auto sel = g.nodes[rng() % g.nodes.size()].id;
    RecommendOptions options;
    options.k = 1 + rng() % 8;
    const auto recs = rec.recommend(g, sel, options);
    CHECK(recs.size() <= options.k);
    CHECK(recs.size() <= distinct.size());

    // Deterministic.
    const auto again = rec.recommend(g, sel, options);
    REQUIRE(again.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(again[i].label == recs[i].label);

    // Exact matches first.
    bool seen_positive = false;
    for (const auto& r : recs) {
      if (r.min_ged > 0) seen_positive = true;
      if (seen_positive) CHECK(r.min_ged > 0);
    }

    // Renaming ids changes nothing.
    ProjectGraph renamed = g;
    std::map<std::string, std::string> ids;
    for (auto& n : renamed.nodes) n.id = ids[n.id] = "zz" + n.id;
    for (auto& e : renamed.edges) {
      e.src.node = ids[e.src.node];
      e.dst.node = ids[e.dst.node];
    }
    const auto moved = rec.recommend(renamed, ids[sel], options);
    REQUIRE(moved.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(moved[i].label == recs[i].label);
      CHECK(moved[i].min_ged == recs[i].min_ged);
    }
  }
}

TEST_CASE("recommend: adding a row never worsens that candidate's rank") {
  std::mt19937_64 rng(63);
  const auto projects = corpus(rng, 20);
  MiningOptions mo;
  mo.max_pattern_nodes = 4;
  const auto table = build_structural_table(mine_frequent(projects, 2, mo), projects);
  REQUIRE(table.rows.size() > 2);
  for (int q = 0; q < 30; ++q) {
    const auto g = oracle::random_project(rng, 6, {"A", "B", "C"}, "q");
    const auto sel = g.nodes[rng() % g.nodes.size()].id;
    auto extra = table.rows[rng() % table.rows.size()];
    extra.confidence = 0.5;
    auto bigger = table;
    bigger.rows.push_back(extra);
    RecommendOptions options;
    options.k = 1000;
    auto rank_of = [&](const StructuralTable& t) {
      const auto recs = Recommender(t).recommend(g, sel, options);
      for (std::size_t i = 0; i < recs.size(); ++i)
        if (recs[i].label == extra.candidate.template_key()) return i;
      return recs.size();
    };
    CHECK(rank_of(bigger) <= rank_of(table));
  }
}
