#include <algorithm>
#include <random>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "vpla/encapsulation.hpp"
#include "vpla/graph_json.hpp"

using namespace vpla;

namespace {

FrequentSubgraph clone(int support, std::size_t nodes, const std::string& code) {
  FrequentSubgraph f;
  f.support = support;
  f.canonical_code = code;
  for (std::size_t i = 0; i < nodes; ++i) {
    f.pattern.nodes.push_back(fx::op(std::to_string(i), "A"));
    if (i) f.pattern.edges.push_back(fx::edge(std::to_string(i - 1), std::to_string(i)));
  }
  return f;
}

ProjectGraph copies(const std::vector<std::string>& types, int n, const std::string& host_extra = "") {
  ProjectGraph g;
  g.project_id = "copies";
  for (int c = 0; c < n; ++c) {
    auto part = fx::chain(types, "x", "k" + std::to_string(c) + "_");
    for (auto& node : part.nodes) node.position = Point{node.position->x, 120.0 * c};
    fx::append(g, part);
  }
  if (!host_extra.empty()) {
    g.nodes.push_back(fx::op("src", host_extra, Point{-100, 0}));
    g.edges.push_back(fx::edge("src", "k0_0"));
    g.nodes.push_back(fx::op("dst", host_extra, Point{400, 120}));
    g.edges.push_back(fx::edge("k1_" + std::to_string(types.size() - 1), "dst"));
  }
  return g;
}

}  // namespace

TEST_CASE("select_clone priority matrix") {
  struct Case {
    std::vector<FrequentSubgraph> clones;
    std::string expected;
  };
  const std::vector<Case> cases = {
      {{clone(3, 2, "p1"), clone(2, 5, "p2")}, "p1"},
      {{clone(2, 2, "p1"), clone(2, 4, "p2")}, "p2"},
      {{clone(2, 3, "p1")}, "p1"},
      {{clone(2, 3, "b"), clone(2, 3, "a")}, "a"},
      {{clone(2, 6, "big"), clone(4, 2, "small"), clone(4, 3, "mid")}, "mid"},
      {{clone(5, 2, "x"), clone(5, 2, "w"), clone(1, 9, "huge")}, "w"},
  };
  for (const auto& c : cases) CHECK(select_clone(c.clones).canonical_code == c.expected);
  CHECK_THROWS_AS(select_clone({}), Error);

  // Strict weak order: sorting any permutation gives the same sequence.
  std::mt19937_64 rng(71);
  std::vector<FrequentSubgraph> pool;
  for (int i = 0; i < 30; ++i) pool.push_back(clone(2 + static_cast<int>(rng() % 3), 2 + rng() % 3, "c" + std::to_string(i)));
  auto sorted = pool;
  std::sort(sorted.begin(), sorted.end(), clone_precedes);
  for (int round = 0; round < 10; ++round) {
    std::shuffle(pool.begin(), pool.end(), rng);
    auto again = pool;
    std::sort(again.begin(), again.end(), clone_precedes);
    for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i].canonical_code == sorted[i].canonical_code);
    for (const auto& a : pool) CHECK_FALSE(clone_precedes(a, a));
  }
}

TEST_CASE("encapsulate: two copies of a three-node chain") {
  const auto g = copies({"A", "B", "C"}, 2);
  const auto plans = find_clone_plans(g);
  REQUIRE(!plans.empty());
  const auto& plan = plans.front();
  CHECK(plan.pattern.pattern.nodes.size() == 3);
  CHECK(plan.occurrences.size() == 2);
  CHECK(plan.predicted_node_delta == -4);
  const auto result = encapsulate(g, plan);
  validate(result.graph);
  CHECK(result.graph.nodes.size() == 2);
  CHECK(result.instance_ids.size() == 2);
  CHECK(result.graph.composites.size() == 1);
  CHECK(result.def.type_id == result.graph.composites[0].type_id);
  CHECK(flatten(result.graph).nodes.size() == 6);
  CHECK(are_isomorphic(flatten(result.graph), g));

  // The composite travels inside the interchange document.
  const auto reparsed = parse_project(serialize_project(result.graph));
  CHECK(reparsed == result.graph);
  CHECK(are_isomorphic(flatten(reparsed), g));
}

TEST_CASE("encapsulate: boundary edges are rewired") {
  const auto g = copies({"A", "B", "C"}, 2, "IO");
  const auto plans = find_clone_plans(g);
  REQUIRE(!plans.empty());
  const auto result = encapsulate(g, plans.front());
  validate(result.graph);
  CHECK(result.graph.nodes.size() == g.nodes.size() + static_cast<std::size_t>(plans.front().predicted_node_delta));
  CHECK(are_isomorphic(flatten(result.graph), g));
  for (const auto& p : result.def.in_ports) CHECK(p.rfind("p_in_", 0) == 0);
  for (const auto& p : result.def.out_ports) CHECK(p.rfind("p_out_", 0) == 0);
}

TEST_CASE("encapsulate: single selection") {
  const auto g = fx::chain({"A", "B", "C", "D"});
  const auto plan = plan_from_selection(g, {"c1", "c2"});
  CHECK(plan.occurrences.size() == 1);
  const auto result = encapsulate(g, plan);
  CHECK(result.graph.nodes.size() == 3);
  CHECK(are_isomorphic(flatten(result.graph), g));
  CHECK_THROWS_AS(plan_from_selection(g, {"c0"}), Error);
  CHECK_THROWS_AS(plan_from_selection(g, {"c0", "c2"}), Error);
  CHECK_THROWS_AS(plan_from_selection(g, {"c0", "nope"}), Error);
}

TEST_CASE("encapsulate: parameters become instance bindings") {
  auto g = copies({"A", "B"}, 2);
  g.nodes[0].params["gain"] = 2;
  g.nodes[2].params["gain"] = 5;
  const auto plans = find_clone_plans(g);
  REQUIRE(!plans.empty());
  const auto result = encapsulate(g, plans.front());
  CHECK(are_isomorphic(flatten(result.graph), g));
}

TEST_CASE("encapsulate: rejected plans") {
  const auto g = copies({"A", "B", "C"}, 2);
  const auto plan = find_clone_plans(g).front();
  SUBCASE("overlap") {
    auto bad = plan;
    bad.occurrences[1] = bad.occurrences[0];
    CHECK_THROWS_AS(encapsulate(g, bad), Error);
    try {
      encapsulate(g, bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OverlappingOccurrences);
    }
  }
  SUBCASE("stale") {
    auto changed = g;
    changed.edges.pop_back();
    try {
      encapsulate(changed, plan);
      FAIL("expected StaleEmbedding");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StaleEmbedding);
    }
  }
}

TEST_CASE("encapsulate: round trip on generated graphs") {
  std::mt19937_64 rng(72);
  int applied = 0;
  for (int round = 0; round < 40; ++round) {
    const auto motif = oracle::random_project(rng, 4, {"A", "B", "C"}, "m");
    if (motif.nodes.size() < 2 || !is_weakly_connected(motif)) continue;
    ProjectGraph g;
    g.project_id = "gen";
    const int n = 2 + static_cast<int>(rng() % 2);
    for (int c = 0; c < n; ++c) {
      auto part = motif;
      for (auto& node : part.nodes) {
        node.id = "o" + std::to_string(c) + node.id;
        node.position = Point{node.position->x + 500.0 * c, node.position->y};
      }
      for (auto& e : part.edges) {
        e.src.node = "o" + std::to_string(c) + e.src.node;
        e.dst.node = "o" + std::to_string(c) + e.dst.node;
      }
      fx::append(g, part);
    }
    fx::append(g, oracle::random_project(rng, 3, {"D"}, "noise"));
    for (const auto& plan : find_clone_plans(g)) {
      const auto result = encapsulate(g, plan);
      validate(result.graph);
      CHECK(are_isomorphic(flatten(result.graph), g));
      int expected = 0;
      for (const auto& o : plan.occurrences) expected -= static_cast<int>(o.node_map.size()) - 1;
      CHECK(plan.predicted_node_delta == expected);
      CHECK(static_cast<int>(result.graph.nodes.size()) == static_cast<int>(g.nodes.size()) + expected);
      const auto d = metrics_delta(g, result.graph);
      CHECK(d.delta.at("halstead_length") < 0);
      CHECK(d.delta.at("halstead_length") == d.after.halstead_length - d.before.halstead_length);
      ++applied;
    }
  }
  CHECK(applied > 20);
}

TEST_CASE("metrics_delta") {
  const auto g = copies({"A", "B"}, 2);
  const auto d = metrics_delta(g, g);
  for (const auto& [k, v] : d.delta) CHECK(v == 0.0);
  const auto j = metrics_delta_to_json(d);
  CHECK(j.contains("before"));
  CHECK(j.contains("after"));
  CHECK(j.contains("delta"));
}

TEST_CASE("optimize_layout") {
  SUBCASE("crossing fixture reaches zero overlaps") {
    const auto g = fx::graph({fx::op("a", "A", Point{0, 0}), fx::op("b", "B", Point{200, 0}),
                              fx::op("c", "C", Point{0, 200}), fx::op("d", "D", Point{200, 200})},
                             {fx::edge("a", "d"), fx::edge("b", "c")});
    REQUIRE(layout_metrics(g).at("edge_overlaps") == 1.0);
    const auto o = optimize_layout(g);
    CHECK(layout_metrics(o).at("edge_overlaps") == 0.0);
    CHECK(layout_quality(o) <= layout_quality(g));
  }
  SUBCASE("single node") {
    const auto g = fx::graph({fx::op("a", "A", Point{5, 5})}, {});
    CHECK(layout_quality(optimize_layout(g)) == 0.0);
  }
  SUBCASE("missing layout") { CHECK_THROWS_AS(optimize_layout(fx::graph({fx::op("a", "A")}, {})), Error); }
  SUBCASE("never worse, structure untouched, deterministic") {
    std::mt19937_64 rng(73);
    for (int i = 0; i < 15; ++i) {
      const auto g = oracle::random_project(rng, 8, {"A", "B", "C"}, "l");
      const auto o = optimize_layout(g);
      CHECK(layout_quality(o) <= layout_quality(g));
      const auto d = metrics_delta(g, o);
      CHECK(d.delta.at("cyclomatic") == 0);
      CHECK(d.delta.at("halstead_length") == 0);
      CHECK(d.delta.at("halstead_vocabulary") == 0);
      CHECK(d.delta.at("halstead_difficulty") == 0);
      CHECK(o.edges == g.edges);
      REQUIRE(o.nodes.size() == g.nodes.size());
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        CHECK(o.nodes[k].id == g.nodes[k].id);
        CHECK(o.nodes[k].size == g.nodes[k].size);
      }
      CHECK(optimize_layout(g) == o);
    }
  }
}
