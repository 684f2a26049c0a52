#pragma once

// Brute-force reference implementations used to check the engine. Nothing
// here calls into the code under test except for plain data access.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vpla/graph.hpp"

namespace oracle {

/// Labeled simple digraph on vertices 0..n-1 (no self-loops).
struct SmallGraph {
  std::vector<std::string> labels;
  std::vector<std::vector<char>> arc;  // arc[u][v]

  [[nodiscard]] int size() const { return static_cast<int>(labels.size()); }
  void resize(int n);
};

/// "<kind>:<type>" with kind "composite" for composite instances.
std::string label_of(const vpla::Node& n);

/// Labels per node, parallel arcs collapsed, self-loops dropped.
SmallGraph from_project(const vpla::ProjectGraph& g);

/// Isomorphism-class key by trying every vertex permutation (restricted to
/// permutations that keep a label/degree ordering, which cannot exclude
/// the minimum).
std::string canonical_form(const SmallGraph& g);

/// One representative per isomorphism class of the weakly connected
/// edge-subgraphs with 2..max_nodes vertices.
std::map<std::string, SmallGraph> connected_subgraphs(const SmallGraph& g, std::size_t max_nodes);

/// Canonical forms of every weakly connected edge-subgraph with
/// 2..max_nodes vertices.
std::set<std::string> connected_subgraph_classes(const SmallGraph& g, std::size_t max_nodes);

/// canonical form -> number of graphs containing it (>= minsup only).
std::map<std::string, int> frequent_subgraphs(const std::vector<vpla::ProjectGraph>& corpus, int minsup,
                                              std::size_t max_nodes);

/// Every injective node map (pattern node index -> host node index) for
/// which the pattern's edges can be mapped injectively onto host edges
/// with matching direction, ports (kAnyPort = any) and labels.
std::vector<std::vector<std::size_t>> embeddings(const vpla::ProjectGraph& pattern, const vpla::ProjectGraph& host);

/// Embeddings of a labeled pattern into the collapsed view: a pattern
/// vertex pair must carry exactly the host's arcs in both directions.
std::vector<std::vector<int>> view_embeddings(const SmallGraph& pattern, const SmallGraph& host);

/// Greedy vertex-disjoint count over embeddings taken in lexicographic
/// order of host ids.
int greedy_disjoint(std::vector<std::vector<int>> embeddings, const std::vector<std::string>& host_ids);

/// Size of a maximum family of pairwise vertex-disjoint sets (exhaustive).
int max_disjoint(const std::vector<std::vector<int>>& sets);

/// Minimum unit-cost edit distance over every injective partial node
/// mapping.
int ged(const SmallGraph& a, const SmallGraph& b);

/// Bitmask form of a SmallGraph with at most 8 vertices.
struct PackedGraph {
  int n = 0;
  int label[8] = {};
  std::uint8_t out[8] = {};  // successor masks
  int edges = 0;
};

/// Label ids are assigned through `ids`, shared across calls.
PackedGraph pack(const SmallGraph& g, std::map<std::string, int>& ids);

/// Same enumeration as ged() (every injective partial mapping), with the
/// cost accumulated pair by pair along the way.
int ged_packed(const PackedGraph& a, const PackedGraph& b);

double pearson_two_pass(const std::vector<double>& x, const std::vector<double>& y);

/// Every labeled simple digraph with up to max_nodes vertices over the
/// alphabet, one representative per isomorphism class.
std::vector<SmallGraph> all_digraph_classes(int max_nodes, const std::vector<std::string>& alphabet);

/// SmallGraph as a project: nodes "v<i>" with ports in/out, labels split
/// at ':'.
vpla::ProjectGraph to_project(const SmallGraph& g, const std::string& id = "g");

/// Random project with layout, a few repeated types, parallel edges,
/// reverse arcs and self-loops.
vpla::ProjectGraph random_project(std::mt19937_64& rng, std::size_t max_nodes, const std::vector<std::string>& types,
                                  const std::string& id);

}  // namespace oracle
