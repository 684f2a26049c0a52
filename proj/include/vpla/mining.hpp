#pragma once

#include <map>
#include <string>
#include <vector>

#include "vpla/graph.hpp"

namespace vpla {

struct MiningOptions {
  std::size_t max_pattern_nodes = 6;
  /// Record embeddings per project (transaction mode records all of them,
  /// single-graph mode the greedily selected vertex-disjoint set).
  bool keep_embeddings = true;
};

struct FrequentSubgraph {
  /// Nodes "0".."k-1" in canonical DFS order, ports kAnyPort, no layout.
  ProjectGraph pattern;
  std::string canonical_code;
  int support = 0;
  std::map<std::string, std::vector<Embedding>> embeddings_by_project;

  [[nodiscard]] std::size_t size() const { return pattern.nodes.size() + pattern.edges.size(); }
};

/// Label a node is mined under: "<kind>:<type>", kind being operator,
/// operand or composite.
std::string mining_label(const Node& n);

/// The graph as the miner sees it: node ids kept, labels only, parallel
/// edges collapsed to one arc per ordered pair, self-loops dropped, ports
/// replaced by kAnyPort.
ProjectGraph mining_view(const ProjectGraph& g);

/// Minimum DFS code of a weakly connected pattern (mining view semantics).
/// Throws PatternDisconnected / InvalidArgument for empty input.
std::string canonical_code(const ProjectGraph& pattern);

/// Pattern graph rebuilt from a canonical code string.
ProjectGraph pattern_from_code(const std::string& code);

/// ceil(5% of the corpus), at least 2.
int default_minsup(std::size_t corpus_size);

/// Transaction mode: connected patterns with 2..max_pattern_nodes nodes
/// contained in at least `minsup` projects. Output sorted by canonical code.
std::vector<FrequentSubgraph> mine_frequent(const std::vector<ProjectGraph>& corpus, int minsup,
                                            const MiningOptions& options = {});

/// Single-graph mode: support is the size of the greedy vertex-disjoint
/// embedding set (embeddings in lexicographic host-id order).
std::vector<FrequentSubgraph> mine_single_graph(const ProjectGraph& g, int min_occurrences,
                                                const MiningOptions& options = {});

// ---------------------------------------------------------------------------
// Structural table

/// Direction of a connecting edge seen from the candidate node.
enum class CandidateDirection { In, Out, Both };

std::string_view to_string(CandidateDirection d);
CandidateDirection candidate_direction_from_string(std::string_view s);

struct CandidateEdge {
  CandidateDirection dir = CandidateDirection::In;
  std::string upstream_node;  // id in the row's upstream pattern
  auto operator<=>(const CandidateEdge&) const = default;
};

struct Candidate {
  NodeKind kind = NodeKind::Operator;
  std::string type_label;
  bool composite = false;
  std::vector<CandidateEdge> edges;  // sorted

  /// Exact identity within one upstream (includes attachment nodes).
  [[nodiscard]] std::string key() const;
  /// Identity across rows: label plus the multiset of edge directions.
  [[nodiscard]] std::string template_key() const;
  bool operator==(const Candidate&) const = default;
};

struct StructuralTableRow {
  ProjectGraph upstream;
  std::string upstream_code;
  Candidate candidate;
  double confidence = 0.0;
  int support_full = 0;
  int support_upstream = 0;
};

struct TableProvenance {
  std::string corpus_id;
  int minsup = 0;
  std::size_t max_pattern_nodes = 0;
  std::size_t corpus_size = 0;
  bool expand_edge_params = false;
  std::string mined_at;
};

struct StructuralTable {
  TableProvenance provenance;
  std::vector<StructuralTableRow> rows;
};

/// Splits every pattern into (upstream = pattern minus one downstream node,
/// candidate = that node) wherever the remainder stays connected.
/// Confidence = support(pattern) / support(upstream). Rows are unique per
/// (upstream code, candidate key) and sorted by that pair.
StructuralTable build_structural_table(const std::vector<FrequentSubgraph>& patterns,
                                       const std::vector<ProjectGraph>& corpus);

/// Number of projects containing the (connected) pattern, in mining-view
/// semantics.
int transaction_support(const ProjectGraph& pattern, const std::vector<ProjectGraph>& corpus);

Json table_to_json(const StructuralTable& t);
StructuralTable table_from_json(const Json& j);
void save_table(const StructuralTable& t, const std::string& path);
StructuralTable load_table(const std::string& path);

}  // namespace vpla
