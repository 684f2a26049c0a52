#pragma once

// DFS-code machinery shared by canonical codes, both mining modes and the
// structural table. Graphs here are simple and undirected underneath; each
// arc carries the direction of the original edge(s) relative to its source.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vpla/graph.hpp"

namespace vpla::detail {

inline constexpr int kArcForward = 1;   // source -> target
inline constexpr int kArcBackward = 2;  // target -> source
inline constexpr int kArcBoth = 3;

inline int reverse_arc(int elabel) {
  return elabel == kArcForward ? kArcBackward : elabel == kArcBackward ? kArcForward : kArcBoth;
}

struct Arc {
  int to;
  int elabel;
  int eid;  // undirected edge id
};

struct LabeledGraph {
  std::vector<int> label;
  std::vector<std::vector<Arc>> adj;
  int edge_count = 0;

  [[nodiscard]] int size() const { return static_cast<int>(label.size()); }
  /// Arc between two vertices or nullptr.
  [[nodiscard]] const Arc* arc(int from, int to) const;
  [[nodiscard]] bool connected() const;
};

/// Order-preserving string <-> int map for node labels; ints compare like the
/// strings they stand for, so minimum codes do not depend on the alphabet.
class LabelAlphabet {
 public:
  LabelAlphabet() = default;
  explicit LabelAlphabet(std::vector<std::string> labels);

  [[nodiscard]] int id(const std::string& label) const;
  [[nodiscard]] const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  [[nodiscard]] std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> ids_;
};

struct DfsEdge {
  int from, to, from_label, elabel, to_label;
  [[nodiscard]] bool forward() const { return from < to; }
  bool operator==(const DfsEdge&) const = default;
};

using DfsCode = std::vector<DfsEdge>;

/// Build from a mining view; vertices follow g.nodes order.
LabeledGraph to_labeled(const ProjectGraph& view, const LabelAlphabet& alphabet);
LabeledGraph graph_from_code(const DfsCode& code);

/// Indices into `code` of the forward edges on the rightmost path, from the
/// rightmost edge back to the root.
std::vector<int> rightmost_path(const DfsCode& code);
int vertex_count(const DfsCode& code);

struct MinimumCode {
  DfsCode code;
  /// Every vertex ordering (dfs index -> graph vertex) realising the code.
  std::vector<std::vector<int>> orderings;
};

/// Minimum DFS code of a connected graph with at least one edge.
MinimumCode minimum_code(const LabeledGraph& g);

/// True iff `code` is the minimum code of the graph it describes.
bool is_minimal(const DfsCode& code);

std::string code_to_string(const DfsCode& code, const LabelAlphabet& alphabet);
std::string single_vertex_code(const std::string& label);

/// Pattern ProjectGraph with node ids "0".."k-1" in dfs order.
ProjectGraph pattern_graph(const DfsCode& code, const LabelAlphabet& alphabet);
ProjectGraph single_vertex_pattern(const std::string& label);

Node node_from_label(const std::string& id, const std::string& label);

}  // namespace vpla::detail
