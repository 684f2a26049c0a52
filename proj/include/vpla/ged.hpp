#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "vpla/graph.hpp"

namespace vpla {

/// Node labels are (kind, type_label); edge labels are Edge::label.
/// Substituting equal labels is free.
struct EditCosts {
  double node_insert = 1.0;
  double node_delete = 1.0;
  double node_substitute = 1.0;
  double edge_insert = 1.0;
  double edge_delete = 1.0;
  double edge_substitute = 1.0;

  void check() const;
};

inline constexpr std::size_t kDefaultExactCutoff = 8;
/// Hard limit of the exact search regardless of the configured cutoff.
inline constexpr std::size_t kMaxExactNodes = 16;

/// Reusable GED evaluator. Graphs are prepared once (labels interned) and can
/// then be compared many times. prepare() is not thread-safe; the
/// comparisons are.
class GedEngine {
 public:
  struct Graph {
    std::vector<std::string> ids;
    std::vector<int> label;
    std::vector<int> degree;             // in + out, self-loops twice
    std::vector<std::uint32_t> offset;   // n*n + 1 offsets into pair_labels
    std::vector<int> pair_labels;        // sorted edge labels per ordered pair
    int edge_count = 0;

    [[nodiscard]] int size() const { return static_cast<int>(label.size()); }
    [[nodiscard]] int pair_size(int u, int v) const {
      const auto k = static_cast<std::size_t>(u * size() + v);
      return offset[k + 1] - offset[k];
    }
  };

  explicit GedEngine(EditCosts costs = {});

  Graph prepare(const ProjectGraph& g);

  /// Exact edit distance by best-first search. With a finite `cap`, the
  /// search stops once the distance is known to be >= cap and returns a
  /// value >= cap. Throws SizeExceedsCutoff above kMaxExactNodes.
  [[nodiscard]] double exact(const Graph& a, const Graph& b,
                             double cap = std::numeric_limits<double>::infinity()) const;
  /// Cost of the best assignment found by greedy matching plus local search.
  [[nodiscard]] double upper_bound(const Graph& a, const Graph& b) const;
  /// Cheap label-count and edge-count bound.
  [[nodiscard]] double lower_bound(const Graph& a, const Graph& b) const;
  /// Total cost of a node assignment (a node -> b node or -1).
  [[nodiscard]] double assignment_cost(const Graph& a, const Graph& b, const std::vector<int>& map) const;

  [[nodiscard]] const EditCosts& costs() const { return costs_; }

 private:
  /// Cost terms touching a-nodes `us` or b-nodes `xs` under `map`.
  [[nodiscard]] double partial_cost(const Graph& a, const Graph& b, const std::vector<int>& map,
                                    const std::vector<char>& hit, const int* us, int nu, const int* xs, int nx) const;
  double greedy_assignment(const Graph& a, const Graph& b, std::vector<int>& map) const;
  [[nodiscard]] double pair_cost(const Graph& a, int u, int v, const Graph& b, int x, int y) const;

  EditCosts costs_;
  std::map<std::string, int> node_labels_;
  std::map<std::string, int> edge_labels_;
};

/// Throws SizeExceedsCutoff when either graph has more than `exact_cutoff`
/// nodes.
double ged_exact(const ProjectGraph& g1, const ProjectGraph& g2, const EditCosts& costs = {},
                 std::size_t exact_cutoff = kDefaultExactCutoff);
double ged_upper_bound(const ProjectGraph& g1, const ProjectGraph& g2, const EditCosts& costs = {});

}  // namespace vpla
