#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vpla/ged.hpp"
#include "vpla/mining.hpp"

namespace vpla {

struct RecommendOptions {
  std::size_t k = 5;
  std::size_t max_nodes = 10;
  std::size_t max_hops = 3;
  std::size_t exact_cutoff = kDefaultExactCutoff;
};

struct Recommendation {
  NodeKind kind = NodeKind::Operator;
  std::string type_label;
  bool composite = false;
  std::vector<CandidateDirection> edge_dirs;  // sorted multiset
  std::string label;                          // Candidate::template_key()
  double min_ged = 0.0;
  double summed_confidence = 0.0;
  std::vector<std::size_t> contributing_rows;  // indices into the table
};

/// Selected node plus its ancestors within `max_hops` reversed edges,
/// capped at the `max_nodes` closest (BFS layers, ids ascending within a
/// layer). Induced subgraph of g.
ProjectGraph upstream_graph(const ProjectGraph& g, const std::string& selected, std::size_t max_nodes = 10,
                            std::size_t max_hops = 3);

/// Query index over one structural table: rows grouped by upstream pattern
/// (each prepared once for GED) and by candidate template.
class Recommender {
 public:
  explicit Recommender(StructuralTable table, EditCosts costs = {});

  [[nodiscard]] std::vector<Recommendation> recommend(const ProjectGraph& g, const std::string& selected,
                                                      const RecommendOptions& options = {}) const;
  [[nodiscard]] const StructuralTable& table() const { return table_; }

 private:
  struct Upstream {
    GedEngine::Graph graph;
    std::vector<std::size_t> templates;
  };

  StructuralTable table_;
  mutable std::mutex engine_mutex_;
  mutable GedEngine engine_;
  std::vector<Upstream> upstreams_;
  std::vector<std::string> template_keys_;
  std::vector<std::vector<std::size_t>> template_rows_;
};

/// One-shot convenience over Recommender.
std::vector<Recommendation> recommend(const ProjectGraph& g, const std::string& selected,
                                      const StructuralTable& table, std::size_t k = 5);

Json recommendation_to_json(const Recommendation& r);

}  // namespace vpla
