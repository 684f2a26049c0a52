#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vpla/metrics.hpp"
#include "vpla/mining.hpp"

namespace vpla {

struct EncapsulationPlan {
  FrequentSubgraph pattern;
  /// Vertex-disjoint occurrences whose induced structure matches the first
  /// one exactly (parameters may differ; they become instance bindings).
  std::vector<Embedding> occurrences;
  CompositeBlockDef new_composite;
  /// Per occurrence: inner node id -> param overrides.
  std::vector<std::map<std::string, std::map<std::string, Json>>> bindings;
  int predicted_node_delta = 0;
};

/// Clone priority: higher support first, then larger |V|+|E|, then the
/// smaller canonical code. Strict weak order.
bool clone_precedes(const FrequentSubgraph& a, const FrequentSubgraph& b);
const FrequentSubgraph& select_clone(const std::vector<FrequentSubgraph>& clones);

/// Plan for a clone mined from g (its single-graph embeddings).
EncapsulationPlan plan_encapsulation(const ProjectGraph& g, const FrequentSubgraph& clone);
/// Single-occurrence plan for a user selection (>= 2 connected nodes).
EncapsulationPlan plan_from_selection(const ProjectGraph& g, const std::vector<std::string>& node_ids);
/// Mines g and returns the plans with at least `min_occurrences`
/// occurrences, best clone first.
std::vector<EncapsulationPlan> find_clone_plans(const ProjectGraph& g, int min_occurrences = 2,
                                                std::size_t max_pattern_nodes = 6);

struct EncapsulationResult {
  ProjectGraph graph;
  CompositeBlockDef def;
  std::vector<std::string> instance_ids;
};

/// Replaces every occurrence by one composite instance. Throws
/// OverlappingOccurrences, or StaleEmbedding when g no longer matches the
/// plan.
EncapsulationResult encapsulate(const ProjectGraph& g, const EncapsulationPlan& plan);

struct MetricsDelta {
  MetricsReport before;
  MetricsReport after;
  std::map<std::string, double> delta;  // after - before
};

MetricsDelta metrics_delta(const ProjectGraph& before, const ProjectGraph& after, const LayoutWeights& w = {});

Json metrics_delta_to_json(const MetricsDelta& d);
Json plan_summary_to_json(const EncapsulationPlan& plan, const std::string& plan_id);

/// Layered layout followed by seeded hill climbing; returns the best layout
/// found, never scoring worse than the input. Structure is untouched.
ProjectGraph optimize_layout(const ProjectGraph& g, const LayoutWeights& w = {}, std::uint64_t seed = 1);

}  // namespace vpla
