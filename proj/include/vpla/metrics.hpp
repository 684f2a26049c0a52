#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vpla/graph.hpp"

namespace vpla {

namespace layout_names {
inline constexpr const char* kAngularResolution = "angular_resolution";
inline constexpr const char* kAspectRatio = "aspect_ratio";
inline constexpr const char* kEdgeOverlaps = "edge_overlaps";
inline constexpr const char* kNearestNeighbourVariance = "nearest_neighbour_variance";
inline constexpr const char* kUniformEdges = "uniform_edges";
inline constexpr const char* kConcentration = "concentration";
inline constexpr const char* kHomogeneity = "homogeneity";
}  // namespace layout_names

/// The seven layout metric names in reporting order.
const std::vector<std::string>& layout_metric_names();

/// Weights of the readability penalties. Defaults follow the published
/// weighting; every field may be overridden.
struct LayoutWeights {
  double angular_resolution = 1e-2;
  double aspect_ratio = 1e-7;
  double edge_overlaps = 1.0;
  double nearest_neighbour_variance = 1e-6;
  double uniform_edges = 1e-3;
  double concentration = 1.0;
  double homogeneity = 1.0;

  [[nodiscard]] double weight(const std::string& metric) const;
  /// Throws InvalidArgument on negative weights.
  void check() const;
  static LayoutWeights zero();
};

struct HalsteadCounts {
  int distinct_operators = 0;  // n1
  int distinct_operands = 0;   // n2
  int total_operators = 0;     // N1
  int total_operands = 0;      // N2

  [[nodiscard]] int length() const { return total_operators + total_operands; }
  [[nodiscard]] int vocabulary() const { return distinct_operators + distinct_operands; }
  [[nodiscard]] double difficulty() const;
};

struct MetricsReport {
  std::string project_id;
  int cyclomatic = 0;
  int halstead_length = 0;
  int halstead_vocabulary = 0;
  double halstead_difficulty = 0.0;
  HalsteadCounts halstead_counts;
  /// Empty when some node has no position/size.
  std::map<std::string, double> layout;
  std::optional<double> layout_quality;

  /// Flat name -> value view in reporting order (structural metrics,
  /// layout metrics, layout_quality). Layout entries are omitted when the
  /// graph has no layout.
  [[nodiscard]] std::vector<std::pair<std::string, double>> values() const;
};

/// Every metric name a MetricsReport can carry, in column order.
const std::vector<std::string>& metric_names();

/// McCabe on the block graph: E - N + 2P, 0 for the empty graph.
int cyclomatic(const ProjectGraph& g);
HalsteadCounts halstead(const ProjectGraph& g);

/// Throws MissingLayout when a node lacks a position or size.
std::map<std::string, double> layout_metrics(const ProjectGraph& g);
double layout_quality(const std::map<std::string, double>& metrics, const LayoutWeights& w);
double layout_quality(const ProjectGraph& g, const LayoutWeights& w = {});

MetricsReport compute_report(const ProjectGraph& g, const LayoutWeights& w = {});

Json report_to_json(const MetricsReport& r);

/// Shortest round-trip decimal representation; stable across runs.
std::string format_number(double v);

/// CSV: header "project_id,<metric_names()...>", one row per report; missing
/// layout values are empty cells.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports);

// ---------------------------------------------------------------------------
// Metric selection by variance and Pearson correlation.

struct MetricTable {
  std::vector<std::string> names;
  std::vector<std::string> row_ids;
  std::vector<std::vector<double>> rows;  // rows[i][j] = metric j of sample i

  [[nodiscard]] std::vector<double> column(std::size_t j) const;
};

MetricTable to_metric_table(const std::vector<MetricsReport>& reports);
/// Reads the CSV written by write_metrics_csv. Rows with empty cells are
/// skipped.
MetricTable read_metrics_csv(std::istream& in);

struct RedundancyGroup {
  std::vector<std::string> members;  // sorted
  std::string representative;
};

struct MetricSelection {
  std::vector<std::string> kept;
  std::vector<std::string> dropped_zero_variance;
  std::vector<std::string> dropped_redundant;
  /// Groups of at least two metrics with pairwise-transitive |r| >= tau.
  std::vector<RedundancyGroup> redundancy_groups;
  std::map<std::string, double> variances;
};

struct SelectionOptions {
  double variance_floor = 1e-9;
  double correlation_threshold = 0.85;
  /// Representative choice: first listed member wins; unlisted metrics
  /// follow in name order.
  std::vector<std::string> priority;
};

double sample_variance(const std::vector<double>& xs);
/// Pearson product-moment correlation from single-pass co-moments; 0 when
/// either series is constant.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

MetricSelection select_metrics(const MetricTable& table, const SelectionOptions& options = {});
MetricSelection select_metrics(const std::vector<MetricsReport>& reports, const SelectionOptions& options = {});

Json selection_to_json(const MetricSelection& s);

}  // namespace vpla
