#include "vpla/metrics.hpp"

#include <charconv>
#include <ostream>
#include <set>

namespace vpla {

const std::vector<std::string>& layout_metric_names() {
  static const std::vector<std::string> names = {
      layout_names::kAngularResolution, layout_names::kAspectRatio,    layout_names::kEdgeOverlaps,
      layout_names::kNearestNeighbourVariance, layout_names::kUniformEdges, layout_names::kConcentration,
      layout_names::kHomogeneity};
  return names;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v = {"cyclomatic", "halstead_length", "halstead_vocabulary", "halstead_difficulty"};
    for (const auto& n : layout_metric_names()) v.push_back(n);
    v.push_back("layout_quality");
    return v;
  }();
  return names;
}

double LayoutWeights::weight(const std::string& metric) const {
  if (metric == layout_names::kAngularResolution) return angular_resolution;
  if (metric == layout_names::kAspectRatio) return aspect_ratio;
  if (metric == layout_names::kEdgeOverlaps) return edge_overlaps;
  if (metric == layout_names::kNearestNeighbourVariance) return nearest_neighbour_variance;
  if (metric == layout_names::kUniformEdges) return uniform_edges;
  if (metric == layout_names::kConcentration) return concentration;
  if (metric == layout_names::kHomogeneity) return homogeneity;
  throw Error(ErrorCode::InvalidArgument, "unknown layout metric " + metric);
}

void LayoutWeights::check() const {
  for (const auto& name : layout_metric_names())
    if (!(weight(name) >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative weight for " + name);
}

LayoutWeights LayoutWeights::zero() { return {0, 0, 0, 0, 0, 0, 0}; }

double HalsteadCounts::difficulty() const {
  if (distinct_operands == 0) return 0.0;
  return (distinct_operators / 2.0) * (static_cast<double>(total_operands) / distinct_operands);
}

int cyclomatic(const ProjectGraph& g) {
  if (g.nodes.empty()) return 0;
  const auto components = static_cast<int>(weak_components(g).size());
  return static_cast<int>(g.edges.size()) - static_cast<int>(g.nodes.size()) + 2 * components;
}

HalsteadCounts halstead(const ProjectGraph& g) {
  HalsteadCounts c;
  std::set<std::string> operators, operands;
  for (const auto& n : g.nodes) {
    if (n.kind == NodeKind::Operator) {
      ++c.total_operators;
      operators.insert(n.type_label);
    } else {
      ++c.total_operands;
      operands.insert(n.operand_identifier());
    }
  }
  // Labeled edges reference the passed parameter, so they count as operand
  // occurrences just like the nodes expand_edge_params would create.
  for (const auto& e : g.edges) {
    if (!e.label) continue;
    ++c.total_operands;
    operands.insert(*e.label);
  }
  c.distinct_operators = static_cast<int>(operators.size());
  c.distinct_operands = static_cast<int>(operands.size());
  return c;
}

double layout_quality(const std::map<std::string, double>& metrics, const LayoutWeights& w) {
  double total = 0.0;
  for (const auto& name : layout_metric_names()) {
    auto it = metrics.find(name);
    if (it != metrics.end()) total += w.weight(name) * it->second;
  }
  return total;
}

double layout_quality(const ProjectGraph& g, const LayoutWeights& w) {
  return layout_quality(layout_metrics(g), w);
}

MetricsReport compute_report(const ProjectGraph& g, const LayoutWeights& w) {
  MetricsReport r;
  r.project_id = g.project_id;
  r.cyclomatic = cyclomatic(g);
  r.halstead_counts = halstead(g);
  r.halstead_length = r.halstead_counts.length();
  r.halstead_vocabulary = r.halstead_counts.vocabulary();
  r.halstead_difficulty = r.halstead_counts.difficulty();
  try {
    r.layout = layout_metrics(g);
    r.layout_quality = layout_quality(r.layout, w);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingLayout) throw;
    r.layout.clear();
    r.layout_quality.reset();
  }
  return r;
}

std::vector<std::pair<std::string, double>> MetricsReport::values() const {
  std::vector<std::pair<std::string, double>> out = {
      {"cyclomatic", cyclomatic},
      {"halstead_length", halstead_length},
      {"halstead_vocabulary", halstead_vocabulary},
      {"halstead_difficulty", halstead_difficulty},
  };
  if (layout_quality) {
    for (const auto& name : layout_metric_names()) out.emplace_back(name, layout.at(name));
    out.emplace_back("layout_quality", *layout_quality);
  }
  return out;
}

Json report_to_json(const MetricsReport& r) {
  Json j = Json::object();
  j["project_id"] = r.project_id;
  j["cyclomatic"] = r.cyclomatic;
  j["halstead_length"] = r.halstead_length;
  j["halstead_vocabulary"] = r.halstead_vocabulary;
  j["halstead_difficulty"] = r.halstead_difficulty;
  j["halstead_counts"] = {{"n1", r.halstead_counts.distinct_operators},
                          {"n2", r.halstead_counts.distinct_operands},
                          {"N1", r.halstead_counts.total_operators},
                          {"N2", r.halstead_counts.total_operands}};
  Json layout = Json::object();
  for (const auto& [k, v] : r.layout) layout[k] = v;
  j["layout"] = layout;
  j["layout_quality"] = r.layout_quality ? Json(*r.layout_quality) : Json(nullptr);
  return j;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports) {
  out << "project_id";
  for (const auto& name : metric_names()) out << ',' << name;
  out << '\n';
  for (const auto& r : reports) {
    out << csv_field(r.project_id);
    std::map<std::string, double> values;
    for (const auto& [k, v] : r.values()) values[k] = v;
    for (const auto& name : metric_names()) {
      out << ',';
      if (auto it = values.find(name); it != values.end()) out << format_number(it->second);
    }
    out << '\n';
  }
}

}  // namespace vpla
