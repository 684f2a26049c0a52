#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "vpla/error.hpp"

namespace vpla {

using Json = nlohmann::json;

enum class NodeKind { Operator, Operand };

std::string_view to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view text);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Extent {
  double w = 0.0;
  double h = 0.0;
  bool operator==(const Extent&) const = default;
};

/// Port name accepted by the embedding search as "any port". Mined patterns
/// carry no port information and use it on both sides of every edge.
inline constexpr std::string_view kAnyPort = "*";

// A block or a variable/constant of the visual program. `position` is the
// node centre; layout-free graphs (mined patterns) leave it empty.
struct Node {
  std::string id;
  NodeKind kind = NodeKind::Operator;
  std::string type_label;
  std::vector<std::string> in_ports;
  std::vector<std::string> out_ports;
  std::map<std::string, Json> params;
  std::optional<Point> position;
  std::optional<Extent> size;
  /// Set on instances of a composite block; type_label then names the
  /// CompositeBlockDef.
  bool composite = false;
  /// Per-instance parameter overrides of a composite: inner node id ->
  /// (param name -> value).
  std::map<std::string, std::map<std::string, Json>> bindings;
  Json extra = Json::object();

  [[nodiscard]] bool has_in_port(std::string_view port) const;
  [[nodiscard]] bool has_out_port(std::string_view port) const;
  /// Halstead operand identifier: params["name"] if it is a string, else
  /// the type label.
  [[nodiscard]] std::string operand_identifier() const;

  bool operator==(const Node&) const = default;
};

struct PortRef {
  std::string node;
  std::string port;
  auto operator<=>(const PortRef&) const = default;
};

struct Edge {
  PortRef src;  // out-port of src.node
  PortRef dst;  // in-port of dst.node
  std::optional<std::string> label;
  Json extra = Json::object();

  bool operator==(const Edge&) const = default;
};

struct CompositeBlockDef;

struct ProjectGraph {
  std::string project_id;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<CompositeBlockDef> composites;
  Json extra = Json::object();

  [[nodiscard]] const Node* find_node(std::string_view id) const;
  [[nodiscard]] std::optional<std::size_t> node_index(std::string_view id) const;
  [[nodiscard]] const CompositeBlockDef* find_composite(std::string_view type_id) const;
  [[nodiscard]] bool empty() const { return nodes.empty(); }
};

struct CompositeBlockDef {
  std::string type_id;
  ProjectGraph inner;
  std::vector<std::string> in_ports;
  std::vector<std::string> out_ports;
  /// composite port -> (inner node id, inner port)
  std::map<std::string, PortRef> boundary;
  Json extra = Json::object();
};

bool operator==(const ProjectGraph& a, const ProjectGraph& b);
bool operator==(const CompositeBlockDef& a, const CompositeBlockDef& b);

/// Injective, label/kind/direction preserving map from pattern into host.
struct Embedding {
  std::map<std::string, std::string> node_map;  // pattern node id -> host node id
  std::vector<std::size_t> edge_map;            // pattern edge index -> host edge index

  /// Host ids listed in the pattern's node order.
  [[nodiscard]] std::vector<std::string> host_nodes(const ProjectGraph& pattern) const;
  bool operator==(const Embedding&) const = default;
};

/// Dense index over a graph: id lookup plus in/out incidence lists holding
/// edge indices.
class GraphIndex {
 public:
  explicit GraphIndex(const ProjectGraph& g);

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view id) const;
  [[nodiscard]] std::size_t at(std::string_view id) const;
  [[nodiscard]] const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_[node]; }
  [[nodiscard]] const std::vector<std::size_t>& in_edges(std::size_t node) const { return in_[node]; }
  [[nodiscard]] std::size_t source(std::size_t edge) const { return src_[edge]; }
  [[nodiscard]] std::size_t target(std::size_t edge) const { return dst_[edge]; }
  [[nodiscard]] std::size_t node_count() const { return out_.size(); }

 private:
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> src_;
  std::vector<std::size_t> dst_;
};

/// Checks every ProjectGraph invariant, including composite definitions
/// (valid inner graphs, boundary targets, acyclic "uses" relation).
/// Throws Error on the first violation.
void validate(const ProjectGraph& g);

/// Weakly connected components as lists of node indices, ordered by their
/// smallest member.
std::vector<std::vector<std::size_t>> weak_components(const ProjectGraph& g);
bool is_weakly_connected(const ProjectGraph& g);

/// Subgraph induced by the given node ids (original order kept, composites
/// copied). Unknown ids throw UnknownNode.
ProjectGraph induced_subgraph(const ProjectGraph& g, const std::vector<std::string>& node_ids);

/// Replaces every labeled edge a->b by a->p->b with a fresh operand node p
/// whose type label is the edge label.
ProjectGraph expand_edge_params(const ProjectGraph& g);

/// All embeddings of a weakly connected pattern into host, sorted by the
/// host ids in pattern node order. Pattern ports equal to kAnyPort match
/// any host port; pattern edge labels, when present, must match.
std::vector<Embedding> find_embeddings(const ProjectGraph& pattern, const ProjectGraph& host);

/// Inlines every composite instance (recursively) through the boundary
/// map. Composite definitions stay in `composites` as palette entries.
ProjectGraph flatten(const ProjectGraph& g);

/// Structural isomorphism ignoring node ids, layout and extra fields, but
/// respecting kind, type, ports, params, bindings and edge ports/labels.
/// Handles disconnected graphs.
bool are_isomorphic(const ProjectGraph& a, const ProjectGraph& b);

}  // namespace vpla
