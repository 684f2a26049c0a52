#pragma once

#include <string>
#include <string_view>

#include "vpla/graph.hpp"

namespace vpla {

// Interchange document <-> ProjectGraph. Unknown fields at document, node,
// edge and composite level are carried in `extra` and written back.

/// Parses and validates. Throws MalformedDocument for JSON/schema problems
/// and the specific invariant error otherwise.
ProjectGraph parse_project(std::string_view document);
ProjectGraph project_from_json(const Json& doc);

/// Reads the document without running validate().
ProjectGraph project_from_json_unchecked(const Json& doc);

Json project_to_json(const ProjectGraph& g);
std::string serialize_project(const ProjectGraph& g, int indent = 2);

Node node_from_json(const Json& j);
Json node_to_json(const Node& n);
Edge edge_from_json(const Json& j);
Json edge_to_json(const Edge& e);
CompositeBlockDef composite_from_json(const Json& j);
Json composite_to_json(const CompositeBlockDef& c);

ProjectGraph load_project_file(const std::string& path);
void save_project_file(const ProjectGraph& g, const std::string& path);

}  // namespace vpla
