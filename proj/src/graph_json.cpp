#include "vpla/graph_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace vpla {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedDocument, what); }

const Json& require(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& obj, const char* key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) malformed(std::string("field '") + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) malformed(std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::pair<double, double> number_pair(const Json& v, const char* key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    malformed(std::string("field '") + key + "' must be [number, number]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Json collect_extra(const Json& obj, std::initializer_list<const char*> known) {
  Json extra = Json::object();
  std::set<std::string> names(known.begin(), known.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!names.count(it.key())) extra[it.key()] = it.value();
  return extra;
}

void merge_extra(Json& out, const Json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
}

PortRef port_ref(const Json& v, const char* key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string())
    malformed(std::string("field '") + key + "' must be [node id, port]");
  return {v[0].get<std::string>(), v[1].get<std::string>()};
}

}  // namespace

Node node_from_json(const Json& j) {
  if (!j.is_object()) malformed("node must be an object");
  Node n;
  n.id = require_string(j, "id");
  n.kind = node_kind_from_string(require_string(j, "kind"));
  n.type_label = require_string(j, "type");
  n.in_ports = string_list(j, "in_ports");
  n.out_ports = string_list(j, "out_ports");
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) malformed("params of node " + n.id + " must be an object");
    for (auto p = it->begin(); p != it->end(); ++p) {
      if (p.value().is_structured()) malformed("param '" + p.key() + "' of node " + n.id + " is not a scalar");
      n.params[p.key()] = p.value();
    }
  }
  if (auto it = j.find("pos"); it != j.end() && !it->is_null()) {
    auto [x, y] = number_pair(*it, "pos");
    n.position = Point{x, y};
  }
  if (auto it = j.find("size"); it != j.end() && !it->is_null()) {
    auto [w, h] = number_pair(*it, "size");
    n.size = Extent{w, h};
  }
  if (auto it = j.find("composite"); it != j.end()) {
    if (!it->is_boolean()) malformed("field 'composite' must be a boolean");
    n.composite = it->get<bool>();
  }
  if (auto it = j.find("bindings"); it != j.end()) {
    if (!it->is_object()) malformed("field 'bindings' must be an object");
    for (auto b = it->begin(); b != it->end(); ++b) {
      if (!b.value().is_object()) malformed("binding entries must be objects");
      for (auto p = b.value().begin(); p != b.value().end(); ++p) n.bindings[b.key()][p.key()] = p.value();
    }
  }
  n.extra = collect_extra(j, {"id", "kind", "type", "in_ports", "out_ports", "params", "pos", "size",
                              "composite", "bindings"});
  return n;
}

Json node_to_json(const Node& n) {
  Json j = Json::object();
  j["id"] = n.id;
  j["kind"] = std::string(to_string(n.kind));
  j["type"] = n.type_label;
  j["in_ports"] = n.in_ports;
  j["out_ports"] = n.out_ports;
  Json params = Json::object();
  for (const auto& [k, v] : n.params) params[k] = v;
  j["params"] = params;
  if (n.position) j["pos"] = Json::array({n.position->x, n.position->y});
  if (n.size) j["size"] = Json::array({n.size->w, n.size->h});
  if (n.composite) j["composite"] = true;
  if (!n.bindings.empty()) {
    Json b = Json::object();
    for (const auto& [inner, values] : n.bindings)
      for (const auto& [k, v] : values) b[inner][k] = v;
    j["bindings"] = b;
  }
  merge_extra(j, n.extra);
  return j;
}

Edge edge_from_json(const Json& j) {
  if (!j.is_object()) malformed("edge must be an object");
  Edge e;
  e.src = port_ref(require(j, "src"), "src");
  e.dst = port_ref(require(j, "dst"), "dst");
  if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) malformed("edge label must be a string");
    e.label = it->get<std::string>();
  }
  e.extra = collect_extra(j, {"src", "dst", "label"});
  return e;
}

Json edge_to_json(const Edge& e) {
  Json j = Json::object();
  j["src"] = Json::array({e.src.node, e.src.port});
  j["dst"] = Json::array({e.dst.node, e.dst.port});
  if (e.label) j["label"] = *e.label;
  merge_extra(j, e.extra);
  return j;
}

namespace {

ProjectGraph graph_from_json(const Json& doc) {
  if (!doc.is_object()) malformed("document must be a JSON object");
  ProjectGraph g;
  if (auto it = doc.find("project_id"); it != doc.end()) {
    if (!it->is_string()) malformed("project_id must be a string");
    g.project_id = it->get<std::string>();
  }
  auto list = [&](const char* key) -> const Json* {
    auto it = doc.find(key);
    if (it == doc.end()) return nullptr;
    if (!it->is_array()) malformed(std::string("field '") + key + "' must be an array");
    return &*it;
  };
  if (const Json* nodes = list("nodes"))
    for (const auto& n : *nodes) g.nodes.push_back(node_from_json(n));
  if (const Json* edges = list("edges"))
    for (const auto& e : *edges) g.edges.push_back(edge_from_json(e));
  if (const Json* comps = list("composites"))
    for (const auto& c : *comps) g.composites.push_back(composite_from_json(c));
  g.extra = collect_extra(doc, {"project_id", "nodes", "edges", "composites"});
  return g;
}

Json graph_to_json(const ProjectGraph& g) {
  Json doc = Json::object();
  doc["project_id"] = g.project_id;
  Json nodes = Json::array();
  for (const auto& n : g.nodes) nodes.push_back(node_to_json(n));
  doc["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back(edge_to_json(e));
  doc["edges"] = std::move(edges);
  Json comps = Json::array();
  for (const auto& c : g.composites) comps.push_back(composite_to_json(c));
  doc["composites"] = std::move(comps);
  merge_extra(doc, g.extra);
  return doc;
}

}  // namespace

CompositeBlockDef composite_from_json(const Json& j) {
  if (!j.is_object()) malformed("composite must be an object");
  CompositeBlockDef c;
  c.type_id = require_string(j, "type_id");
  c.inner = graph_from_json(require(j, "inner"));
  c.in_ports = string_list(j, "in_ports");
  c.out_ports = string_list(j, "out_ports");
  if (auto it = j.find("boundary"); it != j.end()) {
    if (!it->is_object()) malformed("boundary must be an object");
    for (auto b = it->begin(); b != it->end(); ++b) c.boundary[b.key()] = port_ref(b.value(), "boundary");
  }
  c.extra = collect_extra(j, {"type_id", "inner", "in_ports", "out_ports", "boundary"});
  return c;
}

Json composite_to_json(const CompositeBlockDef& c) {
  Json j = Json::object();
  j["type_id"] = c.type_id;
  j["inner"] = graph_to_json(c.inner);
  j["in_ports"] = c.in_ports;
  j["out_ports"] = c.out_ports;
  Json b = Json::object();
  for (const auto& [port, ref] : c.boundary) b[port] = Json::array({ref.node, ref.port});
  j["boundary"] = b;
  merge_extra(j, c.extra);
  return j;
}

ProjectGraph project_from_json_unchecked(const Json& doc) { return graph_from_json(doc); }

ProjectGraph project_from_json(const Json& doc) {
  ProjectGraph g = graph_from_json(doc);
  validate(g);
  return g;
}

ProjectGraph parse_project(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document.begin(), document.end());
  } catch (const Json::parse_error& e) {
    malformed(e.what());
  }
  return project_from_json(doc);
}

Json project_to_json(const ProjectGraph& g) { return graph_to_json(g); }

std::string serialize_project(const ProjectGraph& g, int indent) { return graph_to_json(g).dump(indent); }

ProjectGraph load_project_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_project(buffer.str());
}

void save_project_file(const ProjectGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << serialize_project(g) << '\n';
}

}  // namespace vpla
