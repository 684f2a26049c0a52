#include "vpla/session.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "vpla/graph_json.hpp"

namespace vpla {

namespace {

const std::map<std::string, EditType>& op_names() {
  static const std::map<std::string, EditType> names = {
      {"add_node", EditType::AddNode},       {"remove_node", EditType::RemoveNode},
      {"add_edge", EditType::AddEdge},       {"remove_edge", EditType::RemoveEdge},
      {"move_node", EditType::MoveNode},     {"set_param", EditType::SetParam},
      {"apply_encapsulation", EditType::ApplyEncapsulation}, {"apply_layout_opt", EditType::ApplyLayoutOpt}};
  return names;
}

std::string op_name(EditType t) {
  for (const auto& [k, v] : op_names())
    if (v == t) return k;
  return "add_node";
}

}  // namespace

EditOp edit_op_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string())
    throw Error(ErrorCode::MalformedDocument, "edit must be an object with a string \"op\"");
  auto it = op_names().find(j["op"].get<std::string>());
  if (it == op_names().end()) throw Error(ErrorCode::MalformedDocument, "unknown op " + j["op"].dump());
  EditOp op;
  op.type = it->second;
  try {
    switch (op.type) {
      case EditType::AddNode: op.node = node_from_json(j.at("node")); break;
      case EditType::RemoveNode: op.id = j.at("id").get<std::string>(); break;
      case EditType::AddEdge:
      case EditType::RemoveEdge: op.edge = edge_from_json(j.at("edge")); break;
      case EditType::MoveNode:
        op.id = j.at("id").get<std::string>();
        op.to = {j.at("x").get<double>(), j.at("y").get<double>()};
        break;
      case EditType::SetParam:
        op.id = j.at("id").get<std::string>();
        op.param = j.at("name").get<std::string>();
        op.value = j.contains("value") ? j.at("value") : Json(nullptr);
        if (op.value.is_object() || op.value.is_array())
          throw Error(ErrorCode::MalformedDocument, "param values must be scalars");
        break;
      case EditType::ApplyEncapsulation:
        if (j.contains("plan_id")) op.plan_id = j.at("plan_id").get<std::string>();
        if (j.contains("nodes")) op.selection = j.at("nodes").get<std::vector<std::string>>();
        if (op.plan_id.empty() && op.selection.empty())
          throw Error(ErrorCode::MalformedDocument, "apply_encapsulation needs plan_id or nodes");
        break;
      case EditType::ApplyLayoutOpt: break;
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("edit: ") + e.what());
  }
  return op;
}

Json edit_op_to_json(const EditOp& op) {
  Json j = {{"op", op_name(op.type)}};
  switch (op.type) {
    case EditType::AddNode: j["node"] = node_to_json(op.node); break;
    case EditType::RemoveNode: j["id"] = op.id; break;
    case EditType::AddEdge:
    case EditType::RemoveEdge: j["edge"] = edge_to_json(op.edge); break;
    case EditType::MoveNode:
      j["id"] = op.id;
      j["x"] = op.to.x;
      j["y"] = op.to.y;
      break;
    case EditType::SetParam:
      j["id"] = op.id;
      j["name"] = op.param;
      j["value"] = op.value;
      break;
    case EditType::ApplyEncapsulation:
      if (!op.plan_id.empty()) j["plan_id"] = op.plan_id;
      if (!op.selection.empty()) j["nodes"] = op.selection;
      break;
    case EditType::ApplyLayoutOpt: break;
  }
  return j;
}

SessionManager::SessionManager(std::shared_ptr<const Recommender> recommender, SessionConfig config)
    : recommender_(std::move(recommender)), config_(std::move(config)) {
  config_.weights.check();
  if (config_.undo_limit == 0) throw Error(ErrorCode::InvalidArgument, "undo limit must be >= 1");
}

std::pair<std::string, SessionState> SessionManager::create(std::optional<ProjectGraph> project) {
  auto s = std::make_shared<Session>();
  if (project) {
    validate(*project);
    s->graph = std::move(*project);
  } else {
    s->graph.project_id = "untitled";
  }
  s->metrics = compute_report(s->graph, config_.weights);
  std::string id;
  {
    std::lock_guard lock(sessions_mutex_);
    id = "s" + std::to_string(next_id_++);
    sessions_[id] = s;
  }
  snapshot(id, *s);
  return {id, {s->metrics, s->version}};
}

bool SessionManager::close(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.erase(id) > 0;
}

std::vector<std::string> SessionManager::session_ids() const {
  std::lock_guard lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [k, v] : sessions_) ids.push_back(k);
  return ids;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, id);
  return it->second;
}

ProjectGraph SessionManager::project(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return s->graph;
}

SessionState SessionManager::state(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return {s->metrics, s->version};
}

void SessionManager::commit(Session& s, ProjectGraph next, bool keep_redo) {
  MetricsReport metrics = compute_report(next, config_.weights);
  s.undo.push_back(std::move(s.graph));
  while (s.undo.size() > config_.undo_limit) s.undo.pop_front();
  if (!keep_redo) s.redo.clear();
  s.graph = std::move(next);
  s.metrics = std::move(metrics);
  ++s.version;
}

void SessionManager::snapshot(const std::string& id, const Session& s) const {
  if (config_.snapshot_dir.empty()) return;
  std::filesystem::create_directories(config_.snapshot_dir);
  save_project_file(s.graph, (std::filesystem::path(config_.snapshot_dir) / (id + ".json")).string());
}

std::vector<std::pair<std::string, EncapsulationPlan>>& SessionManager::plans_locked(Session& s) {
  if (s.plans_version != s.version) {
    s.plans.clear();
    if (s.graph.nodes.size() >= 2) {
      auto plans = find_clone_plans(s.graph, config_.clone_min_occurrences, config_.clone_max_pattern_nodes);
      for (std::size_t i = 0; i < plans.size(); ++i) s.plans.emplace_back("plan_" + std::to_string(i + 1), std::move(plans[i]));
    }
    s.plans_version = s.version;
  }
  return s.plans;
}

std::vector<std::pair<std::string, EncapsulationPlan>> SessionManager::clones(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return plans_locked(*s);
}

EditOutcome SessionManager::edit(const std::string& id, const EditOp& op) {
  auto sp = find(id);
  Session& s = *sp;
  std::lock_guard lock(s.mutex);
  ProjectGraph next = s.graph;
  EditOutcome out;

  auto node_at = [&](const std::string& node_id) -> Node& {
    for (auto& n : next.nodes)
      if (n.id == node_id) return n;
    throw Error(ErrorCode::UnknownNode, node_id);
  };

  switch (op.type) {
    case EditType::AddNode: {
      Node n = op.node;
      if (n.composite && n.in_ports.empty() && n.out_ports.empty()) {
        if (const auto* def = next.find_composite(n.type_label)) {
          n.in_ports = def->in_ports;
          n.out_ports = def->out_ports;
        }
      }
      next.nodes.push_back(std::move(n));
      break;
    }
    case EditType::RemoveNode: {
      node_at(op.id);
      std::erase_if(next.nodes, [&](const Node& n) { return n.id == op.id; });
      std::erase_if(next.edges, [&](const Edge& e) { return e.src.node == op.id || e.dst.node == op.id; });
      break;
    }
    case EditType::AddEdge: next.edges.push_back(op.edge); break;
    case EditType::RemoveEdge: {
      auto it = std::find_if(next.edges.begin(), next.edges.end(), [&](const Edge& e) {
        return e.src == op.edge.src && e.dst == op.edge.dst && (!op.edge.label || e.label == op.edge.label);
      });
      if (it == next.edges.end()) throw Error(ErrorCode::InvalidEdge, "no such edge");
      next.edges.erase(it);
      break;
    }
    case EditType::MoveNode: node_at(op.id).position = op.to; break;
    case EditType::SetParam: {
      Node& n = node_at(op.id);
      if (op.value.is_null())
        n.params.erase(op.param);
      else
        n.params[op.param] = op.value;
      break;
    }
    case EditType::ApplyEncapsulation: {
      EncapsulationPlan plan;
      if (!op.selection.empty()) {
        plan = plan_from_selection(s.graph, op.selection);
      } else {
        const auto& plans = plans_locked(s);
        auto it = std::find_if(plans.begin(), plans.end(), [&](const auto& p) { return p.first == op.plan_id; });
        if (it == plans.end()) throw Error(ErrorCode::UnknownPlan, op.plan_id);
        plan = it->second;
      }
      auto result = encapsulate(s.graph, plan);
      next = std::move(result.graph);
      out.composite = std::move(result.def);
      out.instance_ids = std::move(result.instance_ids);
      break;
    }
    case EditType::ApplyLayoutOpt: next = optimize_layout(s.graph, config_.weights, config_.layout_seed); break;
  }
  validate(next);
  if (op.type == EditType::ApplyEncapsulation || op.type == EditType::ApplyLayoutOpt)
    out.delta = metrics_delta(s.graph, next, config_.weights);
  commit(s, std::move(next));
  snapshot(id, s);
  out.state = {s.metrics, s.version};
  return out;
}

SessionState SessionManager::undo(const std::string& id) {
  auto sp = find(id);
  Session& s = *sp;
  std::lock_guard lock(s.mutex);
  if (s.undo.empty()) throw Error(ErrorCode::NothingToUndo, "undo stack is empty");
  ProjectGraph prev = std::move(s.undo.back());
  s.undo.pop_back();
  s.redo.push_back(std::move(s.graph));
  s.graph = std::move(prev);
  s.metrics = compute_report(s.graph, config_.weights);
  ++s.version;
  snapshot(id, s);
  return {s.metrics, s.version};
}

SessionState SessionManager::redo(const std::string& id) {
  auto sp = find(id);
  Session& s = *sp;
  std::lock_guard lock(s.mutex);
  if (s.redo.empty()) throw Error(ErrorCode::NothingToUndo, "redo stack is empty");
  ProjectGraph next = std::move(s.redo.back());
  s.redo.pop_back();
  commit(s, std::move(next), true);
  snapshot(id, s);
  return {s.metrics, s.version};
}

std::vector<Recommendation> SessionManager::recommend(const std::string& id, const std::string& node,
                                                      std::optional<std::size_t> k) const {
  ProjectGraph g = project(id);
  if (!g.find_node(node)) throw Error(ErrorCode::UnknownNode, node);
  if (!recommender_) return {};
  RecommendOptions options = config_.recommend;
  if (k) options.k = *k;
  return recommender_->recommend(g, node, options);
}

Json SessionManager::displayed_metrics(const MetricsReport& report) const {
  std::map<std::string, double> values;
  for (const auto& [k, v] : report.values()) values[k] = v;
  Json out = Json::object();
  for (const auto& name : config_.displayed_metrics) {
    auto it = values.find(name);
    out[name] = it == values.end() ? Json(nullptr) : Json(it->second);
  }
  return out;
}

}  // namespace vpla
