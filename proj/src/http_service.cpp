#include "vpla/http_service.hpp"

#include <sstream>

#include "httplib.h"
#include "vpla/graph_json.hpp"

namespace vpla {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownPlan: return 404;
    case ErrorCode::MalformedDocument:
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::NothingToUndo:
    case ErrorCode::StaleEmbedding:
    case ErrorCode::OverlappingOccurrences: return 409;
    case ErrorCode::DanglingEdge:
    case ErrorCode::DuplicateNodeId:
    case ErrorCode::UnknownPort:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::InvalidEdge:
    case ErrorCode::InvalidComposite:
    case ErrorCode::UnknownCompositeType:
    case ErrorCode::PatternDisconnected:
    case ErrorCode::MissingLayout:
    case ErrorCode::SizeExceedsCutoff: return 422;
    default: return 500;
  }
}

namespace {

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", {{"code", code}, {"message", message}}}}};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/'))
    if (!part.empty()) parts.push_back(part);
  return parts;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("request body: ") + e.what());
  }
}

}  // namespace

Json ApiRouter::state_json(const SessionState& state) const {
  return {{"version", state.version},
          {"metrics", report_to_json(state.metrics)},
          {"displayed", sessions_.displayed_metrics(state.metrics)}};
}

ApiResponse ApiRouter::handle(const ApiRequest& request) {
  try {
    return route(request);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), std::string(to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

ApiResponse ApiRouter::route(const ApiRequest& req) {
  const auto parts = split_path(req.path);
  const std::string& m = req.method;
  if (parts.size() == 1 && parts[0] == "health" && m == "GET")
    return {200, {{"status", "ok"}, {"table", sessions_.has_table()}}};
  if (parts.empty() || parts[0] != "sessions") return error_response(404, "NotFound", "no route for " + req.path);

  if (parts.size() == 1) {
    if (m == "POST") {
      const Json body = parse_body(req.body);
      std::optional<ProjectGraph> project;
      if (body.contains("project") && !body["project"].is_null()) project = project_from_json(body["project"]);
      auto [id, state] = sessions_.create(std::move(project));
      Json out = state_json(state);
      out["session_id"] = id;
      return {201, out};
    }
    if (m == "GET") return {200, sessions_.session_ids()};
    return error_response(405, "MethodNotAllowed", m + " " + req.path);
  }

  const std::string& id = parts[1];
  if (parts.size() == 2) {
    if (m == "GET") return {200, project_to_json(sessions_.project(id))};
    if (m == "DELETE") {
      if (!sessions_.close(id)) throw Error(ErrorCode::UnknownSession, id);
      return {200, {{"closed", id}}};
    }
    return error_response(405, "MethodNotAllowed", m + " " + req.path);
  }
  if (parts.size() != 3) return error_response(404, "NotFound", "no route for " + req.path);
  const std::string& action = parts[2];

  if (action == "metrics" && m == "GET") {
    const SessionState state = sessions_.state(id);
    auto detail = req.query.find("detail");
    const bool full = detail != req.query.end() && detail->second == "full";
    return {200, {{"version", state.version},
                  {"metrics", full ? report_to_json(state.metrics) : sessions_.displayed_metrics(state.metrics)}}};
  }
  if (action == "clones" && m == "GET") {
    Json out = Json::array();
    for (const auto& [plan_id, plan] : sessions_.clones(id)) out.push_back(plan_summary_to_json(plan, plan_id));
    return {200, out};
  }
  if (m != "POST") return error_response(405, "MethodNotAllowed", m + " " + req.path);

  const Json body = parse_body(req.body);
  auto outcome_json = [&](const EditOutcome& o) {
    Json out = state_json(o.state);
    if (o.delta) out["metrics_delta"] = metrics_delta_to_json(*o.delta);
    if (o.composite) out["composite"] = composite_to_json(*o.composite);
    if (!o.instance_ids.empty()) out["instance_ids"] = o.instance_ids;
    return out;
  };

  if (action == "edits") return {200, outcome_json(sessions_.edit(id, edit_op_from_json(body)))};
  if (action == "undo") return {200, state_json(sessions_.undo(id))};
  if (action == "redo") return {200, state_json(sessions_.redo(id))};
  if (action == "recommendations") {
    if (!body.contains("node_id") || !body["node_id"].is_string())
      throw Error(ErrorCode::MalformedDocument, "node_id is required");
    std::optional<std::size_t> k;
    if (body.contains("k")) {
      if (!body["k"].is_number_integer() || body["k"].get<long long>() < 1)
        throw Error(ErrorCode::InvalidArgument, "k must be a positive integer");
      k = body["k"].get<std::size_t>();
    }
    Json out = Json::array();
    for (const auto& r : sessions_.recommend(id, body["node_id"].get<std::string>(), k))
      out.push_back(recommendation_to_json(r));
    return {200, out};
  }
  if (action == "encapsulate") {
    Json op = body;
    op["op"] = "apply_encapsulation";
    return {200, outcome_json(sessions_.edit(id, edit_op_from_json(op)))};
  }
  if (action == "layout") return {200, outcome_json(sessions_.edit(id, edit_op_from_json({{"op", "apply_layout_opt"}})))};
  return error_response(404, "NotFound", "no route for " + req.path);
}

struct HttpServer::Impl {
  explicit Impl(SessionManager& s) : router(s) {}
  ApiRouter router;
  httplib::Server server;
};

HttpServer::HttpServer(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    const ApiResponse out = impl_->router.handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  auto& s = impl_->server;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
  s.Get(R"(/.*)", handler);
  s.Post(R"(/.*)", handler);
  s.Delete(R"(/.*)", handler);
  s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace vpla
