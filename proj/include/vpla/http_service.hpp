#pragma once

#include <map>
#include <memory>
#include <string>

#include "vpla/session.hpp"

namespace vpla {

struct ApiRequest {
  std::string method;  // "GET", "POST", "DELETE"
  std::string path;    // without query string
  std::string body;
  std::map<std::string, std::string> query;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

/// HTTP status for an engine error code.
int http_status(ErrorCode code);

/// The JSON API without any transport: maps requests onto a SessionManager.
///
///   POST   /sessions                        {project?}         -> {session_id, version, metrics, displayed}
///   GET    /sessions/{id}                                      -> project document
///   DELETE /sessions/{id}
///   POST   /sessions/{id}/edits             {op, ...}          -> {version, metrics, displayed, ...}
///   POST   /sessions/{id}/undo | /redo                         -> {version, metrics, displayed}
///   POST   /sessions/{id}/recommendations   {node_id, k?}      -> [recommendation]
///   GET    /sessions/{id}/clones                               -> [plan summary]
///   POST   /sessions/{id}/encapsulate       {plan_id | nodes}  -> {metrics_delta, composite, ...}
///   POST   /sessions/{id}/layout                               -> {metrics_delta, ...}
///   GET    /sessions/{id}/metrics[?detail=full]                -> {version, metrics}
class ApiRouter {
 public:
  explicit ApiRouter(SessionManager& sessions) : sessions_(sessions) {}
  ApiResponse handle(const ApiRequest& request);

 private:
  ApiResponse route(const ApiRequest& request);
  Json state_json(const SessionState& state) const;

  SessionManager& sessions_;
};

/// ApiRouter served over HTTP (cpp-httplib).
class HttpServer {
 public:
  explicit HttpServer(SessionManager& sessions);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the port or
  /// -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool run();
  void stop();
  /// Blocks until the server accepts connections (after run() started on
  /// another thread).
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vpla
