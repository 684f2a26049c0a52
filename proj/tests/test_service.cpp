#include <filesystem>
#include <random>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "support/fixtures.hpp"
#include "support/random_edits.hpp"
#include "support/tempdir.hpp"
#include "vpla/graph_json.hpp"
#include "vpla/http_service.hpp"
#include "vpla/session.hpp"

using namespace vpla;

namespace {

std::shared_ptr<const Recommender> small_recommender() {
  const auto ab = fx::chain({"A", "B"});
  const auto ac = fx::chain({"A", "C"});
  const std::vector<ProjectGraph> corpus = {ab, ab, ab, ac};
  auto table = build_structural_table(mine_frequent(corpus, 2), corpus);
  return std::make_shared<const Recommender>(std::move(table));
}

ProjectGraph twin_chains() {
  ProjectGraph g;
  g.project_id = "twins";
  fx::append(g, fx::chain({"A", "B", "C"}, "x", "l"));
  auto lower = fx::chain({"A", "B", "C"}, "x", "r");
  for (auto& n : lower.nodes) n.position->y = 150;
  fx::append(g, lower);
  return g;
}

Json report(const ProjectGraph& g) { return report_to_json(compute_report(g)); }

}  // namespace

TEST_CASE("edit op JSON") {
  const std::vector<Json> ops = {
      {{"op", "add_node"}, {"node", project_to_json(fx::graph({fx::op("n", "A", Point{1, 2})}, {}))["nodes"][0]}},
      {{"op", "remove_node"}, {"id", "n"}},
      {{"op", "add_edge"}, {"edge", {{"src", {"a", "out"}}, {"dst", {"b", "in"}}}}},
      {{"op", "move_node"}, {"id", "n"}, {"x", 3.5}, {"y", -1.0}},
      {{"op", "set_param"}, {"id", "n"}, {"name", "gain"}, {"value", 4}},
      {{"op", "apply_encapsulation"}, {"plan_id", "plan_1"}},
      {{"op", "apply_encapsulation"}, {"nodes", {"a", "b"}}},
      {{"op", "apply_layout_opt"}},
  };
  for (const auto& j : ops) {
    const auto op = edit_op_from_json(j);
    CHECK(edit_op_from_json(edit_op_to_json(op)).type == op.type);
    CHECK(edit_op_to_json(edit_op_from_json(edit_op_to_json(op))) == edit_op_to_json(op));
  }
  for (const Json& bad : {Json(1), Json{{"op", "explode"}}, Json{{"op", "remove_node"}},
                          Json{{"op", "set_param"}, {"id", "n"}, {"name", "p"}, {"value", {1, 2}}},
                          Json{{"op", "apply_encapsulation"}}}) {
    try {
      edit_op_from_json(bad);
      FAIL("accepted " << bad.dump());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedDocument);
    }
  }
}

TEST_CASE("session: edits, atomic rejection, undo and redo") {
  SessionManager sm;
  const auto [id, initial] = sm.create(fx::chain({"A", "B"}));
  CHECK(id == "s1");
  CHECK(initial.version == 0);
  CHECK(initial.metrics.cyclomatic == 1);

  EditOp add;
  add.type = EditType::AddEdge;
  add.edge = fx::edge("c1", "c0");
  const auto out = sm.edit(id, add);
  CHECK(out.state.version == 1);
  CHECK(out.state.metrics.cyclomatic == 2);

  const auto before = serialize_project(sm.project(id));
  EditOp dup = add;
  CHECK_THROWS_AS(sm.edit(id, dup), Error);
  EditOp ghost;
  ghost.type = EditType::RemoveNode;
  ghost.id = "zz";
  try {
    sm.edit(id, ghost);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownNode);
  }
  CHECK(serialize_project(sm.project(id)) == before);
  CHECK(sm.state(id).version == 1);

  CHECK(sm.undo(id).metrics.cyclomatic == 1);
  CHECK(serialize_project(sm.project(id)) == serialize_project(fx::chain({"A", "B"})));
  CHECK(sm.redo(id).version == 3);
  CHECK(serialize_project(sm.project(id)) == before);
  CHECK_THROWS_AS(sm.redo(id), Error);

  CHECK_THROWS_AS(static_cast<void>(sm.state("nope")), Error);
  CHECK(sm.close(id));
  CHECK_FALSE(sm.close(id));
  CHECK(sm.create().first == "s2");
}

TEST_CASE("session: undo limit") {
  SessionConfig c;
  c.undo_limit = 3;
  SessionManager sm(nullptr, c);
  const auto id = sm.create(fx::chain({"A"})).first;
  for (int i = 0; i < 6; ++i) {
    EditOp op;
    op.type = EditType::MoveNode;
    op.id = "c0";
    op.to = {static_cast<double>(i), 0};
    sm.edit(id, op);
  }
  for (int i = 0; i < 3; ++i) sm.undo(id);
  try {
    sm.undo(id);
    FAIL("expected NothingToUndo");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NothingToUndo);
  }
  CHECK(sm.project(id).nodes[0].position->x == 2.0);
  c.undo_limit = 0;
  CHECK_THROWS_AS(SessionManager(nullptr, c), Error);
}

TEST_CASE("session: random edits keep metrics in step with an independent recompute") {
  std::mt19937_64 rng(81);
  SessionManager sm;
  const auto id = sm.create(fx::chain({"A", "B", "C"})).first;
  std::vector<std::string> history = {serialize_project(sm.project(id))};
  int next_id = 0;
  int applied = 0, rejected = 0;
  for (int i = 0; i < 150; ++i) {
    const auto g = sm.project(id);
    const auto op = test::random_edit(rng, g, next_id);
    try {
      const auto out = sm.edit(id, op);
      ++applied;
      CHECK(report_to_json(out.state.metrics) == report(sm.project(id)));
      history.push_back(serialize_project(sm.project(id)));
    } catch (const Error&) {
      ++rejected;
      CHECK(serialize_project(sm.project(id)) == serialize_project(g));
    }
  }
  CHECK(applied > 50);
  CHECK(rejected > 5);

  // Walk the whole history back and forward again.
  const auto steps = std::min<std::size_t>(history.size() - 1, sm.config().undo_limit);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto state = sm.undo(id);
    CHECK(serialize_project(sm.project(id)) == history[history.size() - 2 - k]);
    CHECK(report_to_json(state.metrics) == report(sm.project(id)));
  }
  for (std::size_t k = 0; k < steps; ++k) sm.redo(id);
  CHECK(serialize_project(sm.project(id)) == history.back());
}

TEST_CASE("session: clone plans, encapsulation and layout") {
  SessionManager sm;
  const auto id = sm.create(twin_chains()).first;
  const auto plans = sm.clones(id);
  REQUIRE(!plans.empty());
  CHECK(plans[0].first == "plan_1");

  EditOp enc;
  enc.type = EditType::ApplyEncapsulation;
  enc.plan_id = "plan_1";
  const auto out = sm.edit(id, enc);
  REQUIRE(out.delta);
  REQUIRE(out.composite);
  CHECK(out.instance_ids.size() == 2);
  CHECK(out.delta->delta.at("halstead_length") < 0);
  CHECK(sm.project(id).nodes.size() == 2);

  enc.plan_id = "plan_99";
  try {
    sm.edit(id, enc);
    FAIL("expected UnknownPlan");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownPlan);
  }

  EditOp layout;
  layout.type = EditType::ApplyLayoutOpt;
  const auto laid = sm.edit(id, layout);
  REQUIRE(laid.delta);
  CHECK(laid.delta->delta.at("layout_quality") <= 0.0);

  EditOp sel;
  sel.type = EditType::ApplyEncapsulation;
  sel.selection = {"c0", "c1"};
  const auto id2 = sm.create(fx::chain({"A", "B", "C"})).first;
  CHECK(sm.edit(id2, sel).state.metrics.halstead_length < compute_report(fx::chain({"A", "B", "C"})).halstead_length);
}

TEST_CASE("session: snapshots") {
  test::TempDir dir;
  SessionConfig c;
  c.snapshot_dir = dir.path();
  SessionManager sm(nullptr, c);
  const auto id = sm.create(fx::chain({"A", "B"})).first;
  const auto path = dir.file(id + ".json");
  REQUIRE(std::filesystem::exists(path));
  EditOp op;
  op.type = EditType::RemoveNode;
  op.id = "c1";
  sm.edit(id, op);
  CHECK(load_project_file(path) == sm.project(id));
  sm.undo(id);
  CHECK(load_project_file(path) == sm.project(id));
}

TEST_CASE("session: concurrent sessions") {
  SessionManager sm;
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(sm.create(fx::chain({"A"})).first);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 40; ++i) {
        EditOp op;
        op.type = EditType::AddNode;
        op.node = fx::op("t" + std::to_string(i), "B");
        sm.edit(ids[t], op);
        // Shared session hit by everyone.
        EditOp move;
        move.type = EditType::MoveNode;
        move.id = "c0";
        move.to = {static_cast<double>(t), static_cast<double>(i)};
        sm.edit(ids[0], move);
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(sm.project(ids[1]).nodes.size() == 41);
  CHECK(sm.state(ids[1]).version == 40);
  CHECK(sm.state(ids[0]).version == 40 + 160);
}

TEST_CASE("router") {
  SessionManager sm(small_recommender());
  ApiRouter router(sm);
  auto call = [&](const std::string& method, const std::string& path, const Json& body = nullptr) {
    return router.handle({method, path, body.is_null() ? "" : body.dump(), {}});
  };

  CHECK(call("GET", "/health").body["table"] == true);
  auto created = call("POST", "/sessions", {{"project", project_to_json(fx::chain({"A", "B"}))}});
  CHECK(created.status == 201);
  const std::string id = created.body["session_id"];
  CHECK(created.body["displayed"].contains("layout_quality"));

  auto recs = call("POST", "/sessions/" + id + "/recommendations", {{"node_id", "c0"}, {"k", 3}});
  CHECK(recs.status == 200);
  REQUIRE(recs.body.size() >= 1);
  CHECK(recs.body[0]["candidate"]["type"] == "B");

  CHECK(call("POST", "/sessions/" + id + "/recommendations", {{"node_id", "zz"}}).status == 404);
  CHECK(call("POST", "/sessions/" + id + "/recommendations", {{"node_id", "zz"}}).body["error"]["code"] == "UnknownNode");
  CHECK(call("POST", "/sessions/" + id + "/recommendations", Json::object()).status == 400);
  CHECK(call("POST", "/sessions/" + id + "/recommendations", {{"node_id", "c0"}, {"k", 0}}).status == 400);
  CHECK(call("GET", "/sessions/s99/metrics").status == 404);
  CHECK(call("POST", "/sessions/" + id + "/undo").status == 409);
  CHECK(call("GET", "/nowhere").status == 404);
  CHECK(call("PUT", "/sessions").status == 405);
  CHECK(router.handle({"POST", "/sessions/" + id + "/edits", "{oops", {}}).status == 400);
  CHECK(call("POST", "/sessions/" + id + "/edits", {{"op", "add_edge"}, {"edge", {{"src", {"c0", "out"}}, {"dst", {"c1", "in"}}}}}).status == 422);

  auto edited = call("POST", "/sessions/" + id + "/edits", {{"op", "remove_node"}, {"id", "c1"}});
  CHECK(edited.status == 200);
  CHECK(edited.body["version"] == 1);
  CHECK(edited.body["metrics"] == report(sm.project(id)));

  auto metrics = router.handle({"GET", "/sessions/" + id + "/metrics", "", {{"detail", "full"}}});
  CHECK(metrics.body["metrics"] == report(sm.project(id)));
  CHECK(call("GET", "/sessions/" + id + "/metrics").body["metrics"].size() == sm.config().displayed_metrics.size());
  CHECK(call("DELETE", "/sessions/" + id).status == 200);
  CHECK(call("GET", "/sessions/" + id).status == 404);
}

TEST_CASE("http server end to end") {
  SessionManager sm(small_recommender());
  HttpServer server(sm);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread runner([&] { server.run(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto post = [&](const std::string& path, const Json& body) {
    return client.Post(path.c_str(), body.dump(), "application/json");
  };

  auto created = post("/sessions", {{"project", project_to_json(twin_chains())}});
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
  const std::string id = Json::parse(created->body)["session_id"];

  auto clones = client.Get(("/sessions/" + id + "/clones").c_str());
  REQUIRE(clones);
  const auto plans = Json::parse(clones->body);
  REQUIRE(plans.size() >= 1);
  CHECK(plans[0]["plan_id"] == "plan_1");

  auto enc = post("/sessions/" + id + "/encapsulate", {{"plan_id", "plan_1"}});
  REQUIRE(enc);
  CHECK(enc->status == 200);
  const auto body = Json::parse(enc->body);
  CHECK(body["instance_ids"].size() == 2);
  CHECK(body["metrics_delta"]["delta"]["halstead_length"].get<double>() < 0);
  CHECK(body["metrics"] == report(sm.project(id)));

  auto layout = post("/sessions/" + id + "/layout", Json::object());
  REQUIRE(layout);
  CHECK(layout->status == 200);

  auto missing = post("/sessions/" + id + "/edits", {{"op", "move_node"}, {"id", "ghost"}, {"x", 1}, {"y", 2}});
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(Json::parse(missing->body)["error"]["code"] == "UnknownNode");

  auto undo = post("/sessions/" + id + "/undo", Json::object());
  REQUIRE(undo);
  CHECK(undo->status == 200);
  auto redo = post("/sessions/" + id + "/redo", Json::object());
  REQUIRE(redo);
  CHECK(Json::parse(redo->body)["version"] == 4);

  auto options = client.Options(("/sessions/" + id).c_str());
  REQUIRE(options);
  CHECK(options->status == 204);

  server.stop();
  runner.join();
}
