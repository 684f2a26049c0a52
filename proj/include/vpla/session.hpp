#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vpla/encapsulation.hpp"
#include "vpla/metrics.hpp"
#include "vpla/recommender.hpp"

namespace vpla {

enum class EditType { AddNode, RemoveNode, AddEdge, RemoveEdge, MoveNode, SetParam, ApplyEncapsulation, ApplyLayoutOpt };

struct EditOp {
  EditType type = EditType::AddNode;
  Node node;                  // add_node
  std::string id;             // remove_node, move_node, set_param
  Edge edge;                  // add_edge, remove_edge
  Point to;                   // move_node
  std::string param;          // set_param
  Json value;                 // set_param (null removes the param)
  std::string plan_id;        // apply_encapsulation
  std::vector<std::string> selection;  // apply_encapsulation on a selection
};

/// {"op": "add_node", "node": {...}} and friends; throws MalformedDocument.
EditOp edit_op_from_json(const Json& j);
Json edit_op_to_json(const EditOp& op);

struct SessionConfig {
  std::size_t undo_limit = 100;
  std::vector<std::string> displayed_metrics = {"cyclomatic", "halstead_length", "halstead_vocabulary",
                                                "halstead_difficulty", "layout_quality"};
  LayoutWeights weights;
  int clone_min_occurrences = 2;
  std::size_t clone_max_pattern_nodes = 6;
  RecommendOptions recommend;
  std::uint64_t layout_seed = 1;
  /// When set, the current project of a session is written to
  /// <dir>/<session id>.json after every change.
  std::string snapshot_dir;
};

struct SessionState {
  MetricsReport metrics;
  std::uint64_t version = 0;
};

struct EditOutcome {
  SessionState state;
  std::optional<MetricsDelta> delta;           // encapsulation and layout
  std::optional<CompositeBlockDef> composite;  // encapsulation
  std::vector<std::string> instance_ids;
};

/// In-memory editing sessions. Edits to one session are serialised by a
/// per-session lock; distinct sessions proceed independently. A rejected
/// edit leaves the session untouched.
class SessionManager {
 public:
  explicit SessionManager(std::shared_ptr<const Recommender> recommender = nullptr, SessionConfig config = {});

  std::pair<std::string, SessionState> create(std::optional<ProjectGraph> project = std::nullopt);
  bool close(const std::string& id);
  [[nodiscard]] std::vector<std::string> session_ids() const;

  [[nodiscard]] ProjectGraph project(const std::string& id) const;
  [[nodiscard]] SessionState state(const std::string& id) const;

  EditOutcome edit(const std::string& id, const EditOp& op);
  SessionState undo(const std::string& id);
  SessionState redo(const std::string& id);

  [[nodiscard]] std::vector<Recommendation> recommend(const std::string& id, const std::string& node,
                                                      std::optional<std::size_t> k = std::nullopt) const;
  /// Current clone plans with their ids ("plan_1", ...), cached per version.
  std::vector<std::pair<std::string, EncapsulationPlan>> clones(const std::string& id);

  [[nodiscard]] Json displayed_metrics(const MetricsReport& report) const;
  [[nodiscard]] const SessionConfig& config() const { return config_; }
  [[nodiscard]] bool has_table() const { return recommender_ != nullptr; }

 private:
  struct Session {
    mutable std::mutex mutex;
    ProjectGraph graph;
    MetricsReport metrics;
    std::uint64_t version = 0;
    std::deque<ProjectGraph> undo;
    std::vector<ProjectGraph> redo;
    std::optional<std::uint64_t> plans_version;
    std::vector<std::pair<std::string, EncapsulationPlan>> plans;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  void commit(Session& s, ProjectGraph next, bool keep_redo = false);
  void snapshot(const std::string& id, const Session& s) const;
  std::vector<std::pair<std::string, EncapsulationPlan>>& plans_locked(Session& s);

  std::shared_ptr<const Recommender> recommender_;
  SessionConfig config_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace vpla
