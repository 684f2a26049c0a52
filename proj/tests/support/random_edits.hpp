#pragma once

#include <random>
#include <string>

#include "vpla/session.hpp"

namespace test {

/// Random edit against `g`. Roughly one in six refers to something that
/// does not exist or would break validation.
inline vpla::EditOp random_edit(std::mt19937_64& rng, const vpla::ProjectGraph& g, int& next_id) {
  using vpla::EditType;
  static const char* types[] = {"AND", "OR", "NOT", "TIMER", "ADD"};
  vpla::EditOp op;
  const bool bad = rng() % 6 == 0;
  auto pick = [&]() -> std::string {
    if (bad || g.nodes.empty()) return "ghost";
    return g.nodes[rng() % g.nodes.size()].id;
  };
  switch (g.nodes.size() < 2 ? 0 : rng() % 6) {
    case 0: {
      op.type = EditType::AddNode;
      op.node.id = bad && !g.nodes.empty() ? g.nodes[0].id : "n" + std::to_string(next_id++);
      op.node.type_label = types[rng() % 5];
      op.node.in_ports = {"in"};
      op.node.out_ports = {"out"};
      op.node.position = vpla::Point{static_cast<double>(rng() % 800), static_cast<double>(rng() % 600)};
      op.node.size = vpla::Extent{40.0, 20.0};
      break;
    }
    case 1:
      op.type = EditType::RemoveNode;
      op.id = pick();
      break;
    case 2:
      op.type = EditType::AddEdge;
      op.edge.src = {pick(), "out"};
      op.edge.dst = {pick(), "in"};
      break;
    case 3:
      op.type = EditType::RemoveEdge;
      if (!g.edges.empty() && !bad)
        op.edge = g.edges[rng() % g.edges.size()];
      else
        op.edge.src = {"ghost", "out"}, op.edge.dst = {"ghost", "in"};
      break;
    case 4:
      op.type = EditType::MoveNode;
      op.id = pick();
      op.to = {static_cast<double>(rng() % 800), static_cast<double>(rng() % 600)};
      break;
    default:
      op.type = EditType::SetParam;
      op.id = pick();
      op.param = "k";
      op.value = rng() % 3 == 0 ? vpla::Json(nullptr) : vpla::Json(static_cast<int>(rng() % 10));
      break;
  }
  return op;
}

}  // namespace test
