#include <fstream>
#include <sstream>

#include "vpla/graph_json.hpp"
#include "vpla/mining.hpp"

namespace vpla {

Json table_to_json(const StructuralTable& t) {
  Json prov = {{"corpus_id", t.provenance.corpus_id},
               {"minsup", t.provenance.minsup},
               {"max_pattern_nodes", t.provenance.max_pattern_nodes},
               {"corpus_size", t.provenance.corpus_size},
               {"expand_edge_params", t.provenance.expand_edge_params},
               {"mined_at", t.provenance.mined_at}};
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json edges = Json::array();
    for (const auto& e : r.candidate.edges) edges.push_back({{"dir", to_string(e.dir)}, {"node", e.upstream_node}});
    Json cand = {{"kind", to_string(r.candidate.kind)}, {"type", r.candidate.type_label}, {"edges", edges}};
    if (r.candidate.composite) cand["composite"] = true;
    rows.push_back({{"upstream", project_to_json(r.upstream)},
                    {"upstream_code", r.upstream_code},
                    {"candidate", cand},
                    {"confidence", r.confidence},
                    {"support_full", r.support_full},
                    {"support_upstream", r.support_upstream}});
  }
  return {{"provenance", prov}, {"rows", rows}};
}

StructuralTable table_from_json(const Json& j) {
  StructuralTable t;
  try {
    const Json& prov = j.at("provenance");
    t.provenance.corpus_id = prov.value("corpus_id", "");
    t.provenance.minsup = prov.value("minsup", 0);
    t.provenance.max_pattern_nodes = prov.value("max_pattern_nodes", std::size_t{0});
    t.provenance.corpus_size = prov.value("corpus_size", std::size_t{0});
    t.provenance.expand_edge_params = prov.value("expand_edge_params", false);
    t.provenance.mined_at = prov.value("mined_at", "");
    for (const auto& r : j.at("rows")) {
      StructuralTableRow row;
      row.upstream = project_from_json(r.at("upstream"));
      row.upstream_code = r.contains("upstream_code") ? r.at("upstream_code").get<std::string>()
                                                      : canonical_code(row.upstream);
      const Json& c = r.at("candidate");
      row.candidate.kind = node_kind_from_string(c.at("kind").get<std::string>());
      row.candidate.type_label = c.at("type").get<std::string>();
      row.candidate.composite = c.value("composite", false);
      for (const auto& e : c.at("edges"))
        row.candidate.edges.push_back(
            {candidate_direction_from_string(e.at("dir").get<std::string>()), e.at("node").get<std::string>()});
      std::sort(row.candidate.edges.begin(), row.candidate.edges.end());
      row.confidence = r.at("confidence").get<double>();
      row.support_full = r.at("support_full").get<int>();
      row.support_upstream = r.at("support_upstream").get<int>();
      if (!(row.confidence > 0.0 && row.confidence <= 1.0))
        throw Error(ErrorCode::MalformedDocument, "row confidence outside (0, 1]");
      t.rows.push_back(std::move(row));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("structural table: ") + e.what());
  }
  return t;
}

void save_table(const StructuralTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << table_to_json(t).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

StructuralTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, path + ": " + e.what());
  }
  return table_from_json(j);
}

}  // namespace vpla
