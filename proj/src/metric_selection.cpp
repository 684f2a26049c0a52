#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

#include "vpla/metrics.hpp"

namespace vpla {

std::vector<double> MetricTable::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

MetricTable to_metric_table(const std::vector<MetricsReport>& reports) {
  MetricTable t;
  // Only metrics present in every report take part.
  std::vector<std::string> names = metric_names();
  for (const auto& r : reports) {
    std::set<std::string> have;
    for (const auto& [k, v] : r.values()) have.insert(k);
    names.erase(std::remove_if(names.begin(), names.end(), [&](const std::string& n) { return !have.count(n); }),
                names.end());
  }
  t.names = names;
  for (const auto& r : reports) {
    std::map<std::string, double> values;
    for (const auto& [k, v] : r.values()) values[k] = v;
    std::vector<double> row;
    for (const auto& n : names) row.push_back(values.at(n));
    t.row_ids.push_back(r.project_id);
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

MetricTable read_metrics_csv(std::istream& in) {
  MetricTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedDocument, "empty metrics CSV");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "project_id") throw Error(ErrorCode::MalformedDocument, "bad CSV header");
  t.names.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw Error(ErrorCode::MalformedDocument, "ragged CSV row");
    std::vector<double> row;
    bool complete = true;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      if (cells[j].empty()) {
        complete = false;
        break;
      }
      try {
        row.push_back(std::stod(cells[j]));
      } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedDocument, "non-numeric cell '" + cells[j] + "'");
      }
    }
    if (!complete) continue;
    t.row_ids.push_back(cells[0]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    double d = x - mean;
    mean += d / k;
    m2 += d * (x - mean);
  }
  return m2 / (xs.size() - 1);
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "series length mismatch");
  // Welford-style running co-moments.
  double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    mx += dx / k;
    my += dy / k;
    sxx += dx * (xs[i] - mx);
    syy += dy * (ys[i] - my);
    sxy += dx * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricSelection select_metrics(const MetricTable& input, const SelectionOptions& options) {
  if (input.rows.size() < 3) throw Error(ErrorCode::TooFewSamples, std::to_string(input.rows.size()) + " samples");
  if (!(options.variance_floor >= 0.0)) throw Error(ErrorCode::InvalidArgument, "variance floor must be >= 0");
  if (!(options.correlation_threshold > 0.0 && options.correlation_threshold <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "correlation threshold must be in (0, 1]");

  // Canonical row order makes every floating-point sum independent of the
  // order the reports arrived in.
  MetricTable table = input;
  std::vector<std::size_t> perm(table.rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (table.rows[a] != table.rows[b]) return table.rows[a] < table.rows[b];
    return table.row_ids[a] < table.row_ids[b];
  });
  std::vector<std::vector<double>> sorted_rows;
  for (auto i : perm) sorted_rows.push_back(input.rows[i]);
  table.rows = std::move(sorted_rows);

  MetricSelection sel;
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < table.names.size(); ++j) {
    double v = sample_variance(table.column(j));
    sel.variances[table.names[j]] = v;
    if (v < options.variance_floor || v == 0.0)
      sel.dropped_zero_variance.push_back(table.names[j]);
    else
      live.push_back(j);
  }

  // Union-find over |r| >= tau.
  std::vector<std::size_t> parent(live.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < live.size(); ++a)
    for (std::size_t b = a + 1; b < live.size(); ++b) {
      double r = pearson(table.column(live[a]), table.column(live[b]));
      if (std::abs(r) >= options.correlation_threshold) parent[find(b)] = find(a);
    }

  auto rank = [&](const std::string& name) {
    auto it = std::find(options.priority.begin(), options.priority.end(), name);
    return std::make_pair(static_cast<std::size_t>(it - options.priority.begin()), name);
  };

  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t a = 0; a < live.size(); ++a) groups[find(a)].push_back(table.names[live[a]]);
  for (auto& [root, members] : groups) {
    std::string best = *std::min_element(members.begin(), members.end(),
                                         [&](const auto& x, const auto& y) { return rank(x) < rank(y); });
    sel.kept.push_back(best);
    for (const auto& m : members)
      if (m != best) sel.dropped_redundant.push_back(m);
    if (members.size() > 1) {
      std::sort(members.begin(), members.end());
      sel.redundancy_groups.push_back({members, best});
    }
  }
  std::sort(sel.kept.begin(), sel.kept.end());
  std::sort(sel.dropped_zero_variance.begin(), sel.dropped_zero_variance.end());
  std::sort(sel.dropped_redundant.begin(), sel.dropped_redundant.end());
  std::sort(sel.redundancy_groups.begin(), sel.redundancy_groups.end(),
            [](const auto& a, const auto& b) { return a.members < b.members; });
  return sel;
}

MetricSelection select_metrics(const std::vector<MetricsReport>& reports, const SelectionOptions& options) {
  return select_metrics(to_metric_table(reports), options);
}

Json selection_to_json(const MetricSelection& s) {
  Json j;
  j["kept"] = s.kept;
  j["dropped_zero_variance"] = s.dropped_zero_variance;
  j["dropped_redundant"] = s.dropped_redundant;
  Json groups = Json::array();
  for (const auto& g : s.redundancy_groups) groups.push_back({{"members", g.members}, {"representative", g.representative}});
  j["redundancy_groups"] = groups;
  Json var = Json::object();
  for (const auto& [k, v] : s.variances) var[k] = v;
  j["variances"] = var;
  return j;
}

}  // namespace vpla
