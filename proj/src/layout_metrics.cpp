#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "vpla/metrics.hpp"

namespace vpla {

namespace {

struct Segment {
  std::size_t a, b;  // node indices
  Point p, q;
};

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) { return (v > 0) - (v < 0); }

// Proper crossing, or collinear segments sharing a stretch of positive length.
bool segments_overlap(const Segment& s, const Segment& t) {
  int o1 = sign(cross(s.p, s.q, t.p));
  int o2 = sign(cross(s.p, s.q, t.q));
  int o3 = sign(cross(t.p, t.q, s.p));
  int o4 = sign(cross(t.p, t.q, s.q));
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 != 0 || o2 != 0) return false;
  // Collinear: project on the dominant axis and test interval overlap.
  bool use_x = std::abs(s.q.x - s.p.x) >= std::abs(s.q.y - s.p.y);
  auto coord = [use_x](const Point& p) { return use_x ? p.x : p.y; };
  double s0 = std::min(coord(s.p), coord(s.q)), s1 = std::max(coord(s.p), coord(s.q));
  double t0 = std::min(coord(t.p), coord(t.q)), t1 = std::max(coord(t.p), coord(t.q));
  return std::min(s1, t1) - std::max(s0, t0) > 0.0;
}

double population_variance(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / xs.size();
}

}  // namespace

std::map<std::string, double> layout_metrics(const ProjectGraph& g) {
  for (const auto& n : g.nodes)
    if (!n.position || !n.size) throw Error(ErrorCode::MissingLayout, n.id);

  std::map<std::string, double> m;
  for (const auto& name : layout_metric_names()) m[name] = 0.0;
  const std::size_t n = g.nodes.size();
  if (n < 2) return m;

  std::vector<Point> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = *g.nodes[i].position;
  GraphIndex index(g);

  std::vector<Segment> segments;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    std::size_t a = index.source(e), b = index.target(e);
    if (a != b) segments.push_back({a, b, c[a], c[b]});
  }

  // Angular resolution: shortfall of the smallest angle between incident
  // edges against the ideal 2*pi/deg, normalised by a full turn.
  {
    constexpr double kTurn = 2.0 * std::numbers::pi;
    std::vector<std::set<std::size_t>> neighbours(n);
    for (const auto& s : segments) {
      neighbours[s.a].insert(s.b);
      neighbours[s.b].insert(s.a);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t deg = neighbours[i].size();
      if (deg < 2) continue;
      std::vector<double> angles;
      for (auto j : neighbours[i]) angles.push_back(std::atan2(c[j].y - c[i].y, c[j].x - c[i].x));
      std::sort(angles.begin(), angles.end());
      double min_gap = kTurn - (angles.back() - angles.front());
      for (std::size_t k = 1; k < angles.size(); ++k) min_gap = std::min(min_gap, angles[k] - angles[k - 1]);
      total += std::max(0.0, kTurn / deg - min_gap) / kTurn;
    }
    m[layout_names::kAngularResolution] = total / n;
  }

  // Aspect ratio of the bounding box around all node rectangles.
  {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
    double x1 = -x0, y1 = -x0;
    for (std::size_t i = 0; i < n; ++i) {
      const Extent& s = *g.nodes[i].size;
      x0 = std::min(x0, c[i].x - s.w / 2);
      x1 = std::max(x1, c[i].x + s.w / 2);
      y0 = std::min(y0, c[i].y - s.h / 2);
      y1 = std::max(y1, c[i].y + s.h / 2);
    }
    m[layout_names::kAspectRatio] = std::abs(std::log((x1 - x0) / (y1 - y0)));
  }

  {
    int overlaps = 0;
    for (std::size_t i = 0; i < segments.size(); ++i)
      for (std::size_t j = i + 1; j < segments.size(); ++j) {
        const auto& s = segments[i];
        const auto& t = segments[j];
        if (s.a == t.a || s.a == t.b || s.b == t.a || s.b == t.b) continue;
        if (segments_overlap(s, t)) ++overlaps;
      }
    m[layout_names::kEdgeOverlaps] = overlaps;
  }

  {
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) nearest[i] = std::min(nearest[i], std::hypot(c[i].x - c[j].x, c[i].y - c[j].y));
    m[layout_names::kNearestNeighbourVariance] = population_variance(nearest);
  }

  {
    std::vector<double> lengths;
    for (const auto& s : segments) lengths.push_back(std::hypot(s.p.x - s.q.x, s.p.y - s.q.y));
    double mean = 0.0;
    for (double l : lengths) mean += l;
    if (!lengths.empty()) mean /= lengths.size();
    m[layout_names::kUniformEdges] = mean > 0.0 ? population_variance(lengths) / (mean * mean) : 0.0;
  }

  double x0 = c[0].x, x1 = c[0].x, y0 = c[0].y, y1 = c[0].y;
  for (const auto& p : c) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }

  // Concentration: nodes sharing a cell of a ceil(sqrt N)^2 grid.
  {
    const auto cells = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    auto cell = [cells](double v, double lo, double hi) -> std::size_t {
      if (hi <= lo) return 0;
      auto k = static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * cells));
      return std::min(k, cells - 1);
    };
    std::map<std::pair<std::size_t, std::size_t>, int> counts;
    for (const auto& p : c) ++counts[{cell(p.x, x0, x1), cell(p.y, y0, y1)}];
    double crowd = 0.0;
    for (const auto& [key, count] : counts) crowd += std::max(0, count - 1);
    m[layout_names::kConcentration] = crowd / n;
  }

  // Homogeneity: spread of node counts over the four bounding-box quadrants.
  {
    const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
    int quadrant[4] = {0, 0, 0, 0};
    for (const auto& p : c) ++quadrant[(p.x < cx ? 0 : 1) + (p.y < cy ? 0 : 2)];
    auto [lo, hi] = std::minmax_element(std::begin(quadrant), std::end(quadrant));
    m[layout_names::kHomogeneity] = static_cast<double>(*hi - *lo) / n;
  }
  return m;
}

}  // namespace vpla
