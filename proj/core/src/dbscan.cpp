#include "cbfsim/dbscan.hpp"

#include <deque>

namespace cbfsim {

namespace {

std::vector<int> region_query(const std::vector<Vec2>& pts, int i, Scalar eps2) {
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
    if ((pts[i] - pts[j]).squaredNorm() <= eps2) out.push_back(j);
  }
  return out;
}

}  // namespace

ClusterLabels dbscan(const std::vector<Vec2>& points, const ClusterParams& params) {
  if (params.eps <= 0.0 || params.min_pts < 1) {
    throw ConfigError("dbscan: require eps > 0 and min_pts >= 1");
  }
  constexpr int kUndefined = -1;
  const int n = static_cast<int>(points.size());
  const Scalar eps2 = params.eps * params.eps;

  ClusterLabels result;
  result.label.assign(n, kUndefined);

  for (int i = 0; i < n; ++i) {
    if (result.label[i] != kUndefined) continue;
    std::vector<int> neighbors = region_query(points, i, eps2);
    if (static_cast<int>(neighbors.size()) < params.min_pts) {
      result.label[i] = ClusterLabels::kNoise;
      continue;
    }
    const int cluster = ++result.k;
    result.label[i] = cluster;
    std::deque<int> frontier(neighbors.begin(), neighbors.end());
    while (!frontier.empty()) {
      const int j = frontier.front();
      frontier.pop_front();
      if (result.label[j] == ClusterLabels::kNoise) result.label[j] = cluster;  // border point
      if (result.label[j] != kUndefined) continue;
      result.label[j] = cluster;
      std::vector<int> more = region_query(points, j, eps2);
      if (static_cast<int>(more.size()) >= params.min_pts) {
        frontier.insert(frontier.end(), more.begin(), more.end());
      }
    }
  }
  return result;
}

}  // namespace cbfsim
