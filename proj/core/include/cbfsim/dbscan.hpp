#ifndef CBFSIM_DBSCAN_HPP
#define CBFSIM_DBSCAN_HPP

#include <vector>

#include "cbfsim/types.hpp"

namespace cbfsim {

struct ClusterParams {
  Scalar eps = 0.3;  // neighborhood radius [m]
  int min_pts = 3;   // core-point threshold, inclusive of the point itself
};

/// Per-point labels: 0 marks noise, clusters are numbered 1..k.
struct ClusterLabels {
  static constexpr int kNoise = 0;
  std::vector<int> label;
  int k = 0;
};

/// Standard density-based clustering. A point is core iff at least min_pts
/// points (itself included) lie within eps; clusters are maximal
/// density-connected sets; border points attach to the first discovered core
/// cluster; unreachable points are labeled noise.
ClusterLabels dbscan(const std::vector<Vec2>& points, const ClusterParams& params);

}  // namespace cbfsim

#endif  // CBFSIM_DBSCAN_HPP
