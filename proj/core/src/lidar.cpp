#include "cbfsim/lidar.hpp"

#include <cmath>

namespace cbfsim {

namespace {

Scalar truncated_normal(std::mt19937_64& rng, std::normal_distribution<Scalar>& dist) {
  for (int i = 0; i < 64; ++i) {
    const Scalar z = dist(rng);
    if (std::abs(z) <= 3.0) return z;
  }
  return 0.0;
}

}  // namespace

PointCloud scan(const Vec2& agent_p, const OccupancyGrid& grid, const LidarConfig& cfg,
                std::mt19937_64& rng, Scalar stamp) {
  if (cfg.radius <= 0.0 || cfg.beams < 8 || cfg.sigma < 0.0) {
    throw ConfigError("lidar config: require radius > 0, beams >= 8, sigma >= 0");
  }
  if (grid.occupied(agent_p)) {
    throw AgentInObstacle("scan requested from inside an occupied cell");
  }

  PointCloud cloud;
  cloud.stamp = stamp;
  cloud.points.reserve(cfg.beams);
  std::normal_distribution<Scalar> dist(0.0, 1.0);

  const Scalar step = grid.spec().resolution * 0.5;
  for (int b = 0; b < cfg.beams; ++b) {
    const Scalar angle = 2.0 * M_PI * b / cfg.beams;
    const Vec2 dir(std::cos(angle), std::sin(angle));

    Scalar prev_r = 0.0;
    Scalar hit_r = -1.0;
    for (Scalar r = step; r <= cfg.radius + 1e-12; r += step) {
      if (grid.occupied(agent_p + r * dir)) {
        hit_r = r;
        break;
      }
      prev_r = r;
    }
    if (hit_r < 0.0) continue;

    // Bisect [prev_r, hit_r] onto the free/occupied boundary.
    Scalar lo = prev_r, hi = hit_r;
    for (int it = 0; it < 60; ++it) {
      const Scalar mid = 0.5 * (lo + hi);
      if (grid.occupied(agent_p + mid * dir)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    Vec2 hit = agent_p + hi * dir;
    if (cfg.sigma > 0.0) hit.y() += cfg.sigma * truncated_normal(rng, dist);
    cloud.points.push_back(hit);
  }
  return cloud;
}

}  // namespace cbfsim
