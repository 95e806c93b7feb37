#ifndef CBFSIM_LIDAR_HPP
#define CBFSIM_LIDAR_HPP

#include <random>
#include <stdexcept>
#include <vector>

#include "cbfsim/types.hpp"
#include "cbfsim/world.hpp"

namespace cbfsim {

struct LidarConfig {
  Scalar radius = 2.0;  // sensing radius [m]
  int beams = 72;       // equally spaced rays over 2*pi
  Scalar sigma = 0.01;  // noise standard deviation on the y hit coordinate [m]
};

/// Noisy boundary hits from one scan, in the world frame.
struct PointCloud {
  std::vector<Vec2> points;
  Scalar stamp = 0.0;
};

/// Thrown when a scan is requested from inside an occupied cell.
class AgentInObstacle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Casts cfg.beams rays from agent_p; each ray marches at half of the grid
/// resolution to the first occupied cell within cfg.radius and the hit is
/// refined onto the occupancy boundary by bisection. Gaussian noise
/// N(0, sigma^2), truncated at 3 sigma, is added to the y coordinate of each
/// hit. Beams with no hit produce no point.
PointCloud scan(const Vec2& agent_p, const OccupancyGrid& grid, const LidarConfig& cfg,
                std::mt19937_64& rng, Scalar stamp = 0.0);

}  // namespace cbfsim

#endif  // CBFSIM_LIDAR_HPP
