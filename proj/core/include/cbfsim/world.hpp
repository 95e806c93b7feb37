#ifndef CBFSIM_WORLD_HPP
#define CBFSIM_WORLD_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cbfsim/types.hpp"

namespace cbfsim {

/// Deterministic 1D oscillation of an obstacle: a symmetric triangle wave
/// along one axis with slope +/-speed, bounded by +/-amplitude.
struct ObstacleMotion {
  int axis = 1;            // 0 = x, 1 = y
  Scalar speed = 0.0;      // [m/s], > 0
  Scalar amplitude = 0.0;  // [m], > 0
  Scalar phase = 0.0;      // offset in wave phase units, [0, 4)
};

/// Convex polygonal obstacle, optionally oscillating.
struct Obstacle {
  std::vector<Vec2> polygon;  // CCW convex vertices, at reference pose
  std::optional<ObstacleMotion> motion;

  static Obstacle box(const Vec2& lo, const Vec2& hi);
};

/// Displacement of the obstacle at time t relative to its reference pose.
/// Static obstacles return zero. Periodic with period 4*amplitude/speed.
Vec2 obstacle_displacement(const Obstacle& obs, Scalar t);

/// Vertices of the obstacle translated to its pose at time t.
std::vector<Vec2> obstacle_polygon_at(const Obstacle& obs, Scalar t);

/// Euclidean distance from point to the obstacle at time t (0 if inside).
Scalar distance_to_obstacle(const Obstacle& obs, const Vec2& p, Scalar t);

struct GridSpec {
  Vec2 origin = Vec2::Zero();  // world coordinates of cell (0,0) lower-left corner
  Scalar resolution = 0.05;    // [m/cell]
  int nx = 0, ny = 0;

  static GridSpec from_extent(const Vec2& lo, const Vec2& hi, Scalar resolution);
};

/// Boolean occupancy over a regular grid, recomputed from obstacles per step.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(const GridSpec& spec)
      : spec_(spec), cells_(static_cast<size_t>(spec.nx) * spec.ny, 0) {}

  const GridSpec& spec() const { return spec_; }

  bool in_bounds(const Vec2& p) const;
  /// Occupancy of the cell containing p; out-of-bounds points read as free.
  bool occupied(const Vec2& p) const;

  uint8_t cell(int ix, int iy) const { return cells_[idx(ix, iy)]; }
  void set_cell(int ix, int iy, uint8_t v) { cells_[idx(ix, iy)] = v; }
  const std::vector<uint8_t>& cells() const { return cells_; }

  /// Stamps one obstacle at time t; cells are occupied iff their open
  /// rectangle overlaps the polygon (touching edges stay free).
  void stamp(const Obstacle& obs, Scalar t);

  bool operator==(const OccupancyGrid& other) const {
    return cells_ == other.cells_;
  }

 private:
  size_t idx(int ix, int iy) const { return static_cast<size_t>(iy) * spec_.nx + ix; }

  GridSpec spec_;
  std::vector<uint8_t> cells_;
};

/// Rasterizes all obstacles at time t. Throws ConfigError if an obstacle can
/// leave the grid extent at any reachable displacement.
OccupancyGrid rasterize(const std::vector<Obstacle>& obstacles, Scalar t, const GridSpec& spec);

}  // namespace cbfsim

#endif  // CBFSIM_WORLD_HPP
