#include "cbfsim/world.hpp"

#include <algorithm>
#include <cmath>

namespace cbfsim {

Obstacle Obstacle::box(const Vec2& lo, const Vec2& hi) {
  Obstacle o;
  o.polygon = {Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y()), Vec2(hi.x(), hi.y()),
               Vec2(lo.x(), hi.y())};
  return o;
}

Vec2 obstacle_displacement(const Obstacle& obs, Scalar t) {
  if (!obs.motion || obs.motion->speed <= 0.0 || obs.motion->amplitude <= 0.0) {
    return Vec2::Zero();
  }
  const ObstacleMotion& m = *obs.motion;
  // Phase advances by 1 per amplitude traversed; full period is 4 phase units.
  Scalar s = std::fmod(m.speed * t / m.amplitude + m.phase, 4.0);
  if (s < 0.0) s += 4.0;
  Scalar d;
  if (s < 1.0) {
    d = s;
  } else if (s < 3.0) {
    d = 2.0 - s;
  } else {
    d = s - 4.0;
  }
  Vec2 disp = Vec2::Zero();
  disp[m.axis] = m.amplitude * d;
  return disp;
}

std::vector<Vec2> obstacle_polygon_at(const Obstacle& obs, Scalar t) {
  const Vec2 d = obstacle_displacement(obs, t);
  std::vector<Vec2> out = obs.polygon;
  for (Vec2& v : out) v += d;
  return out;
}

namespace {

Scalar point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const Scalar s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

bool point_in_convex(const std::vector<Vec2>& poly, const Vec2& p) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Scalar cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    if (cross < 0.0) return false;  // CCW polygons
  }
  return true;
}

// Strict overlap between a convex polygon and an axis-aligned rectangle
// (touching boundaries do not count as overlap).
bool polygon_rect_overlap(const std::vector<Vec2>& poly, const Vec2& rlo, const Vec2& rhi) {
  constexpr Scalar kEps = 1e-12;
  // Separating axis over the rectangle's axes.
  Scalar pxmin = poly[0].x(), pxmax = poly[0].x(), pymin = poly[0].y(), pymax = poly[0].y();
  for (const Vec2& v : poly) {
    pxmin = std::min(pxmin, v.x());
    pxmax = std::max(pxmax, v.x());
    pymin = std::min(pymin, v.y());
    pymax = std::max(pymax, v.y());
  }
  if (pxmax <= rlo.x() + kEps || pxmin >= rhi.x() - kEps) return false;
  if (pymax <= rlo.y() + kEps || pymin >= rhi.y() - kEps) return false;
  // Separating axis over the polygon's edge normals.
  const Vec2 corners[4] = {rlo, Vec2(rhi.x(), rlo.y()), rhi, Vec2(rlo.x(), rhi.y())};
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2 normal(-(b.y() - a.y()), b.x() - a.x());
    Scalar polymin = normal.dot(poly[0]), polymax = polymin;
    for (const Vec2& v : poly) {
      const Scalar d = normal.dot(v);
      polymin = std::min(polymin, d);
      polymax = std::max(polymax, d);
    }
    Scalar rectmin = normal.dot(corners[0]), rectmax = rectmin;
    for (const Vec2& c : corners) {
      const Scalar d = normal.dot(c);
      rectmin = std::min(rectmin, d);
      rectmax = std::max(rectmax, d);
    }
    const Scalar scale = normal.norm();
    if (polymax <= rectmin + kEps * scale || polymin >= rectmax - kEps * scale) return false;
  }
  return true;
}

}  // namespace

Scalar distance_to_obstacle(const Obstacle& obs, const Vec2& p, Scalar t) {
  const std::vector<Vec2> poly = obstacle_polygon_at(obs, t);
  if (point_in_convex(poly, p)) return 0.0;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  }
  return best;
}

GridSpec GridSpec::from_extent(const Vec2& lo, const Vec2& hi, Scalar resolution) {
  if (resolution <= 0.0) throw ConfigError("grid resolution must be > 0");
  GridSpec s;
  s.origin = lo;
  s.resolution = resolution;
  s.nx = static_cast<int>(std::ceil((hi.x() - lo.x()) / resolution - 1e-9));
  s.ny = static_cast<int>(std::ceil((hi.y() - lo.y()) / resolution - 1e-9));
  if (s.nx <= 0 || s.ny <= 0) throw ConfigError("grid extent is empty");
  return s;
}

bool OccupancyGrid::in_bounds(const Vec2& p) const {
  const Scalar fx = (p.x() - spec_.origin.x()) / spec_.resolution;
  const Scalar fy = (p.y() - spec_.origin.y()) / spec_.resolution;
  return fx >= 0.0 && fy >= 0.0 && fx < spec_.nx && fy < spec_.ny;
}

bool OccupancyGrid::occupied(const Vec2& p) const {
  const Scalar fx = (p.x() - spec_.origin.x()) / spec_.resolution;
  const Scalar fy = (p.y() - spec_.origin.y()) / spec_.resolution;
  const int ix = static_cast<int>(std::floor(fx));
  const int iy = static_cast<int>(std::floor(fy));
  if (ix < 0 || iy < 0 || ix >= spec_.nx || iy >= spec_.ny) return false;
  return cells_[idx(ix, iy)] != 0;
}

void OccupancyGrid::stamp(const Obstacle& obs, Scalar t) {
  const std::vector<Vec2> poly = obstacle_polygon_at(obs, t);
  Scalar xmin = poly[0].x(), xmax = xmin, ymin = poly[0].y(), ymax = ymin;
  for (const Vec2& v : poly) {
    xmin = std::min(xmin, v.x());
    xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  const Scalar res = spec_.resolution;
  int ix0 = std::max(0, static_cast<int>(std::floor((xmin - spec_.origin.x()) / res)));
  int iy0 = std::max(0, static_cast<int>(std::floor((ymin - spec_.origin.y()) / res)));
  int ix1 = std::min(spec_.nx - 1, static_cast<int>(std::floor((xmax - spec_.origin.x()) / res)));
  int iy1 = std::min(spec_.ny - 1, static_cast<int>(std::floor((ymax - spec_.origin.y()) / res)));
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const Vec2 clo = spec_.origin + res * Vec2(ix, iy);
      const Vec2 chi = clo + Vec2(res, res);
      if (polygon_rect_overlap(poly, clo, chi)) set_cell(ix, iy, 1);
    }
  }
}

OccupancyGrid rasterize(const std::vector<Obstacle>& obstacles, Scalar t, const GridSpec& spec) {
  const Vec2 world_hi = spec.origin + spec.resolution * Vec2(spec.nx, spec.ny);
  for (const Obstacle& obs : obstacles) {
    Scalar reach = obs.motion ? obs.motion->amplitude : 0.0;
    for (const Vec2& v : obs.polygon) {
      const int axis = obs.motion ? obs.motion->axis : 0;
      Vec2 lo = v, hi = v;
      lo[axis] -= reach;
      hi[axis] += reach;
      if (lo.x() < spec.origin.x() - 1e-9 || lo.y() < spec.origin.y() - 1e-9 ||
          hi.x() > world_hi.x() + 1e-9 || hi.y() > world_hi.y() + 1e-9) {
        throw ConfigError("obstacle can leave the grid extent");
      }
    }
  }
  OccupancyGrid grid(spec);
  for (const Obstacle& obs : obstacles) grid.stamp(obs, t);
  return grid;
}

}  // namespace cbfsim
