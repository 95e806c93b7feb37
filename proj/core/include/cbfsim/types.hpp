#ifndef CBFSIM_TYPES_HPP
#define CBFSIM_TYPES_HPP

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace cbfsim {

using Scalar = double;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Planar rotation by `angle` radians.
inline Mat2 rot2(Scalar angle) {
  const Scalar c = std::cos(angle), s = std::sin(angle);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

inline bool finite(const Vec2& x) {
  return std::isfinite(x.x()) && std::isfinite(x.y());
}

/// Componentwise clamp to the infinity-norm ball of radius `bound`.
inline Vec2 clamp_inf(const Vec2& x, Scalar bound) {
  return Vec2(std::clamp(x.x(), -bound, bound), std::clamp(x.y(), -bound, bound));
}

/// Position/velocity pair of one planar double-integrator agent.
struct AgentState {
  Vec2 p = Vec2::Zero();  // [m]
  Vec2 v = Vec2::Zero();  // [m/s]
};

/// Per-agent actuation and speed limits (infinity norm).
struct Bounds {
  Scalar v_max = 6.0;  // [m/s]
  Scalar u_max = 5.0;  // [m/s^2]
};

/// Thrown when a scenario file or programmatic configuration is invalid.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cbfsim

#endif  // CBFSIM_TYPES_HPP
