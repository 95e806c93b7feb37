#ifndef CBFSIM_BARRIER_HPP
#define CBFSIM_BARRIER_HPP

#include <vector>

#include "cbfsim/dbscan.hpp"
#include "cbfsim/lidar.hpp"
#include "cbfsim/robust_fit.hpp"
#include "cbfsim/types.hpp"

namespace cbfsim {

/// Barrier fitted from one scan cluster: h(p) = sign * (y_l - F(x_l)) with
/// (x_l, y_l) the position in the model's local frame. The sign is chosen so
/// the emitting agent's side is positive at fit time.
struct ILCBF {
  PolynomialModel model;
  int sign = +1;
  Scalar stamp = 0.0;
};

Scalar eval_h(const ILCBF& cbf, const Vec2& p);

/// h and its chain along the double-integrator dynamics:
///   h_dot   = dh/dp . v
///   h_ddot  = accel_row . a + drift   (a = acceleration in the world frame)
struct HDerivatives {
  Scalar h = 0.0;
  Scalar h_dot = 0.0;
  Vec2 accel_row = Vec2::Zero();
  Scalar drift = 0.0;
};

HDerivatives eval_h_derivs(const ILCBF& cbf, const AgentState& state);

/// Clusters the cloud, fits one robust quadratic per cluster in the cluster's
/// principal-axis frame, and orients each barrier toward the agent. Clusters
/// that are too small (< 4 points) or geometrically degenerate are skipped.
std::vector<ILCBF> learn_ilcbfs(const PointCloud& cloud, const Vec2& agent_p,
                                const ClusterParams& cluster_params,
                                const RobustFitConfig& fit_cfg);

/// Points sampled along the barrier's zero-level set, in world coordinates,
/// over the local abscissa interval covered by [x_lo, x_hi].
std::vector<Vec2> barrier_zero_level(const ILCBF& cbf, Scalar x_lo, Scalar x_hi, int n);

}  // namespace cbfsim

#endif  // CBFSIM_BARRIER_HPP
