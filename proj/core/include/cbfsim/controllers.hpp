#ifndef CBFSIM_CONTROLLERS_HPP
#define CBFSIM_CONTROLLERS_HPP

#include <Eigen/Core>
#include <vector>

#include "cbfsim/types.hpp"

namespace cbfsim {

/// Goal-regulation law u = -k_p (p - goal) - k_d v.
Vec2 pd_nominal(const AgentState& state, const Vec2& goal, Scalar k_p = 0.1, Scalar k_d = 0.2);

/// Leader-follower chain over six nodes (virtual goal node plus five agents)
/// with fixed reference edge offsets; the default offsets place the leader
/// above a diamond of four followers.
struct FormationSpec {
  Eigen::VectorXd z_ref;  // 10 = 5 edges x 2, reference edge differences
  Scalar k_p = 0.1;

  static FormationSpec diamond();
  /// Node-edge incidence of the directed path over 6 nodes (6x5).
  static Eigen::MatrixXd incidence();
  /// incidence() kron I2 (12x10).
  static Eigen::MatrixXd incidence2();
};

/// Stacked consensus law u = k_p [G G] [z_ref - G^T x, -G^T v]^T evaluated on
/// the node stacking (goal, agent 1..5); returns the five agent inputs.
/// Throws ConfigError unless exactly five agent states are given.
std::vector<Vec2> formation_nominal(const std::vector<AgentState>& states,
                                    const Vec2& leader_goal, const FormationSpec& spec);

/// Max edge deviation ||(x_k - x_{k+1}) - z_ref_k|| over the five chain edges.
Scalar formation_error(const std::vector<AgentState>& states, const Vec2& leader_goal,
                       const FormationSpec& spec);

}  // namespace cbfsim

#endif  // CBFSIM_CONTROLLERS_HPP
