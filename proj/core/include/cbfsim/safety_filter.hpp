#ifndef CBFSIM_SAFETY_FILTER_HPP
#define CBFSIM_SAFETY_FILTER_HPP

#include <vector>

#include "cbfsim/barrier.hpp"
#include "cbfsim/dynamics.hpp"
#include "cbfsim/qp.hpp"
#include "cbfsim/types.hpp"

namespace cbfsim {

struct SafetyFilterConfig {
  Scalar a1 = 3.0;  // relative-degree-2 coefficients; lambda^2 + a1 lambda + a2
  Scalar a2 = 2.0;  // must have negative real roots (a1 > 0, a2 > 0, a1^2 >= 4 a2)
  Scalar gamma = 0.3;          // inter-agent class-K gain, beta(h) = gamma h^3
  Scalar d_safe = 0.4;         // inter-agent safety distance [m]
  Scalar relax_weight = 100.0; // slack penalty for the infeasible fallback
  Scalar obstacle_margin = 0.0;  // standoff subtracted from barrier values in rows [m]
  LipParams dynamics;          // acceleration model used when assembling rows
};

/// Validates the negative-real-roots requirement. Returns a message per
/// violation; empty means the config is admissible.
std::vector<std::string> validate_root_condition(Scalar a1, Scalar a2);

/// Relative-degree-2 barrier row: h_ddot + a1 h_dot + a2 (h - margin) >= 0
/// rearranged affine in u.
AffineConstraint ilcbf_row(const ILCBF& cbf, const AgentState& state,
                           const SafetyFilterConfig& cfg);

/// Relative-degree-1 variant for single-integrator agents (u is a velocity):
/// dh/dp . u + gamma_k * h >= 0. Unused by the shipped scenarios.
AffineConstraint ilcbf_row_rel1(const ILCBF& cbf, const Vec2& p, Scalar gamma_k);

/// Braking-distance inter-agent barrier
///   h = dp.dv/|dp| + sqrt(2(umax_i+umax_j)(|dp| - d_safe))
/// whose derivative is taken with the neighbor coasting (u_j = 0); the row
/// enforces h_dot + gamma h^3 >= 0 affine in u_i. Below d_safe a maximal
/// separating row is emitted and *violation is set.
AffineConstraint interagent_row(const AgentState& self, const AgentState& other,
                                Scalar umax_self, Scalar umax_other,
                                const SafetyFilterConfig& cfg, bool* violation = nullptr);

/// Interaction radius: pairs beyond it cannot activate the inter-agent row.
Scalar neighborhood_radius(Scalar d_safe, Scalar gamma, Scalar umax_self, Scalar umax_min,
                           Scalar umax_max, Scalar vmax_self, Scalar vmax_max);

/// Indices j != self_index within the interaction radius of agent self_index.
std::vector<int> neighborhood(int self_index, const std::vector<AgentState>& states,
                              const Bounds& bounds, const SafetyFilterConfig& cfg);

struct FilterDiag {
  QpStatus status = QpStatus::Nominal;
  Scalar slack = 0.0;
  std::vector<int> active;
  bool interagent_violation = false;
};

/// Builds all rows for one agent, solves the QP, and falls back to the
/// slack-relaxed program when the rows are mutually infeasible. The result
/// always satisfies the box bounds.
Vec2 assemble_and_filter(const AgentState& self, const Vec2& u_nominal,
                         const std::vector<ILCBF>& barriers,
                         const std::vector<AgentState>& neighbor_states,
                         const Bounds& bounds, const SafetyFilterConfig& cfg,
                         FilterDiag* diag = nullptr);

}  // namespace cbfsim

#endif  // CBFSIM_SAFETY_FILTER_HPP
