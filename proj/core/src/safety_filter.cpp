#include "cbfsim/safety_filter.hpp"

#include <cmath>

namespace cbfsim {

std::vector<std::string> validate_root_condition(Scalar a1, Scalar a2) {
  std::vector<std::string> failures;
  if (!(a1 > 0.0)) failures.push_back("a1 must be > 0 for negative real roots");
  if (!(a2 > 0.0)) failures.push_back("a2 must be > 0 for negative real roots");
  if (a1 * a1 < 4.0 * a2) {
    failures.push_back("a1^2 >= 4*a2 required so lambda^2 + a1*lambda + a2 has real roots");
  }
  return failures;
}

AffineConstraint ilcbf_row(const ILCBF& cbf, const AgentState& state,
                           const SafetyFilterConfig& cfg) {
  const HDerivatives d = eval_h_derivs(cbf, state);
  // Acceleration model vdot = gain*u + drag*v folds into the chain as
  // h_ddot = accel_row . (gain*u + drag*v) + drift.
  AffineConstraint row;
  row.a = cfg.dynamics.gain * d.accel_row;
  const Scalar drift = d.drift + cfg.dynamics.drag * d.accel_row.dot(state.v);
  row.b = -drift - cfg.a1 * d.h_dot - cfg.a2 * (d.h - cfg.obstacle_margin);
  row.tag = RowTag::IlCbf;
  return row;
}

AffineConstraint ilcbf_row_rel1(const ILCBF& cbf, const Vec2& p, Scalar gamma_k) {
  const FitFrame& frame = cbf.model.frame;
  const Vec2 q = frame.to_local(p);
  const Scalar h = cbf.sign * (q.y() - cbf.model.eval(q.x()));
  const Vec2 grad_local = cbf.sign * Vec2(-cbf.model.deriv(q.x()), 1.0);
  AffineConstraint row;
  row.a = rot2(frame.angle) * grad_local;
  row.b = -gamma_k * h;
  row.tag = RowTag::IlCbf;
  return row;
}

AffineConstraint interagent_row(const AgentState& self, const AgentState& other,
                                Scalar umax_self, Scalar umax_other,
                                const SafetyFilterConfig& cfg, bool* violation) {
  const Vec2 dp = self.p - other.p;
  const Vec2 dv = self.v - other.v;
  const Scalar dist = dp.norm();
  AffineConstraint row;
  row.tag = RowTag::InterAgent;
  if (dist < 1e-12) {
    // Coincident positions: no usable direction, demand full upward thrust.
    if (violation) *violation = true;
    row.a = Vec2(0.0, 1.0);
    row.b = umax_self;
    return row;
  }
  const Vec2 dir = dp / dist;
  if (dist < cfg.d_safe) {
    if (violation) *violation = true;
    row.a = dir;
    row.b = umax_self;  // maximal repulsion along the separating direction
    return row;
  }

  const Scalar brake = 2.0 * (umax_self + umax_other);
  const Scalar root = std::sqrt(brake * std::max(dist - cfg.d_safe, 0.0));
  const Scalar radial = dp.dot(dv) / dist;
  const Scalar h = radial + root;

  // h_dot = (|dv|^2 + dp.(u_i - u_j))/|dp| - (dp.dv)^2/|dp|^3
  //         + (umax_i+umax_j) * (dp.dv) / (|dp| * root),   u_j = 0.
  const Scalar chain = 0.5 * brake * radial / std::max(root, 1e-9);
  Scalar drift = dv.squaredNorm() / dist - radial * radial / dist + chain;
  // Neighbor drag still moves dv when the dynamics are not a pure double
  // integrator: d(dv)/dt gains drag*dv beyond (u_i - u_j) terms.
  drift += cfg.dynamics.drag * radial;

  row.a = cfg.dynamics.gain * dir;
  row.b = -cfg.gamma * h * h * h - drift;
  return row;
}

Scalar neighborhood_radius(Scalar d_safe, Scalar gamma, Scalar umax_self, Scalar umax_min,
                           Scalar umax_max, Scalar vmax_self, Scalar vmax_max) {
  const Scalar reach = std::cbrt(2.0 * (umax_self + umax_max) / gamma) + vmax_self + vmax_max;
  return d_safe + reach * reach / (2.0 * (umax_self + umax_min));
}

std::vector<int> neighborhood(int self_index, const std::vector<AgentState>& states,
                              const Bounds& bounds, const SafetyFilterConfig& cfg) {
  const Scalar radius = neighborhood_radius(cfg.d_safe, cfg.gamma, bounds.u_max, bounds.u_max,
                                            bounds.u_max, bounds.v_max, bounds.v_max);
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(states.size()); ++j) {
    if (j == self_index) continue;
    if ((states[self_index].p - states[j].p).norm() <= radius) out.push_back(j);
  }
  return out;
}

Vec2 assemble_and_filter(const AgentState& self, const Vec2& u_nominal,
                         const std::vector<ILCBF>& barriers,
                         const std::vector<AgentState>& neighbor_states,
                         const Bounds& bounds, const SafetyFilterConfig& cfg,
                         FilterDiag* diag) {
  std::vector<AffineConstraint> rows;
  rows.reserve(barriers.size() + neighbor_states.size());
  for (size_t k = 0; k < barriers.size(); ++k) {
    AffineConstraint row = ilcbf_row(barriers[k], self, cfg);
    row.ref = static_cast<int>(k);
    rows.push_back(row);
  }
  bool violation = false;
  for (size_t j = 0; j < neighbor_states.size(); ++j) {
    AffineConstraint row =
        interagent_row(self, neighbor_states[j], bounds.u_max, bounds.u_max, cfg, &violation);
    row.ref = static_cast<int>(j);
    rows.push_back(row);
  }

  const BoxBounds box{Vec2(-bounds.u_max, -bounds.u_max), Vec2(bounds.u_max, bounds.u_max)};
  const std::optional<QpSolution> sol = solve_qp(u_nominal, rows, box);
  QpSolution result =
      sol ? *sol : solve_qp_relaxed(u_nominal, rows, box, cfg.relax_weight);
  if (diag) {
    diag->status = result.status;
    diag->slack = result.slack;
    diag->active = result.active;
    diag->interagent_violation = violation;
  }
  return clamp_inf(result.u, bounds.u_max);
}

}  // namespace cbfsim
