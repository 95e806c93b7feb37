#ifndef CBFSIM_DYNAMICS_HPP
#define CBFSIM_DYNAMICS_HPP

#include "cbfsim/types.hpp"

namespace cbfsim {

/// Exact discretization of the double integrator over one step of
/// piecewise-constant input: p' = p + v dt + u dt^2/2, v' = v + u dt,
/// followed by a componentwise clamp of v' to +/-v_max.
/// Throws std::invalid_argument on non-finite input.
AgentState step_agent(const AgentState& s, const Vec2& u, Scalar dt, Scalar v_max);

/// Velocity dynamics with unknown input gain and linear drag:
/// vdot = gain*u + drag*v. gain=1, drag=0 recovers the double integrator.
struct LipParams {
  Scalar gain = 1.0;
  Scalar drag = 0.0;
};

/// Exact one-step integration of pdot = v, vdot = gain*u + drag*v under
/// piecewise-constant u, with the same velocity clamp as step_agent.
AgentState step_agent_lip(const AgentState& s, const Vec2& u, Scalar dt, Scalar v_max,
                          const LipParams& params);

}  // namespace cbfsim

#endif  // CBFSIM_DYNAMICS_HPP
