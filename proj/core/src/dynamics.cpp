#include "cbfsim/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace cbfsim {

AgentState step_agent(const AgentState& s, const Vec2& u, Scalar dt, Scalar v_max) {
  if (!finite(s.p) || !finite(s.v) || !finite(u)) {
    throw std::invalid_argument("step_agent: non-finite state or input");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("step_agent: dt must be > 0");
  AgentState out;
  out.p = s.p + dt * s.v + 0.5 * dt * dt * u;
  out.v = clamp_inf(s.v + dt * u, v_max);
  return out;
}

AgentState step_agent_lip(const AgentState& s, const Vec2& u, Scalar dt, Scalar v_max,
                          const LipParams& params) {
  if (!finite(s.p) || !finite(s.v) || !finite(u)) {
    throw std::invalid_argument("step_agent_lip: non-finite state or input");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("step_agent_lip: dt must be > 0");
  AgentState out;
  const Scalar a = params.drag;
  if (std::abs(a) < 1e-12) {
    out.p = s.p + dt * s.v + 0.5 * dt * dt * params.gain * u;
    out.v = s.v + dt * params.gain * u;
  } else {
    // v(t) = e^{a t} v0 + (e^{a t}-1)/a * gain*u
    // p(t) = p0 + (e^{a t}-1)/a * v0 + gain*u * (e^{a t}-1-a t)/a^2
    const Scalar ead = std::exp(a * dt);
    const Scalar em1 = std::expm1(a * dt);
    out.v = ead * s.v + (em1 / a) * params.gain * u;
    out.p = s.p + (em1 / a) * s.v + params.gain * u * ((em1 - a * dt) / (a * a));
  }
  out.v = clamp_inf(out.v, v_max);
  return out;
}

}  // namespace cbfsim
