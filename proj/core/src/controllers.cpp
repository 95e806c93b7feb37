#include "cbfsim/controllers.hpp"

namespace cbfsim {

Vec2 pd_nominal(const AgentState& state, const Vec2& goal, Scalar k_p, Scalar k_d) {
  return -k_p * (state.p - goal) - k_d * state.v;
}

FormationSpec FormationSpec::diamond() {
  FormationSpec spec;
  spec.z_ref.resize(10);
  spec.z_ref << 0, 0, 0, 1, 0.5, 0.5, -1, 0, 0.5, 0.5;
  return spec;
}

Eigen::MatrixXd FormationSpec::incidence() {
  Eigen::MatrixXd g(6, 5);
  g << 1, 0, 0, 0, 0,
      -1, 1, 0, 0, 0,
       0, -1, 1, 0, 0,
       0, 0, -1, 1, 0,
       0, 0, 0, -1, 1,
       0, 0, 0, 0, -1;
  return g;
}

Eigen::MatrixXd FormationSpec::incidence2() {
  const Eigen::MatrixXd g = incidence();
  Eigen::MatrixXd g2 = Eigen::MatrixXd::Zero(12, 10);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 5; ++c) {
      g2(2 * r, 2 * c) = g(r, c);
      g2(2 * r + 1, 2 * c + 1) = g(r, c);
    }
  }
  return g2;
}

namespace {

Eigen::VectorXd stack_nodes(const std::vector<AgentState>& states, const Vec2& leader_goal,
                            bool velocities) {
  Eigen::VectorXd x(12);
  x.segment<2>(0) = velocities ? Vec2::Zero() : leader_goal;
  for (int i = 0; i < 5; ++i) {
    x.segment<2>(2 * (i + 1)) = velocities ? states[i].v : states[i].p;
  }
  return x;
}

}  // namespace

std::vector<Vec2> formation_nominal(const std::vector<AgentState>& states,
                                    const Vec2& leader_goal, const FormationSpec& spec) {
  if (states.size() != 5) throw ConfigError("formation controller requires exactly 5 agents");
  if (spec.z_ref.size() != 10) throw ConfigError("formation z_ref must have 10 entries");
  const Eigen::MatrixXd g2 = FormationSpec::incidence2();
  const Eigen::VectorXd x = stack_nodes(states, leader_goal, false);
  const Eigen::VectorXd v = stack_nodes(states, leader_goal, true);
  const Eigen::VectorXd u_nodes =
      spec.k_p * (g2 * (spec.z_ref - g2.transpose() * x) - g2 * (g2.transpose() * v));
  std::vector<Vec2> u(5);
  for (int i = 0; i < 5; ++i) u[i] = u_nodes.segment<2>(2 * (i + 1));
  return u;
}

Scalar formation_error(const std::vector<AgentState>& states, const Vec2& leader_goal,
                       const FormationSpec& spec) {
  const Eigen::MatrixXd g2 = FormationSpec::incidence2();
  const Eigen::VectorXd x = stack_nodes(states, leader_goal, false);
  const Eigen::VectorXd err = spec.z_ref - g2.transpose() * x;
  Scalar worst = 0.0;
  for (int e = 0; e < 5; ++e) worst = std::max(worst, err.segment<2>(2 * e).norm());
  return worst;
}

}  // namespace cbfsim
