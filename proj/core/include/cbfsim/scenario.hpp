#ifndef CBFSIM_SCENARIO_HPP
#define CBFSIM_SCENARIO_HPP

#include <string>
#include <vector>

#include "cbfsim/controllers.hpp"
#include "cbfsim/dbscan.hpp"
#include "cbfsim/dynamics.hpp"
#include "cbfsim/lidar.hpp"
#include "cbfsim/robust_fit.hpp"
#include "cbfsim/safety_filter.hpp"
#include "cbfsim/types.hpp"
#include "cbfsim/world.hpp"

namespace cbfsim {

struct AgentSpec {
  AgentState start;
  Vec2 goal = Vec2::Zero();
};

enum class ControllerType { Pd, Formation };

/// Settings of the identification warm-up on the perturbed velocity dynamics.
struct EstimationSpec {
  bool enabled = false;
  LipParams theta_true{0.8, -0.3};
  Scalar filter_k = 0.1;
  Scalar dt = 1e-3;
  Scalar amplitude = 1.0;
  Scalar gamma_gain = 1.0;  // Gamma = gamma_gain * I
  Scalar k_t = 3e-10;
  Scalar k_h = 1.0;
  Scalar eps_e = 1e-9;
  int stack_capacity = 20;
  Scalar min_singular_gate = 0.5;
  Scalar max_warmup = 120.0;  // [s]
};

struct DeadlockSpec {
  Scalar speed_threshold = 0.05;  // [m/s]
  Scalar dwell = 1.0;             // time below threshold before triggering [s]
  Scalar hold = 0.5;              // duration of the rotated nominal [s]
  Scalar rotation_deg = 15.0;
  Scalar goal_distance = 0.2;     // only stalled agents farther than this trigger [m]
};

struct ScenarioConfig {
  std::string name = "scenario";
  Scalar dt = 0.02;
  long horizon_steps = 1000;
  uint64_t seed = 0;

  Vec2 world_lo = Vec2(-8, -8);
  Vec2 world_hi = Vec2(8, 8);
  Scalar grid_resolution = 0.05;

  std::vector<AgentSpec> agents;
  Bounds bounds;
  SafetyFilterConfig safety;
  Scalar attention_radius = 2.0;
  LidarConfig sensor;
  ClusterParams clustering;
  RobustFitConfig regression;
  EstimationSpec estimation;
  DeadlockSpec deadlock;

  ControllerType controller = ControllerType::Pd;
  Scalar k_p = 0.1;
  Scalar k_d = 0.2;
  FormationSpec formation = FormationSpec::diamond();
  Vec2 leader_goal = Vec2::Zero();

  std::vector<Obstacle> obstacles;
};

/// Parses a scenario file (JSON content). Throws ConfigError naming the
/// offending key on malformed input.
ScenarioConfig load_scenario(const std::string& path);

/// Dry-run validation; returns one message per violated invariant.
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg);

}  // namespace cbfsim

#endif  // CBFSIM_SCENARIO_HPP
