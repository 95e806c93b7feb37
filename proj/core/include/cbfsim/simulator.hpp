#ifndef CBFSIM_SIMULATOR_HPP
#define CBFSIM_SIMULATOR_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cbfsim/lip_demo.hpp"
#include "cbfsim/scenario.hpp"

namespace cbfsim {

struct AgentStepLog {
  AgentState state;  // at the start of the step
  Vec2 u = Vec2::Zero();
  Scalar min_pair_dist = std::numeric_limits<Scalar>::infinity();
  Scalar min_h = std::numeric_limits<Scalar>::infinity();
  QpStatus qp_status = QpStatus::Nominal;
  Scalar slack = 0.0;
};

struct StepLog {
  Scalar t = 0.0;
  std::vector<AgentStepLog> agents;
};

struct Trajectory {
  Scalar dt = 0.0;
  std::vector<StepLog> steps;  // one per simulated step, plus a terminal record

  bool operator==(const Trajectory& other) const;
};

struct Metrics {
  Scalar min_pairwise_distance = std::numeric_limits<Scalar>::infinity();
  Scalar min_h = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> goal_times;  // NaN when unreached
  long infeasibility_count = 0;
  long deadlock_count = 0;
  Scalar t_s_bound = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar theta_error_final = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar min_obstacle_clearance = std::numeric_limits<Scalar>::infinity();
  Scalar formation_error_final = std::numeric_limits<Scalar>::quiet_NaN();
  long violation_count = 0;
  Scalar runtime_seconds = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

struct RunResult {
  Trajectory trajectory;
  Metrics metrics;
};

/// Optional per-step data consumers for CSV sinks and tests.
struct RunSinks {
  std::function<void(Scalar t, int agent, const PointCloud&)> cloud;
  std::function<void(Scalar t, int agent, int cluster, const ILCBF&)> barrier;
  std::function<void(Scalar t, int agent, const FilterDiag&)> qp;
  std::function<void(const LipEstimationStep&)> estimation;
};

/// Synchronous sense -> cluster -> fit -> filter -> step loop over the whole
/// horizon. When estimation is enabled a warm-up identification pass runs
/// first and the task integrates the perturbed dynamics while the safety
/// filter consumes the identified parameters.
RunResult run_scenario(const ScenarioConfig& cfg, const RunSinks& sinks = {});

}  // namespace cbfsim

#endif  // CBFSIM_SIMULATOR_HPP
