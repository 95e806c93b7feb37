#include "cbfsim/simulator.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace cbfsim {

bool Trajectory::operator==(const Trajectory& other) const {
  if (dt != other.dt || steps.size() != other.steps.size()) return false;
  for (size_t s = 0; s < steps.size(); ++s) {
    if (steps[s].t != other.steps[s].t) return false;
    if (steps[s].agents.size() != other.steps[s].agents.size()) return false;
    for (size_t a = 0; a < steps[s].agents.size(); ++a) {
      const AgentStepLog& x = steps[s].agents[a];
      const AgentStepLog& y = other.steps[s].agents[a];
      if (x.state.p != y.state.p || x.state.v != y.state.v || x.u != y.u) return false;
    }
  }
  return true;
}

namespace {

uint64_t substream_seed(uint64_t base, uint64_t agent) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (agent + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct DeadlockTracker {
  Scalar stalled_for = 0.0;
  Scalar hold_left = 0.0;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const RunSinks& sinks) {
  const auto t_start = std::chrono::steady_clock::now();
  {
    const std::vector<std::string> failures = validate_scenario(cfg);
    if (!failures.empty()) throw ConfigError("invalid scenario: " + failures.front());
  }

  RunResult result;
  Metrics& metrics = result.metrics;
  const int n_agents = static_cast<int>(cfg.agents.size());
  metrics.goal_times.assign(n_agents, std::numeric_limits<Scalar>::quiet_NaN());

  SafetyFilterConfig safety = cfg.safety;
  LipParams true_dynamics;  // exact double integrator unless estimation is on

  // Identification warm-up: the task starts only after the certified
  // settling time, so the filter sees a converged estimate.
  if (cfg.estimation.enabled) {
    LipDemoConfig demo;
    demo.theta_true = cfg.estimation.theta_true;
    demo.filter_k = cfg.estimation.filter_k;
    demo.dt = cfg.estimation.dt;
    demo.amplitude = cfg.estimation.amplitude;
    demo.seed = cfg.seed;
    EstimatorConfig est;
    est.gamma = cfg.estimation.gamma_gain * Eigen::MatrixXd::Identity(2, 2);
    est.k_t = cfg.estimation.k_t;
    est.k_h = cfg.estimation.k_h;
    est.eps_e = cfg.estimation.eps_e;
    const LipEstimationResult id = run_lip_estimation(
        demo, est, cfg.estimation.stack_capacity, cfg.estimation.min_singular_gate,
        cfg.estimation.max_warmup, sinks.estimation);
    metrics.t_s_bound = id.t_s;
    metrics.theta_error_final = id.theta_err_final;
    true_dynamics = cfg.estimation.theta_true;
    safety.dynamics = LipParams{id.theta_hat[0], id.theta_hat[1]};
  }

  const GridSpec grid_spec =
      GridSpec::from_extent(cfg.world_lo, cfg.world_hi, cfg.grid_resolution);
  std::vector<Obstacle> static_obs, dynamic_obs;
  for (const Obstacle& o : cfg.obstacles) {
    (o.motion ? dynamic_obs : static_obs).push_back(o);
  }
  const OccupancyGrid static_grid = rasterize(static_obs, 0.0, grid_spec);
  rasterize(cfg.obstacles, 0.0, grid_spec);  // extent check including motion

  std::vector<AgentState> states(n_agents);
  for (int i = 0; i < n_agents; ++i) states[i] = cfg.agents[i].start;
  std::vector<std::mt19937_64> rng;
  rng.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i) rng.emplace_back(substream_seed(cfg.seed, i));
  std::vector<DeadlockTracker> deadlock(n_agents);

  result.trajectory.dt = cfg.dt;
  result.trajectory.steps.reserve(cfg.horizon_steps + 1);

  auto pairwise_min = [&](int i) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (int j = 0; j < n_agents; ++j) {
      if (j != i) best = std::min(best, (states[i].p - states[j].p).norm());
    }
    return best;
  };
  auto obstacle_clearance = [&](const Vec2& p, Scalar t) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (const Obstacle& o : cfg.obstacles) best = std::min(best, distance_to_obstacle(o, p, t));
    return best;
  };

  for (long step = 0; step < cfg.horizon_steps; ++step) {
    const Scalar t = step * cfg.dt;

    OccupancyGrid grid = static_grid;
    for (const Obstacle& o : dynamic_obs) grid.stamp(o, t);

    StepLog log;
    log.t = t;
    log.agents.resize(n_agents);

    // Abort on penetration before anything else touches the state.
    for (int i = 0; i < n_agents; ++i) {
      const Scalar clear = obstacle_clearance(states[i].p, t);
      metrics.min_obstacle_clearance = std::min(metrics.min_obstacle_clearance, clear);
      if (clear <= 0.0) {
        std::ostringstream os;
        os << "agent " << i << " entered an obstacle at t=" << t;
        metrics.aborted = true;
        metrics.abort_reason = os.str();
        metrics.violation_count++;
        break;
      }
    }
    if (metrics.aborted) break;

    // Nominal inputs from the synchronous snapshot.
    std::vector<Vec2> u_nominal(n_agents);
    if (cfg.controller == ControllerType::Formation) {
      const std::vector<Vec2> u = formation_nominal(states, cfg.leader_goal, cfg.formation);
      for (int i = 0; i < n_agents; ++i) u_nominal[i] = u[i];
    } else {
      for (int i = 0; i < n_agents; ++i) {
        u_nominal[i] = pd_nominal(states[i], cfg.agents[i].goal, cfg.k_p, cfg.k_d);
      }
    }

    std::vector<Vec2> u_applied(n_agents);
    for (int i = 0; i < n_agents; ++i) {
      AgentStepLog& alog = log.agents[i];
      alog.state = states[i];

      // Deadlock bookkeeping: a stalled agent far from its goal gets a
      // rotated nominal for a short hold.
      DeadlockTracker& dl = deadlock[i];
      const Scalar goal_dist = (states[i].p - cfg.agents[i].goal).norm();
      if (states[i].v.norm() < cfg.deadlock.speed_threshold &&
          goal_dist > cfg.deadlock.goal_distance) {
        dl.stalled_for += cfg.dt;
      } else {
        dl.stalled_for = 0.0;
      }
      if (dl.hold_left <= 0.0 && dl.stalled_for >= cfg.deadlock.dwell) {
        dl.hold_left = cfg.deadlock.hold;
        dl.stalled_for = 0.0;
        metrics.deadlock_count++;
      }
      Vec2 u_n = u_nominal[i];
      if (dl.hold_left > 0.0) {
        u_n = rot2(cfg.deadlock.rotation_deg * M_PI / 180.0) * u_n;
        dl.hold_left -= cfg.dt;
      }

      PointCloud cloud;
      try {
        cloud = scan(states[i].p, grid, cfg.sensor, rng[i], t);
      } catch (const AgentInObstacle&) {
        std::ostringstream os;
        os << "agent " << i << " scanned from an occupied cell at t=" << t;
        metrics.aborted = true;
        metrics.abort_reason = os.str();
        metrics.violation_count++;
        break;
      }
      if (cfg.attention_radius < cfg.sensor.radius) {
        std::vector<Vec2> near;
        for (const Vec2& p : cloud.points) {
          if ((p - states[i].p).norm() <= cfg.attention_radius) near.push_back(p);
        }
        cloud.points = std::move(near);
      }
      if (sinks.cloud) sinks.cloud(t, i, cloud);

      const std::vector<ILCBF> barriers =
          learn_ilcbfs(cloud, states[i].p, cfg.clustering, cfg.regression);
      for (size_t k = 0; k < barriers.size(); ++k) {
        if (sinks.barrier) sinks.barrier(t, i, static_cast<int>(k), barriers[k]);
        alog.min_h = std::min(alog.min_h, eval_h(barriers[k], states[i].p));
      }
      metrics.min_h = std::min(metrics.min_h, alog.min_h);

      std::vector<AgentState> neighbor_states;
      for (int j : neighborhood(i, states, cfg.bounds, safety)) {
        neighbor_states.push_back(states[j]);
      }

      FilterDiag diag;
      u_applied[i] = assemble_and_filter(states[i], u_n, barriers, neighbor_states, cfg.bounds,
                                         safety, &diag);
      if (diag.status == QpStatus::Relaxed) metrics.infeasibility_count++;
      if (diag.interagent_violation) metrics.violation_count++;
      if (sinks.qp && diag.status != QpStatus::Nominal) sinks.qp(t, i, diag);

      alog.u = u_applied[i];
      alog.qp_status = diag.status;
      alog.slack = diag.slack;
      alog.min_pair_dist = pairwise_min(i);
      metrics.min_pairwise_distance = std::min(metrics.min_pairwise_distance, alog.min_pair_dist);

      if (std::isnan(metrics.goal_times[i]) && goal_dist <= 0.1) {
        metrics.goal_times[i] = t;
      }
    }
    if (metrics.aborted) break;

    result.trajectory.steps.push_back(std::move(log));

    // Synchronous commit.
    for (int i = 0; i < n_agents; ++i) {
      states[i] = cfg.estimation.enabled
                      ? step_agent_lip(states[i], u_applied[i], cfg.dt, cfg.bounds.v_max,
                                       true_dynamics)
                      : step_agent(states[i], u_applied[i], cfg.dt, cfg.bounds.v_max);
    }
  }

  // Terminal record.
  if (!metrics.aborted) {
    StepLog final_log;
    final_log.t = cfg.horizon_steps * cfg.dt;
    final_log.agents.resize(n_agents);
    for (int i = 0; i < n_agents; ++i) {
      final_log.agents[i].state = states[i];
      final_log.agents[i].min_pair_dist = pairwise_min(i);
      metrics.min_pairwise_distance =
          std::min(metrics.min_pairwise_distance, final_log.agents[i].min_pair_dist);
      const Scalar goal_dist = (states[i].p - cfg.agents[i].goal).norm();
      if (std::isnan(metrics.goal_times[i]) && goal_dist <= 0.1) {
        metrics.goal_times[i] = final_log.t;
      }
      metrics.min_obstacle_clearance =
          std::min(metrics.min_obstacle_clearance, obstacle_clearance(states[i].p, final_log.t));
    }
    result.trajectory.steps.push_back(std::move(final_log));
    if (cfg.controller == ControllerType::Formation) {
      metrics.formation_error_final = formation_error(states, cfg.leader_goal, cfg.formation);
    }
  }

  metrics.runtime_seconds =
      std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace cbfsim
