#include "cbfsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cbfsim {

namespace {

using nlohmann::json;

Scalar num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("config key '" + path + "' must be a number");
  return j.get<Scalar>();
}

Vec2 vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("config key '" + path + "' must be [x, y]");
  }
  return Vec2(j[0].get<Scalar>(), j[1].get<Scalar>());
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing config key '" + path + "'");
  return *it;
}

template <typename T>
T opt(const json& j, const std::string& key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

Obstacle parse_obstacle(const json& j, const std::string& path) {
  Obstacle obs;
  const std::string type = member(j, "type", path + ".type").get<std::string>();
  if (type == "box") {
    const Vec2 lo = vec2(member(j, "lo", path + ".lo"), path + ".lo");
    const Vec2 hi = vec2(member(j, "hi", path + ".hi"), path + ".hi");
    if (!(lo.x() < hi.x() && lo.y() < hi.y())) {
      throw ConfigError("config key '" + path + "': box needs lo < hi");
    }
    obs = Obstacle::box(lo, hi);
  } else if (type == "polygon") {
    const json& verts = member(j, "vertices", path + ".vertices");
    if (!verts.is_array() || verts.size() < 3) {
      throw ConfigError("config key '" + path + ".vertices' must list >= 3 points");
    }
    for (size_t i = 0; i < verts.size(); ++i) {
      obs.polygon.push_back(vec2(verts[i], path + ".vertices[" + std::to_string(i) + "]"));
    }
  } else {
    throw ConfigError("config key '" + path + ".type' must be 'box' or 'polygon'");
  }
  if (j.contains("motion")) {
    const json& m = j["motion"];
    ObstacleMotion motion;
    const std::string axis = opt<std::string>(m, "axis", "y");
    if (axis == "x") {
      motion.axis = 0;
    } else if (axis == "y") {
      motion.axis = 1;
    } else {
      throw ConfigError("config key '" + path + ".motion.axis' must be 'x' or 'y'");
    }
    motion.speed = num(member(m, "speed", path + ".motion.speed"), path + ".motion.speed");
    motion.amplitude =
        num(member(m, "amplitude", path + ".motion.amplitude"), path + ".motion.amplitude");
    motion.phase = opt<Scalar>(m, "phase", 0.0);
    obs.motion = motion;
  }
  return obs;
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file is not valid JSON: " + std::string(e.what()));
  }

  ScenarioConfig cfg;
  cfg.name = opt<std::string>(j, "name", "scenario");
  cfg.dt = num(member(j, "dt", "dt"), "dt");
  cfg.horizon_steps = member(j, "horizon_steps", "horizon_steps").get<long>();
  cfg.seed = opt<uint64_t>(j, "seed", 0);

  const json& world = member(j, "world", "world");
  cfg.world_lo = vec2(member(world, "lo", "world.lo"), "world.lo");
  cfg.world_hi = vec2(member(world, "hi", "world.hi"), "world.hi");
  cfg.grid_resolution = num(member(world, "resolution", "world.resolution"), "world.resolution");

  const json& bounds = member(j, "bounds", "bounds");
  cfg.bounds.v_max = num(member(bounds, "v_max", "bounds.v_max"), "bounds.v_max");
  cfg.bounds.u_max = num(member(bounds, "u_max", "bounds.u_max"), "bounds.u_max");

  const json& safety = member(j, "safety", "safety");
  cfg.safety.d_safe = num(member(safety, "d_safe", "safety.d_safe"), "safety.d_safe");
  cfg.safety.gamma = num(member(safety, "gamma", "safety.gamma"), "safety.gamma");
  cfg.safety.a1 = num(member(safety, "a1", "safety.a1"), "safety.a1");
  cfg.safety.a2 = num(member(safety, "a2", "safety.a2"), "safety.a2");
  cfg.safety.relax_weight = opt<Scalar>(safety, "relax_weight", 100.0);
  cfg.safety.obstacle_margin = opt<Scalar>(safety, "obstacle_margin", 0.0);

  const json& sensor = member(j, "sensor", "sensor");
  cfg.sensor.radius = num(member(sensor, "radius", "sensor.radius"), "sensor.radius");
  cfg.sensor.beams = member(sensor, "beams", "sensor.beams").get<int>();
  cfg.sensor.sigma = num(member(sensor, "sigma", "sensor.sigma"), "sensor.sigma");

  if (j.contains("clustering")) {
    cfg.clustering.eps = opt<Scalar>(j["clustering"], "eps", cfg.clustering.eps);
    cfg.clustering.min_pts = opt<int>(j["clustering"], "min_pts", cfg.clustering.min_pts);
  }
  if (j.contains("regression")) {
    const json& r = j["regression"];
    cfg.regression.c = opt<Scalar>(r, "c", cfg.regression.c);
    cfg.regression.max_iters = opt<int>(r, "max_iters", cfg.regression.max_iters);
    cfg.regression.tol = opt<Scalar>(r, "tol", cfg.regression.tol);
    cfg.regression.scale_floor = opt<Scalar>(r, "scale_floor", cfg.regression.scale_floor);
  }
  cfg.attention_radius = opt<Scalar>(j, "attention_radius", cfg.sensor.radius);

  const json& ctrl = member(j, "controller", "controller");
  const std::string type = member(ctrl, "type", "controller.type").get<std::string>();
  if (type == "pd") {
    cfg.controller = ControllerType::Pd;
  } else if (type == "formation") {
    cfg.controller = ControllerType::Formation;
    cfg.leader_goal = vec2(member(ctrl, "leader_goal", "controller.leader_goal"),
                           "controller.leader_goal");
    if (ctrl.contains("z_ref")) {
      const json& z = ctrl["z_ref"];
      if (!z.is_array() || z.size() != 10) {
        throw ConfigError("config key 'controller.z_ref' must have 10 entries");
      }
      for (int i = 0; i < 10; ++i) cfg.formation.z_ref[i] = z[i].get<Scalar>();
    }
  } else {
    throw ConfigError("config key 'controller.type' must be 'pd' or 'formation'");
  }
  cfg.k_p = opt<Scalar>(ctrl, "k_p", 0.1);
  cfg.k_d = opt<Scalar>(ctrl, "k_d", 0.2);
  cfg.formation.k_p = cfg.k_p;

  const json& agents = member(j, "agents", "agents");
  if (!agents.is_array() || agents.empty()) throw ConfigError("config key 'agents' must be a non-empty array");
  for (size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    AgentSpec spec;
    spec.start.p = vec2(member(agents[i], "start", path + ".start"), path + ".start");
    if (agents[i].contains("start_velocity")) {
      spec.start.v = vec2(agents[i]["start_velocity"], path + ".start_velocity");
    }
    spec.goal = vec2(member(agents[i], "goal", path + ".goal"), path + ".goal");
    cfg.agents.push_back(spec);
  }

  if (j.contains("obstacles")) {
    const json& obs = j["obstacles"];
    for (size_t i = 0; i < obs.size(); ++i) {
      cfg.obstacles.push_back(parse_obstacle(obs[i], "obstacles[" + std::to_string(i) + "]"));
    }
  }

  if (j.contains("estimation")) {
    const json& e = j["estimation"];
    cfg.estimation.enabled = opt<bool>(e, "enabled", false);
    if (e.contains("theta_true")) {
      const Vec2 th = vec2(e["theta_true"], "estimation.theta_true");
      cfg.estimation.theta_true = LipParams{th.x(), th.y()};
    }
    cfg.estimation.filter_k = opt<Scalar>(e, "filter_k", cfg.estimation.filter_k);
    cfg.estimation.dt = opt<Scalar>(e, "dt", cfg.estimation.dt);
    cfg.estimation.amplitude = opt<Scalar>(e, "amplitude", cfg.estimation.amplitude);
    cfg.estimation.gamma_gain = opt<Scalar>(e, "gamma_gain", cfg.estimation.gamma_gain);
    cfg.estimation.k_t = opt<Scalar>(e, "k_t", cfg.estimation.k_t);
    cfg.estimation.k_h = opt<Scalar>(e, "k_h", cfg.estimation.k_h);
    cfg.estimation.eps_e = opt<Scalar>(e, "eps_e", cfg.estimation.eps_e);
    cfg.estimation.stack_capacity = opt<int>(e, "stack_capacity", cfg.estimation.stack_capacity);
    cfg.estimation.min_singular_gate =
        opt<Scalar>(e, "min_singular_gate", cfg.estimation.min_singular_gate);
    cfg.estimation.max_warmup = opt<Scalar>(e, "max_warmup", cfg.estimation.max_warmup);
  }

  if (j.contains("deadlock")) {
    const json& d = j["deadlock"];
    cfg.deadlock.speed_threshold = opt<Scalar>(d, "speed_threshold", cfg.deadlock.speed_threshold);
    cfg.deadlock.dwell = opt<Scalar>(d, "dwell", cfg.deadlock.dwell);
    cfg.deadlock.hold = opt<Scalar>(d, "hold", cfg.deadlock.hold);
    cfg.deadlock.rotation_deg = opt<Scalar>(d, "rotation_deg", cfg.deadlock.rotation_deg);
    cfg.deadlock.goal_distance = opt<Scalar>(d, "goal_distance", cfg.deadlock.goal_distance);
  }
  return cfg;
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> fail;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) fail.push_back(msg);
  };

  check(cfg.dt > 0.0, "dt must be > 0");
  check(cfg.horizon_steps > 0, "horizon_steps must be > 0");
  check(cfg.grid_resolution > 0.0, "world.resolution must be > 0");
  check(cfg.world_lo.x() < cfg.world_hi.x() && cfg.world_lo.y() < cfg.world_hi.y(),
        "world extent must be non-empty");
  check(cfg.bounds.u_max > 0.0, "bounds.u_max must be > 0");
  check(cfg.bounds.v_max > 0.0, "bounds.v_max must be > 0");
  check(cfg.safety.d_safe > 0.0, "safety.d_safe must be > 0");
  check(cfg.safety.gamma > 0.0, "safety.gamma must be > 0");
  check(cfg.safety.relax_weight > 0.0, "safety.relax_weight must be > 0");
  check(cfg.safety.obstacle_margin >= 0.0, "safety.obstacle_margin must be >= 0");
  for (const std::string& msg : validate_root_condition(cfg.safety.a1, cfg.safety.a2)) {
    fail.push_back("safety: " + msg);
  }
  check(cfg.sensor.radius > 0.0, "sensor.radius must be > 0");
  check(cfg.sensor.beams >= 8, "sensor.beams must be >= 8");
  check(cfg.sensor.sigma >= 0.0, "sensor.sigma must be >= 0");
  check(cfg.clustering.eps > 0.0, "clustering.eps must be > 0");
  check(cfg.clustering.min_pts >= 1, "clustering.min_pts must be >= 1");
  check(cfg.regression.c > 0.0, "regression.c must be > 0");
  check(cfg.regression.max_iters >= 1, "regression.max_iters must be >= 1");
  check(cfg.regression.tol > 0.0, "regression.tol must be > 0");
  check(cfg.regression.scale_floor > 0.0, "regression.scale_floor must be > 0");
  if (cfg.estimation.enabled) {
    check(cfg.estimation.k_t > 0.0, "estimation.k_t must be > 0");
    check(cfg.estimation.k_h > 0.0, "estimation.k_h must be > 0");
    check(cfg.estimation.gamma_gain > 0.0, "estimation.gamma_gain must be > 0");
    check(cfg.estimation.eps_e > 0.0, "estimation.eps_e must be > 0");
    check(cfg.estimation.stack_capacity >= 1, "estimation.stack_capacity must be >= 1");
    check(cfg.estimation.filter_k > 0.0, "estimation.filter_k must be > 0");
    check(cfg.estimation.dt > 0.0, "estimation.dt must be > 0");
  }
  if (cfg.controller == ControllerType::Formation) {
    check(cfg.agents.size() == 5, "controller 'formation' requires exactly 5 agents");
  }
  check(!cfg.agents.empty(), "at least one agent is required");

  for (size_t i = 0; i < cfg.agents.size(); ++i) {
    for (size_t k = i + 1; k < cfg.agents.size(); ++k) {
      const Scalar d = (cfg.agents[i].start.p - cfg.agents[k].start.p).norm();
      if (d <= cfg.safety.d_safe) {
        std::ostringstream os;
        os << "agents " << i << " and " << k << " start at distance " << d
           << " <= safety.d_safe = " << cfg.safety.d_safe;
        fail.push_back(os.str());
      }
    }
  }
  for (size_t i = 0; i < cfg.agents.size(); ++i) {
    const Vec2 p = cfg.agents[i].start.p;
    if (p.x() < cfg.world_lo.x() || p.y() < cfg.world_lo.y() || p.x() > cfg.world_hi.x() ||
        p.y() > cfg.world_hi.y()) {
      fail.push_back("agents[" + std::to_string(i) + "].start lies outside the world extent");
    }
    for (size_t o = 0; o < cfg.obstacles.size(); ++o) {
      if (distance_to_obstacle(cfg.obstacles[o], p, 0.0) <= 0.0) {
        fail.push_back("agents[" + std::to_string(i) + "].start lies inside obstacles[" +
                       std::to_string(o) + "]");
      }
    }
  }
  try {
    const GridSpec spec =
        GridSpec::from_extent(cfg.world_lo, cfg.world_hi, cfg.grid_resolution);
    rasterize(cfg.obstacles, 0.0, spec);
  } catch (const ConfigError& e) {
    fail.push_back(e.what());
  }
  return fail;
}

}  // namespace cbfsim
