#include <random>

#include "cbfsim/dynamics.hpp"
#include "cbfsim/world.hpp"
#include "doctest.h"

using namespace cbfsim;

TEST_CASE("step_agent matches closed-form kinematics") {
  AgentState s;
  s.p = Vec2(0, 0);
  s.v = Vec2(1, 0);
  AgentState out = step_agent(s, Vec2(0, 0), 1.0, 6.0);
  CHECK(out.p == Vec2(1, 0));
  CHECK(out.v == Vec2(1, 0));

  s.v = Vec2(0, 0);
  out = step_agent(s, Vec2(2, 0), 0.5, 6.0);
  CHECK(out.p.x() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(out.v.x() == doctest::Approx(1.0).epsilon(1e-15));

  s.v = Vec2(5.9, 0);
  out = step_agent(s, Vec2(5, 0), 0.1, 6.0);
  CHECK(out.v.x() == 6.0);  // clamped to the speed bound
}

TEST_CASE("step_agent rejects non-finite input") {
  AgentState s;
  CHECK_THROWS_AS(step_agent(s, Vec2(std::nan(""), 0), 0.1, 6.0), std::invalid_argument);
  s.p = Vec2(std::numeric_limits<double>::infinity(), 0);
  CHECK_THROWS_AS(step_agent(s, Vec2(0, 0), 0.1, 6.0), std::invalid_argument);
}

TEST_CASE("integration exactness: n steps equal one closed-form evaluation") {
  const Vec2 u(0.7, -0.3);
  const Scalar dt = 0.02;
  const int n = 100;
  AgentState s;
  s.p = Vec2(1.0, -2.0);
  s.v = Vec2(0.5, 0.25);
  AgentState stepped = s;
  for (int i = 0; i < n; ++i) stepped = step_agent(stepped, u, dt, 1e9);
  const Scalar T = n * dt;
  const Vec2 p_exact = s.p + T * s.v + 0.5 * T * T * u;
  const Vec2 v_exact = s.v + T * u;
  CHECK((stepped.p - p_exact).norm() <= 1e-12);
  CHECK((stepped.v - v_exact).norm() <= 1e-12);
}

TEST_CASE("step_agent_lip reduces to the double integrator and integrates drag exactly") {
  AgentState s;
  s.v = Vec2(1, 0);
  const AgentState a = step_agent(s, Vec2(0.5, 0.5), 0.1, 6.0);
  const AgentState b = step_agent_lip(s, Vec2(0.5, 0.5), 0.1, 6.0, LipParams{1.0, 0.0});
  CHECK((a.p - b.p).norm() <= 1e-15);
  CHECK((a.v - b.v).norm() <= 1e-15);

  // Against a fine-grained Euler oracle for gain 0.8, drag -0.3.
  const LipParams lip{0.8, -0.3};
  const Vec2 u(1.0, -2.0);
  AgentState exact = step_agent_lip(s, u, 0.5, 1e9, lip);
  Vec2 p = s.p, v = s.v;
  const int substeps = 200000;
  const Scalar h = 0.5 / substeps;
  for (int i = 0; i < substeps; ++i) {
    const Vec2 vdot = lip.gain * u + lip.drag * v;
    p += h * v + 0.5 * h * h * vdot;
    v += h * vdot;
  }
  CHECK((exact.p - p).norm() <= 1e-6);
  CHECK((exact.v - v).norm() <= 1e-6);
}

TEST_CASE("obstacle_position follows the triangle wave") {
  Obstacle fixed = Obstacle::box(Vec2(0, 0), Vec2(1, 1));
  CHECK(obstacle_displacement(fixed, 12.34) == Vec2(0, 0));

  Obstacle moving = fixed;
  moving.motion = ObstacleMotion{1, 2.0, 1.0, 0.0};
  CHECK(obstacle_displacement(moving, 0.25) == Vec2(0, 0.5));
  CHECK(obstacle_displacement(moving, 1.0) == Vec2(0, 0.0));
  CHECK(obstacle_displacement(moving, 1.5) == Vec2(0, -1.0));

  // Exact periodicity over the full period 4*amplitude/speed, at times whose
  // shift by one period is exactly representable.
  const Scalar period = 4.0 * 1.0 / 2.0;
  for (Scalar t : {0.0, 0.25, 0.5, 1.25, 1.75}) {
    CHECK(obstacle_displacement(moving, t) == obstacle_displacement(moving, t + period));
  }
}

TEST_CASE("rasterize counts cells exactly") {
  const GridSpec spec = GridSpec::from_extent(Vec2(-2, -2), Vec2(2, 2), 0.1);

  SUBCASE("empty obstacle list leaves all cells free") {
    const OccupancyGrid grid = rasterize({}, 0.0, spec);
    for (uint8_t c : grid.cells()) CHECK(c == 0);
  }

  SUBCASE("unit square covers exactly 100 cells at resolution 0.1") {
    const OccupancyGrid grid = rasterize({Obstacle::box(Vec2(0, 0), Vec2(1, 1))}, 0.0, spec);
    int occupied = 0;
    for (uint8_t c : grid.cells()) occupied += c;
    CHECK(occupied == 100);
  }

  SUBCASE("dynamic obstacle grids repeat after a full period") {
    Obstacle moving = Obstacle::box(Vec2(-0.5, -0.5), Vec2(0.5, 0.5));
    moving.motion = ObstacleMotion{1, 2.0, 1.0, 0.0};
    const OccupancyGrid a = rasterize({moving}, 0.37, spec);
    const OccupancyGrid b = rasterize({moving}, 0.37 + 2.0, spec);
    CHECK(a == b);
  }
}

TEST_CASE("rasterize rejects obstacles that can escape the grid") {
  const GridSpec spec = GridSpec::from_extent(Vec2(-1, -1), Vec2(1, 1), 0.1);
  Obstacle moving = Obstacle::box(Vec2(-0.5, -0.5), Vec2(0.5, 0.5));
  moving.motion = ObstacleMotion{1, 2.0, 1.0, 0.0};  // amplitude 1 exits the 1 m extent
  CHECK_THROWS_AS(rasterize({moving}, 0.0, spec), ConfigError);
}

TEST_CASE("distance_to_obstacle is zero inside and positive outside") {
  const Obstacle box = Obstacle::box(Vec2(0, 0), Vec2(1, 1));
  CHECK(distance_to_obstacle(box, Vec2(0.5, 0.5), 0.0) == 0.0);
  CHECK(distance_to_obstacle(box, Vec2(2.0, 0.5), 0.0) == doctest::Approx(1.0));
  CHECK(distance_to_obstacle(box, Vec2(2.0, 2.0), 0.0) == doctest::Approx(std::sqrt(2.0)));
}
