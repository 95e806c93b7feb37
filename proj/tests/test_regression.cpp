#include <cmath>
#include <random>

#include "cbfsim/barrier.hpp"
#include "cbfsim/robust_fit.hpp"
#include "doctest.h"

using namespace cbfsim;

namespace {

void make_quadratic(std::vector<Scalar>& xs, std::vector<Scalar>& ys, int n, Scalar noise_sigma,
                    std::mt19937_64& rng) {
  std::uniform_real_distribution<Scalar> ux(-1.0, 1.0);
  std::normal_distribution<Scalar> noise(0.0, noise_sigma);
  xs.clear();
  ys.clear();
  for (int i = 0; i < n; ++i) {
    const Scalar x = ux(rng);
    xs.push_back(x);
    ys.push_back(x * x + (noise_sigma > 0 ? noise(rng) : 0.0));
  }
}

}  // namespace

TEST_CASE("ols_fit interpolates noiseless data") {
  std::vector<Scalar> xs, ys;
  for (int i = 0; i < 12; ++i) {
    const Scalar x = -1.0 + 2.0 * i / 11.0;
    xs.push_back(x);
    ys.push_back(x * x);
  }
  auto zeta = ols_fit(xs, ys);
  REQUIRE(zeta);
  CHECK((*zeta - Eigen::Vector3d(1, 0, 0)).norm() <= 1e-9);

  for (size_t i = 0; i < xs.size(); ++i) ys[i] = 2.0 * xs[i] + 1.0;
  zeta = ols_fit(xs, ys);
  REQUIRE(zeta);
  CHECK((*zeta - Eigen::Vector3d(0, 2, 1)).norm() <= 1e-9);
}

TEST_CASE("ols_fit recovers the generator under mild noise") {
  std::mt19937_64 rng(5);
  std::vector<Scalar> xs, ys;
  make_quadratic(xs, ys, 50, 0.01, rng);
  const auto zeta = ols_fit(xs, ys);
  REQUIRE(zeta);
  CHECK((*zeta - Eigen::Vector3d(1, 0, 0)).norm() < 0.05);
}

TEST_CASE("ols_fit signals degenerate abscissae") {
  const std::vector<Scalar> xs(10, 0.5);
  std::vector<Scalar> ys(10);
  for (int i = 0; i < 10; ++i) ys[i] = i * 0.1;
  CHECK(!ols_fit(xs, ys));
  CHECK(!ols_fit({0.0, 1.0}, {0.0, 1.0}));  // too few points
}

TEST_CASE("mad_scale hand values") {
  CHECK(mad_scale({0.0, 0.0, 0.0}, 1e-6) == 1e-6);
  CHECK(mad_scale({-1.0, 0.0, 1.0}, 1e-6) == doctest::Approx(1.48));
  CHECK(mad_scale({0.0, 0.0, 0.0, 10.0}, 1e-6) == 1e-6);  // outlier cannot inflate the scale
  CHECK(mad_scale({3.0}, 1e-6) == 1e-6);                  // too few residuals
}

TEST_CASE("irls_fit equals ols_fit on noiseless data") {
  std::vector<Scalar> xs, ys;
  for (int i = 0; i < 15; ++i) {
    const Scalar x = -1.0 + 2.0 * i / 14.0;
    xs.push_back(x);
    ys.push_back(0.3 * x * x - 0.2 * x + 0.7);
  }
  const auto robust = irls_fit(xs, ys, RobustFitConfig{});
  const auto plain = ols_fit(xs, ys);
  REQUIRE(robust);
  REQUIRE(plain);
  CHECK((*robust - *plain).norm() <= 1e-9);
}

TEST_CASE("irls_fit shrugs off gross one-sided outliers that wreck least squares") {
  std::mt19937_64 rng(17);
  std::vector<Scalar> xs, ys;
  make_quadratic(xs, ys, 40, 0.01, rng);
  std::uniform_real_distribution<Scalar> ux(-1.0, 1.0);
  for (int i = 0; i < 8; ++i) {
    const Scalar x = ux(rng);
    xs.push_back(x);
    ys.push_back(x * x + 5.0);
  }
  const auto robust = irls_fit(xs, ys, RobustFitConfig{});
  const auto plain = ols_fit(xs, ys);
  REQUIRE(robust);
  REQUIRE(plain);
  CHECK((*robust - Eigen::Vector3d(1, 0, 0)).norm() < 0.05);
  CHECK((*plain - Eigen::Vector3d(1, 0, 0)).norm() > 0.3);
}

TEST_CASE("three collinear points produce a regularized linear fit") {
  const std::vector<Scalar> xs{-1.0, 0.0, 1.0};
  const std::vector<Scalar> ys{-2.0, 0.0, 2.0};
  const auto zeta = irls_fit(xs, ys, RobustFitConfig{});
  REQUIRE(zeta);
  CHECK(std::abs((*zeta)[0]) <= 1e-6);
  CHECK((*zeta)[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("weighted objective never increases within a weights-then-solve step") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Scalar> xs, ys;
    make_quadratic(xs, ys, 30, 0.05, rng);
    // Salt with a few outliers so the iteration actually does work.
    std::uniform_real_distribution<Scalar> ux(-1.0, 1.0);
    for (int i = 0; i < 4; ++i) {
      xs.push_back(ux(rng));
      ys.push_back(3.0 * ux(rng));
    }
    FitDiagnostics diag;
    const auto zeta = irls_fit(xs, ys, RobustFitConfig{}, &diag);
    REQUIRE(zeta);
    REQUIRE(diag.wrss_before.size() == diag.wrss_after.size());
    for (size_t i = 0; i < diag.wrss_before.size(); ++i) {
      CHECK(diag.wrss_after[i] <= diag.wrss_before[i] * (1.0 + 1e-12) + 1e-15);
    }
  }
}

TEST_CASE("a fresh point beyond the rejection band gets weight exactly zero") {
  std::mt19937_64 rng(31);
  std::vector<Scalar> xs, ys;
  make_quadratic(xs, ys, 40, 0.01, rng);
  const RobustFitConfig cfg;
  const auto before = irls_fit(xs, ys, cfg);
  REQUIRE(before);

  xs.push_back(0.5);
  ys.push_back(0.25 + 50.0);  // residual far beyond c*scale
  FitDiagnostics diag;
  const auto after = irls_fit(xs, ys, cfg, &diag);
  REQUIRE(after);
  REQUIRE(diag.final_weights.size() == xs.size());
  CHECK(diag.final_weights.back() == 0.0);
  // The contaminated refit stays near the clean one and the truth.
  CHECK((*after - *before).norm() <= 0.05);
  CHECK((*after - Eigen::Vector3d(1, 0, 0)).norm() <= 0.05);

  // Fixed-weights step: re-solving at the converged state with the outlier
  // zero-weighted reproduces the converged coefficients.
  std::vector<Scalar> w;
  std::vector<Scalar> r;
  for (size_t j = 0; j < xs.size(); ++j) {
    r.push_back(ys[j] - ((*after)[0] * xs[j] * xs[j] + (*after)[1] * xs[j] + (*after)[2]));
  }
  std::vector<Scalar> sorted = r;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const Scalar center = sorted[sorted.size() / 2];
  // The scale is frozen from the initial least-squares residuals, exactly as
  // the iteration computes it.
  const auto init = ols_fit(xs, ys);
  REQUIRE(init);
  std::vector<Scalar> r0;
  for (size_t j = 0; j < xs.size(); ++j) {
    r0.push_back(ys[j] - ((*init)[0] * xs[j] * xs[j] + (*init)[1] * xs[j] + (*init)[2]));
  }
  const Scalar band = cfg.c * mad_scale(r0, cfg.scale_floor);
  for (Scalar rj : r) w.push_back(tukey_weight((rj - center) / band));
  CHECK(w.back() == 0.0);
  const Eigen::Vector3d resolved = weighted_quadratic_solve(xs, ys, w);
  CHECK((resolved - *after).norm() <= 1e-4);
}

// ---- barrier construction and derivatives ----

TEST_CASE("eval_h_derivs hand values") {
  ILCBF flat;
  flat.model.zeta = Eigen::Vector3d(0, 0, 0);
  flat.sign = +1;
  AgentState s;
  s.p = Vec2(1, 2);
  s.v = Vec2(3, 4);
  HDerivatives d = eval_h_derivs(flat, s);
  CHECK(d.h == doctest::Approx(2.0));
  CHECK(d.h_dot == doctest::Approx(4.0));
  CHECK(d.accel_row.x() == doctest::Approx(0.0));
  CHECK(d.accel_row.y() == doctest::Approx(1.0));
  CHECK(d.drift == doctest::Approx(0.0));

  ILCBF parabola;
  parabola.model.zeta = Eigen::Vector3d(1, 0, 0);
  parabola.sign = +1;
  s.p = Vec2(1, 2);
  s.v = Vec2(1, 0);
  d = eval_h_derivs(parabola, s);
  CHECK(d.h == doctest::Approx(1.0));
  CHECK(d.h_dot == doctest::Approx(-2.0));
  CHECK(d.accel_row.x() == doctest::Approx(-2.0));
  CHECK(d.accel_row.y() == doctest::Approx(1.0));
  CHECK(d.drift == doctest::Approx(-2.0));
}

TEST_CASE("analytic derivatives match finite differences along free flight") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<Scalar> uni(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ILCBF cbf;
    cbf.model.zeta = Eigen::Vector3d(uni(rng), uni(rng), uni(rng));
    cbf.model.frame.angle = uni(rng);
    cbf.model.frame.origin = Vec2(uni(rng), uni(rng));
    cbf.sign = uni(rng) > 0 ? +1 : -1;
    AgentState s;
    s.p = Vec2(2.0 * uni(rng), 2.0 * uni(rng));
    s.v = Vec2(uni(rng), uni(rng));
    const Vec2 u(uni(rng), uni(rng));

    const HDerivatives d = eval_h_derivs(cbf, s);
    const Scalar delta = 1e-4;  // small enough for O(delta^2) truncation, large
                                // enough that the second difference is not
                                // rounding-dominated
    // One exact kinematic step of size delta under constant u.
    AgentState fwd;
    fwd.p = s.p + delta * s.v + 0.5 * delta * delta * u;
    fwd.v = s.v + delta * u;
    AgentState bwd;
    bwd.p = s.p - delta * s.v + 0.5 * delta * delta * u;
    bwd.v = s.v - delta * u;

    const Scalar h0 = eval_h(cbf, s.p);
    const Scalar hf = eval_h(cbf, fwd.p);
    const Scalar hb = eval_h(cbf, bwd.p);
    const Scalar hdot_fd = (hf - hb) / (2.0 * delta);
    const Scalar hddot_fd = (hf - 2.0 * h0 + hb) / (delta * delta);
    CHECK(std::abs(d.h_dot - hdot_fd) <= 1e-6 * std::max(1.0, std::abs(d.h_dot)));
    const Scalar hddot = d.accel_row.dot(u) + d.drift;
    CHECK(std::abs(hddot - hddot_fd) <= 1e-5 * std::max(1.0, std::abs(hddot)));
  }
}

TEST_CASE("learn_ilcbfs on an empty cloud returns nothing") {
  CHECK(learn_ilcbfs(PointCloud{}, Vec2(0, 0), ClusterParams{}, RobustFitConfig{}).empty());
}

TEST_CASE("a wall below the agent produces one sign-correct barrier near the truth") {
  // Synthetic noiseless hits on the line y = -1 (agent above at the origin).
  PointCloud cloud;
  for (int i = 0; i < 30; ++i) {
    cloud.points.emplace_back(-1.0 + 2.0 * i / 29.0, -1.0);
  }
  const std::vector<ILCBF> barriers =
      learn_ilcbfs(cloud, Vec2(0, 0), ClusterParams{0.3, 3}, RobustFitConfig{});
  REQUIRE(barriers.size() == 1);
  CHECK(eval_h(barriers[0], Vec2(0, 0)) > 0.0);
  for (const Vec2& p : barrier_zero_level(barriers[0], -0.9, 0.9, 50)) {
    CHECK(std::abs(p.y() + 1.0) <= 1e-9);
  }
}

TEST_CASE("a vertical wall fits in the rotated frame without degeneracy") {
  PointCloud cloud;
  for (int i = 0; i < 30; ++i) {
    cloud.points.emplace_back(1.5, -1.0 + 2.0 * i / 29.0);
  }
  const std::vector<ILCBF> barriers =
      learn_ilcbfs(cloud, Vec2(0, 0), ClusterParams{0.3, 3}, RobustFitConfig{});
  REQUIRE(barriers.size() == 1);
  CHECK(eval_h(barriers[0], Vec2(0, 0)) > 0.0);
  for (const Vec2& p : barrier_zero_level(barriers[0], -0.9, 0.9, 50)) {
    CHECK(std::abs(p.x() - 1.5) <= 1e-9);
  }
}

TEST_CASE("two separated obstacles produce two sign-correct barriers") {
  PointCloud cloud;
  for (int i = 0; i < 25; ++i) {
    const Scalar x = -1.0 + 2.0 * i / 24.0;
    cloud.points.emplace_back(x, 1.2);   // wall above
    cloud.points.emplace_back(x, -1.7);  // wall below
  }
  const std::vector<ILCBF> barriers =
      learn_ilcbfs(cloud, Vec2(0, 0), ClusterParams{0.3, 3}, RobustFitConfig{});
  REQUIRE(barriers.size() == 2);
  for (const ILCBF& cbf : barriers) CHECK(eval_h(cbf, Vec2(0, 0)) > 0.0);
}

TEST_CASE("tiny or collapsed clusters are skipped") {
  PointCloud cloud;
  cloud.points = {Vec2(1, 1), Vec2(1.05, 1), Vec2(1.1, 1)};  // only 3 points
  CHECK(learn_ilcbfs(cloud, Vec2(0, 0), ClusterParams{0.3, 3}, RobustFitConfig{}).empty());

  // Many copies of one location: principal frame has no abscissa spread.
  cloud.points.assign(10, Vec2(1, 1));
  CHECK(learn_ilcbfs(cloud, Vec2(0, 0), ClusterParams{0.3, 3}, RobustFitConfig{}).empty());
}
