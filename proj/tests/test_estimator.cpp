#include <cmath>
#include <random>

#include "cbfsim/estimator.hpp"
#include "cbfsim/lip_demo.hpp"
#include "doctest.h"

using namespace cbfsim;

namespace {

EstimatorConfig scalar_config(Scalar k_t, Scalar k_h, Scalar eps_e = 1e-9) {
  EstimatorConfig cfg;
  cfg.gamma = Eigen::MatrixXd::Identity(1, 1);
  cfg.k_t = k_t;
  cfg.k_h = k_h;
  cfg.eps_e = eps_e;
  return cfg;
}

}  // namespace

TEST_CASE("filter_step: DC gain one, zero stays zero, exact step response") {
  FilterState fs = FilterState::zero(0.1, 1, 1, 1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd zero_m = Eigen::MatrixXd::Zero(1, 1);
  for (int i = 0; i < 50; ++i) filter_step(fs, zero, zero_m, zero, 0.01);
  CHECK(fs.x_f(0) == 0.0);

  // Constant input converges with residual e^{-T/k}.
  Eigen::VectorXd c(1);
  c << 3.0;
  fs = FilterState::zero(0.1, 1, 1, 1);
  for (int i = 0; i < 1000; ++i) filter_step(fs, c, zero_m, zero, 0.01);
  CHECK(std::abs(fs.x_f(0) - 3.0) <= 3.0 * std::exp(-1000.0 * 0.01 / 0.1) + 1e-12);

  // Step response after 10 steps of dt=0.01 at k=0.1 is (1 - e^{-1}) exactly.
  fs = FilterState::zero(0.1, 1, 1, 1);
  Eigen::VectorXd ones(1);
  ones << 1.0;
  for (int i = 0; i < 10; ++i) filter_step(fs, ones, zero_m, zero, 0.01);
  CHECK(std::abs(fs.x_f(0) - (1.0 - std::exp(-1.0))) <= 1e-12);
}

TEST_CASE("regression_target arithmetic") {
  FilterState fs = FilterState::zero(0.1, 2, 2, 2);
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  fs.x_f << 0.5, 0.0;
  const Eigen::VectorXd t = regression_target(fs, x);
  CHECK(t(0) == doctest::Approx(5.0));
  CHECK(t(1) == doctest::Approx(0.0));
  CHECK(regression_target(fs, fs.x_f).norm() == 0.0);
}

TEST_CASE("regression_target matches the continuous identity as dt shrinks") {
  // Simulate xdot = Y(t) * theta and check ||target - Y_f theta|| = O(dt).
  const Eigen::Vector2d theta(0.7, -0.4);
  Scalar errs[2];
  int idx = 0;
  for (const Scalar dt : {1e-3, 1e-4}) {
    FilterState fs = FilterState::zero(0.05, 1, 2, 1);
    Scalar x = 0.0;
    Scalar t = 0.0;
    Scalar worst = 0.0;
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
    for (int i = 0; i < static_cast<int>(2.0 / dt); ++i) {
      Eigen::MatrixXd ym(1, 2);
      ym << std::sin(1.7 * (t + 0.5 * dt)), std::cos(0.9 * (t + 0.5 * dt));
      Eigen::VectorXd xv(1);
      x += dt * (ym * theta)(0);  // midpoint rule keeps plant error subdominant
      t += dt;
      xv << x;
      Eigen::MatrixXd y_next(1, 2);
      y_next << std::sin(1.7 * t), std::cos(0.9 * t);
      filter_step(fs, xv, y_next, u, dt);
      if (t > 0.5) {
        const Scalar err = std::abs((regression_target(fs, xv) - fs.Y_f * theta)(0));
        worst = std::max(worst, err);
      }
    }
    errs[idx++] = worst;
  }
  CHECK(errs[0] / errs[1] > 5.0);  // one order of dt apart, with slack
  CHECK(errs[1] < 1e-3);
}

TEST_CASE("history_insert: append, rank completion, and refusal to regress") {
  // Rank-1 regressors aligned with e1 fill the stack.
  Eigen::MatrixXd y1(1, 2);
  y1 << 1.0, 0.0;
  const Eigen::VectorXd t1 = Eigen::VectorXd::Zero(1);
  HistoryStack stack(5, 2);
  CHECK(stack.insert(y1, t1));
  CHECK(stack.size() == 1);
  for (int i = 0; i < 4; ++i) stack.insert(y1, t1);
  CHECK(stack.size() == 5);
  CHECK(stack.lambda_min() == doctest::Approx(0.0));

  // An orthogonal direction strictly raises lambda_min.
  Eigen::MatrixXd y2(1, 2);
  y2 << 0.0, 1.0;
  CHECK(stack.insert(y2, t1));
  CHECK(stack.lambda_min() > 0.0);
  CHECK(stack.lambda_min() == doctest::Approx(1.0));  // Q = diag(4, 1)

  // A tiny regressor whose best replacement would lower lambda_min is refused.
  Eigen::MatrixXd weak(1, 2);
  weak << 1e-3, 0.0;
  const Scalar before = stack.lambda_min();
  CHECK(!stack.insert(weak, t1));
  CHECK(stack.lambda_min() == before);
}

TEST_CASE("lambda_min never decreases over random insert streams") {
  std::mt19937_64 rng(3);
  std::normal_distribution<Scalar> g(0.0, 1.0);
  HistoryStack stack(8, 2);
  Scalar last = 0.0;
  for (int i = 0; i < 200; ++i) {
    Eigen::MatrixXd y(2, 2);
    y << g(rng), g(rng), g(rng), g(rng);
    stack.insert(y, Eigen::VectorXd::Zero(2));
    CHECK(stack.lambda_min() >= last - 1e-12);
    last = stack.lambda_min();
  }
  CHECK(stack.lambda_min() > 0.0);
}

TEST_CASE("update_step: truth is a fixed point") {
  Eigen::MatrixXd y(1, 1);
  y << 2.0;
  const Eigen::VectorXd theta_true = Eigen::VectorXd::Constant(1, 0.8);
  HistoryStack stack(5, 1);
  stack.insert(y, y * theta_true);
  const EstimatorConfig cfg = scalar_config(1.0, 1.0);
  const Eigen::VectorXd next = update_step(theta_true, y, y * theta_true, stack, cfg, 1e-3);
  CHECK((next - theta_true).norm() == 0.0);
}

TEST_CASE("update_step: scalar hand reduction with unit regressors") {
  // Y_f = 1, stack of five unit entries, Gamma = 1:
  // theta' = theta - dt*(k_t*sign(theta_err) + 5*k_h*theta_err).
  const Scalar k_t = 0.3, k_h = 0.7, dt = 1e-2;
  Eigen::MatrixXd y(1, 1);
  y << 1.0;
  HistoryStack stack(5, 1);
  for (int i = 0; i < 5; ++i) stack.insert(y, Eigen::VectorXd::Zero(1));
  const EstimatorConfig cfg = scalar_config(k_t, k_h);
  Eigen::VectorXd theta(1);
  theta << 0.5;  // theta* = 0, so the error equals theta
  const Eigen::VectorXd next =
      update_step(theta, y, Eigen::VectorXd::Zero(1), stack, cfg, dt);
  const Scalar expected = 0.5 - dt * (k_t * 1.0 + 5.0 * k_h * 0.5);
  CHECK(next(0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("update_step: deadzone suppresses the normalized term") {
  Eigen::MatrixXd y(1, 1);
  y << 1.0;
  HistoryStack stack(5, 1);
  const EstimatorConfig cfg = scalar_config(1.0, 1.0, /*eps_e=*/1e-3);
  Eigen::VectorXd theta(1);
  theta << 1e-4;  // ||e_f|| = 1e-4 < eps_e, empty stack: nothing moves
  const Eigen::VectorXd next =
      update_step(theta, y, Eigen::VectorXd::Zero(1), stack, cfg, 1e-2);
  CHECK(next(0) == theta(0));
}

TEST_CASE("update_step rejects a non-finite estimate") {
  Eigen::MatrixXd y(1, 1);
  y << 1.0;
  HistoryStack stack(2, 1);
  Eigen::VectorXd bad(1);
  bad << std::nan("");
  CHECK_THROWS(update_step(bad, y, Eigen::VectorXd::Zero(1), stack, scalar_config(1, 1), 1e-3));
}

TEST_CASE("error norm decreases monotonically above the deadzone floor") {
  std::mt19937_64 rng(11);
  std::normal_distribution<Scalar> g(0.0, 1.0);
  HistoryStack stack(10, 2);
  for (int i = 0; i < 10; ++i) {
    Eigen::MatrixXd y(2, 2);
    y << g(rng), g(rng), g(rng), g(rng);
    stack.insert(y, y * Eigen::Vector2d(0.8, -0.3));
  }
  REQUIRE(stack.lambda_min() > 0.0);
  EstimatorConfig cfg;
  cfg.gamma = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  cfg.k_t = 1e-6;
  cfg.k_h = 1.0;
  cfg.eps_e = 1e-9;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(2);
  const Eigen::Vector2d truth(0.8, -0.3);
  Scalar last = (theta - truth).norm();
  for (int i = 0; i < 4000; ++i) {
    Eigen::MatrixXd y(2, 2);
    y << g(rng), g(rng), g(rng), g(rng);
    theta = update_step(theta, y, y * truth, stack, cfg, 1e-3);
    const Scalar err = (theta - truth).norm();
    if (last > 1e-8) CHECK(err < last);
    last = err;
  }
  CHECK(last < 1e-6);
}

TEST_CASE("finite_time_bound closed form and monotonicity") {
  // With lam_gamma*lam_q = 1/2 the certificate constants reduce to alpha=k_h,
  // beta=k_t; V0=1, k_t=1, k_h=2 then give T0 + ln(3).
  const Scalar t_s = finite_time_bound(1.0, 0.0, /*k_t=*/1.0, /*k_h=*/2.0, /*lam_q=*/0.5,
                                       /*lam_gamma=*/1.0);
  CHECK(t_s == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  CHECK(finite_time_bound(0.0, 7.5, 1.0, 1.0, 1.0, 1.0) == 7.5);

  const Scalar slower = finite_time_bound(1.0, 0.0, 1.0, 1.0, 0.5, 1.0);
  const Scalar faster = finite_time_bound(1.0, 0.0, 1.0, 2.0, 0.5, 1.0);
  CHECK(faster < slower);

  CHECK_THROWS_AS(finite_time_bound(1.0, 0.0, 1.0, 1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("exact testbed: the filtered identity holds to machine precision") {
  for (uint64_t seed : {0ULL, 1ULL, 2ULL}) {
    LipDemoConfig demo;
    demo.seed = seed;
    ExactLipPlant plant(demo);
    const Eigen::Vector2d theta(demo.theta_true.gain, demo.theta_true.drag);
    Scalar worst = 0.0;
    for (int i = 0; i < 5000; ++i) {
      plant.step();
      const Vec2 err = plant.target() - plant.regressor_filtered() * theta;
      worst = std::max(worst, err.norm());
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("exact testbed converges to the hidden parameters") {
  LipDemoConfig demo;
  demo.seed = 4;
  EstimatorConfig cfg;
  cfg.gamma = Eigen::MatrixXd::Identity(2, 2);
  cfg.k_t = 3e-10;
  cfg.k_h = 1.0;
  cfg.eps_e = 1e-9;
  const LipEstimationResult result = run_lip_estimation(demo, cfg, 20, 0.5, 20.0);
  CHECK(result.t0 > 0.0);
  CHECK(result.t_s > result.t0);
  CHECK(result.theta_err_final < 1e-8);
}
