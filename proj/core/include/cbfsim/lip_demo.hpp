#ifndef CBFSIM_LIP_DEMO_HPP
#define CBFSIM_LIP_DEMO_HPP

#include <functional>

#include "cbfsim/dynamics.hpp"
#include "cbfsim/estimator.hpp"
#include "cbfsim/types.hpp"

namespace cbfsim {

/// Identification testbed: the velocity subsystem vdot = gain*u + drag*v with
/// a sample-and-hold multisine input. The plant and both lag filters are
/// advanced with closed-form updates, so the identity target = Y_f * theta
/// holds to machine precision and the estimator sees no integration error.
struct LipDemoConfig {
  LipParams theta_true{0.8, -0.3};
  Scalar filter_k = 0.1;   // [s]
  Scalar dt = 1e-3;        // [s]
  Scalar amplitude = 1.0;  // excitation amplitude
  uint64_t seed = 0;       // randomizes excitation phases
};

class ExactLipPlant {
 public:
  explicit ExactLipPlant(const LipDemoConfig& cfg);

  void step();

  Scalar t() const { return t_; }
  const Vec2& v() const { return v_; }
  Vec2 input() const;                 // held input for the current step
  Mat2 regressor_filtered() const;    // columns [u_f, v_f]; Y*theta = gain*u + drag*v
  Vec2 target() const { return (v_ - v_f_) / cfg_.filter_k; }

 private:
  LipDemoConfig cfg_;
  Scalar t_ = 0.0;
  Vec2 v_ = Vec2::Zero();
  Vec2 u_f_ = Vec2::Zero();
  Vec2 v_f_ = Vec2::Zero();
  Scalar phase_[4] = {0, 0, 0, 0};
};

struct LipEstimationStep {
  Scalar t = 0.0;
  Eigen::Vector2d theta_before;
  Eigen::Vector2d theta_after;
  Mat2 Y_f;
  Vec2 target;
  Scalar lam_min_q = 0.0;
  bool rank_complete = false;
};

struct LipEstimationResult {
  Eigen::Vector2d theta_hat = Eigen::Vector2d::Zero();
  Scalar t0 = -1.0;       // first time the stack Gram became positive definite
  Scalar t_s = -1.0;      // certified settling time from that point
  Scalar v0 = 0.0;        // Lyapunov value at t0
  Scalar lam_q_at_t0 = 0.0;
  Scalar theta_err_final = 0.0;
};

/// Runs the concurrent-learning estimator on the exact testbed until
/// `horizon` seconds. History commits are attempted once the filtered
/// regressor clears `min_singular_gate`. The observer (optional) sees every
/// step after the plant/filter update.
LipEstimationResult run_lip_estimation(
    const LipDemoConfig& demo, const EstimatorConfig& est, int stack_capacity,
    Scalar min_singular_gate, Scalar horizon,
    const std::function<void(const LipEstimationStep&)>& observer = nullptr);

}  // namespace cbfsim

#endif  // CBFSIM_LIP_DEMO_HPP
