#ifndef CBFSIM_ESTIMATOR_HPP
#define CBFSIM_ESTIMATOR_HPP

#include <Eigen/Core>
#include <vector>

#include "cbfsim/types.hpp"

namespace cbfsim {

/// First-order lag states for the measured state, the regressor columns, and
/// the input. All start at zero.
struct FilterState {
  Scalar time_constant = 0.1;  // [s]
  Eigen::VectorXd x_f;         // n
  Eigen::MatrixXd Y_f;         // n x (p+q)
  Eigen::VectorXd u_f;         // m

  static FilterState zero(Scalar time_constant, int n, int pq, int m);
};

/// Exact one-step lag update z' = a*z + (1-a)*z_new with a = exp(-dt/k),
/// applied to x_f, each column of Y_f, and u_f.
void filter_step(FilterState& fs, const Eigen::VectorXd& x, const Eigen::MatrixXd& Y,
                 const Eigen::VectorXd& u, Scalar dt);

/// Filtered-rate target (x - x_f)/k; equals Y_f * theta in continuous time.
Eigen::VectorXd regression_target(const FilterState& fs, const Eigen::VectorXd& x);

/// Bounded memory of (Y_f, target) pairs managed to keep the Gram matrix
/// Q = sum Y_c^T Y_c as well conditioned as possible: appends until full,
/// then replaces only when the replacement does not decrease lambda_min(Q).
class HistoryStack {
 public:
  struct Entry {
    Eigen::MatrixXd Y;
    Eigen::VectorXd target;
  };

  HistoryStack(int capacity, int pq);

  /// Returns true when the stack changed.
  bool insert(const Eigen::MatrixXd& Y, const Eigen::VectorXd& target);

  int size() const { return static_cast<int>(entries_.size()); }
  int capacity() const { return capacity_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  Scalar lambda_min() const { return lambda_min_; }
  Scalar lambda_max() const;

 private:
  void recompute();

  int capacity_;
  std::vector<Entry> entries_;
  Eigen::MatrixXd gram_;
  Scalar lambda_min_ = 0.0;
};

struct EstimatorConfig {
  Eigen::MatrixXd gamma;   // adaptation gain, symmetric positive definite
  Scalar k_t = 1.0;        // current-data gain
  Scalar k_h = 1.0;        // history-data gain
  Scalar eps_e = 1e-9;     // deadzone on ||e_f|| for the normalized term
};

/// One explicit-Euler step of the concurrent-learning update law
///   theta' = theta - dt*( Gamma k_t Y_f^T e_f / ||e_f||  +  sum_c Gamma k_h Y_c^T e_c )
/// with e_f = Y_f theta - target and the normalized term disabled when
/// ||e_f|| < eps_e. Throws on a non-finite estimate.
Eigen::VectorXd update_step(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& Y_f,
                            const Eigen::VectorXd& target, const HistoryStack& stack,
                            const EstimatorConfig& cfg, Scalar dt);

/// Settling-time certificate: with alpha = 2 k_h lam_gamma lam_q and
/// beta = k_t sqrt(2 lam_gamma lam_q),
///   T_s = T0 + (1/(alpha(1-g))) * ln((alpha V0^{1-g} + beta)/beta),  g = 1/2.
/// Requires lam_q > 0 (rank condition met).
Scalar finite_time_bound(Scalar v0, Scalar t0, Scalar k_t, Scalar k_h, Scalar lam_q,
                         Scalar lam_gamma);

/// Certified per-step decrease rate -beta*sqrt(2V) - alpha*V used by the
/// runtime Lyapunov assertions.
Scalar certified_decrease_rate(Scalar v, Scalar k_t, Scalar k_h, Scalar lam_q,
                               Scalar lam_gamma);

}  // namespace cbfsim

#endif  // CBFSIM_ESTIMATOR_HPP
