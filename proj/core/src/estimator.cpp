#include "cbfsim/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace cbfsim {

namespace {

Scalar min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

FilterState FilterState::zero(Scalar time_constant, int n, int pq, int m) {
  FilterState fs;
  fs.time_constant = time_constant;
  fs.x_f = Eigen::VectorXd::Zero(n);
  fs.Y_f = Eigen::MatrixXd::Zero(n, pq);
  fs.u_f = Eigen::VectorXd::Zero(m);
  return fs;
}

void filter_step(FilterState& fs, const Eigen::VectorXd& x, const Eigen::MatrixXd& Y,
                 const Eigen::VectorXd& u, Scalar dt) {
  if (!(dt > 0.0) || !(fs.time_constant > 0.0)) {
    throw std::invalid_argument("filter_step: require dt > 0 and time constant > 0");
  }
  const Scalar a = std::exp(-dt / fs.time_constant);
  fs.x_f = a * fs.x_f + (1.0 - a) * x;
  fs.Y_f = a * fs.Y_f + (1.0 - a) * Y;
  fs.u_f = a * fs.u_f + (1.0 - a) * u;
}

Eigen::VectorXd regression_target(const FilterState& fs, const Eigen::VectorXd& x) {
  return (x - fs.x_f) / fs.time_constant;
}

HistoryStack::HistoryStack(int capacity, int pq) : capacity_(capacity) {
  gram_ = Eigen::MatrixXd::Zero(pq, pq);
}

void HistoryStack::recompute() {
  gram_.setZero();
  for (const Entry& e : entries_) gram_ += e.Y.transpose() * e.Y;
  lambda_min_ = entries_.empty() ? 0.0 : min_eigenvalue(gram_);
}

Scalar HistoryStack::lambda_max() const {
  if (entries_.empty()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

bool HistoryStack::insert(const Eigen::MatrixXd& Y, const Eigen::VectorXd& target) {
  if (size() < capacity_) {
    entries_.push_back({Y, target});
    recompute();
    return true;
  }
  // Full: find the replacement maximizing lambda_min(Q); commit only if it
  // does not decrease.
  const Eigen::MatrixXd gain = Y.transpose() * Y;
  int best = -1;
  Scalar best_lam = lambda_min_;
  for (int c = 0; c < size(); ++c) {
    const Eigen::MatrixXd q_try = gram_ - entries_[c].Y.transpose() * entries_[c].Y + gain;
    const Scalar lam = min_eigenvalue(q_try);
    if (lam > best_lam + 1e-15) {
      best_lam = lam;
      best = c;
    }
  }
  if (best < 0) return false;
  entries_[best] = {Y, target};
  recompute();
  return true;
}

Eigen::VectorXd update_step(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& Y_f,
                            const Eigen::VectorXd& target, const HistoryStack& stack,
                            const EstimatorConfig& cfg, Scalar dt) {
  if (!theta_hat.allFinite()) {
    throw std::runtime_error("update_step: estimate is non-finite");
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta_hat.size());
  const Eigen::VectorXd e_f = Y_f * theta_hat - target;
  const Scalar norm_e = e_f.norm();
  if (norm_e >= cfg.eps_e) {
    grad += cfg.k_t * (Y_f.transpose() * e_f) / std::max(norm_e, cfg.eps_e);
  }
  for (const HistoryStack::Entry& entry : stack.entries()) {
    const Eigen::VectorXd e_c = entry.Y * theta_hat - entry.target;
    grad += cfg.k_h * (entry.Y.transpose() * e_c);
  }
  Eigen::VectorXd next = theta_hat - dt * (cfg.gamma * grad);
  if (!next.allFinite()) {
    throw std::runtime_error("update_step: estimate diverged to non-finite values");
  }
  return next;
}

Scalar finite_time_bound(Scalar v0, Scalar t0, Scalar k_t, Scalar k_h, Scalar lam_q,
                         Scalar lam_gamma) {
  if (!(lam_q > 0.0)) {
    throw std::domain_error("finite_time_bound: rank condition unmet (lambda_min(Q) <= 0)");
  }
  if (v0 < 0.0) throw std::domain_error("finite_time_bound: V0 must be >= 0");
  if (v0 == 0.0) return t0;
  const Scalar alpha = 2.0 * k_h * lam_gamma * lam_q;
  const Scalar beta = k_t * std::sqrt(2.0 * lam_gamma * lam_q);
  const Scalar g = 0.5;
  return t0 + (1.0 / (alpha * (1.0 - g))) *
                  std::log((alpha * std::pow(v0, 1.0 - g) + beta) / beta);
}

Scalar certified_decrease_rate(Scalar v, Scalar k_t, Scalar k_h, Scalar lam_q,
                               Scalar lam_gamma) {
  const Scalar alpha = 2.0 * k_h * lam_gamma * lam_q;
  const Scalar beta = k_t * std::sqrt(2.0 * lam_gamma * lam_q);
  return -beta * std::sqrt(2.0 * v) - alpha * v;
}

}  // namespace cbfsim
