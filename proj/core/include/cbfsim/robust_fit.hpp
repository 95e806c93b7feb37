#ifndef CBFSIM_ROBUST_FIT_HPP
#define CBFSIM_ROBUST_FIT_HPP

#include <optional>
#include <vector>

#include "cbfsim/types.hpp"

namespace cbfsim {

/// Rotated local frame a cluster is fitted in: local = R(-angle) * (p - origin).
struct FitFrame {
  Scalar angle = 0.0;
  Vec2 origin = Vec2::Zero();

  Vec2 to_local(const Vec2& p) const { return rot2(-angle) * (p - origin); }
  Vec2 to_world(const Vec2& q) const { return rot2(angle) * q + origin; }
};

/// Quadratic boundary model F(x) = zeta0*x^2 + zeta1*x + zeta2 in a local frame.
struct PolynomialModel {
  Eigen::Vector3d zeta = Eigen::Vector3d::Zero();
  FitFrame frame;
  bool degraded = false;  // IRLS fell back to the least-squares fit

  Scalar eval(Scalar x) const { return zeta[0] * x * x + zeta[1] * x + zeta[2]; }
  Scalar deriv(Scalar x) const { return 2.0 * zeta[0] * x + zeta[1]; }
};

struct RobustFitConfig {
  Scalar c = 1.345;          // Tukey tuning constant
  int max_iters = 50;        // IRLS iteration cap
  Scalar tol = 1e-10;        // convergence threshold on the coefficient change
  Scalar scale_floor = 1e-6; // minimum residual scale [m]
};

struct FitDiagnostics {
  int iterations = 0;
  bool degraded = false;
  // Regularized weighted objective before and after each solve, evaluated
  // with that iteration's weights.
  std::vector<Scalar> wrss_before;
  std::vector<Scalar> wrss_after;
  std::vector<Scalar> final_weights;  // per input point, from the last iteration
};

/// Tukey biweight: (1-u^2)^2 inside the unit band, 0 outside.
inline Scalar tukey_weight(Scalar u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const Scalar q = 1.0 - u * u;
  return q * q;
}

/// One weighted quadratic solve (regularized normal equations); the building
/// block each IRLS iteration uses. Weights may be empty for uniform ones.
Eigen::Vector3d weighted_quadratic_solve(const std::vector<Scalar>& xs,
                                         const std::vector<Scalar>& ys,
                                         const std::vector<Scalar>& ws);

/// Quadratic least squares via regularized normal equations (ridge 1e-10).
/// Returns nullopt when the abscissae carry no spread (degenerate geometry);
/// the caller may retry in a re-rotated frame.
std::optional<Eigen::Vector3d> ols_fit(const std::vector<Scalar>& xs,
                                       const std::vector<Scalar>& ys);

/// Robust residual scale: max(1.48 * median |r - median(r)|, floor).
Scalar mad_scale(const std::vector<Scalar>& residuals, Scalar floor);

/// M-estimate quadratic fit: least-squares start, then iteratively reweighted
/// least squares with Tukey biweight on median-centered scaled residuals.
/// The scale is frozen from the initial least-squares residuals. If every
/// weight vanishes the least-squares fit is returned with `degraded` set.
std::optional<Eigen::Vector3d> irls_fit(const std::vector<Scalar>& xs,
                                        const std::vector<Scalar>& ys,
                                        const RobustFitConfig& cfg,
                                        FitDiagnostics* diag = nullptr);

}  // namespace cbfsim

#endif  // CBFSIM_ROBUST_FIT_HPP
