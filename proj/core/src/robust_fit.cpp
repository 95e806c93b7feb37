#include "cbfsim/robust_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace cbfsim {

namespace {

constexpr Scalar kRidge = 1e-10;

Scalar median(std::vector<Scalar> v) {
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  Scalar hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

std::vector<Scalar> residuals_of(const std::vector<Scalar>& xs, const std::vector<Scalar>& ys,
                                 const Eigen::Vector3d& zeta) {
  std::vector<Scalar> r(xs.size());
  for (size_t j = 0; j < xs.size(); ++j) {
    r[j] = ys[j] - (zeta[0] * xs[j] * xs[j] + zeta[1] * xs[j] + zeta[2]);
  }
  return r;
}

}  // namespace

Eigen::Vector3d weighted_quadratic_solve(const std::vector<Scalar>& xs,
                                         const std::vector<Scalar>& ys,
                                         const std::vector<Scalar>& ws) {
  Eigen::Matrix3d ata = kRidge * Eigen::Matrix3d::Identity();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (size_t j = 0; j < xs.size(); ++j) {
    const Scalar w = ws.empty() ? 1.0 : ws[j];
    if (w <= 0.0) continue;
    const Eigen::Vector3d row(xs[j] * xs[j], xs[j], 1.0);
    ata += w * row * row.transpose();
    atb += w * ys[j] * row;
  }
  return ata.ldlt().solve(atb);
}

std::optional<Eigen::Vector3d> ols_fit(const std::vector<Scalar>& xs,
                                       const std::vector<Scalar>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) return std::nullopt;
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (*mx - *mn < 1e-9) return std::nullopt;  // all abscissae equal
  return weighted_quadratic_solve(xs, ys, {});
}

Scalar mad_scale(const std::vector<Scalar>& residuals, Scalar floor) {
  if (residuals.size() < 2) return floor;
  const Scalar med = median(residuals);
  std::vector<Scalar> dev(residuals.size());
  for (size_t j = 0; j < residuals.size(); ++j) dev[j] = std::abs(residuals[j] - med);
  return std::max(1.48 * median(dev), floor);
}

std::optional<Eigen::Vector3d> irls_fit(const std::vector<Scalar>& xs,
                                        const std::vector<Scalar>& ys,
                                        const RobustFitConfig& cfg, FitDiagnostics* diag) {
  if (cfg.c <= 0.0 || cfg.max_iters < 1 || cfg.tol <= 0.0 || cfg.scale_floor <= 0.0) {
    throw ConfigError("robust fit config: require c > 0, max_iters >= 1, tol > 0, scale_floor > 0");
  }
  const std::optional<Eigen::Vector3d> init = ols_fit(xs, ys);
  if (!init) return std::nullopt;

  Eigen::Vector3d zeta = *init;
  const Scalar scale = mad_scale(residuals_of(xs, ys, zeta), cfg.scale_floor);
  const Scalar band = cfg.c * scale;

  if (diag) *diag = FitDiagnostics{};
  std::vector<Scalar> w(xs.size(), 1.0);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const std::vector<Scalar> r = residuals_of(xs, ys, zeta);
    // Tukey biweight on scaled residuals, centered on the residual median so
    // that a contaminated least-squares start cannot blank out the inliers.
    const Scalar center = median(r);
    Scalar wsum = 0.0;
    for (size_t j = 0; j < r.size(); ++j) {
      w[j] = tukey_weight((r[j] - center) / band);
      wsum += w[j];
    }
    if (wsum <= 0.0) {
      if (diag) diag->degraded = true;
      Eigen::Vector3d fallback = *init;
      return fallback;
    }
    const Eigen::Vector3d next = weighted_quadratic_solve(xs, ys, w);
    if (diag) {
      auto objective = [&](const Eigen::Vector3d& z) {
        Scalar obj = kRidge * z.squaredNorm();
        const std::vector<Scalar> rz = residuals_of(xs, ys, z);
        for (size_t j = 0; j < rz.size(); ++j) obj += w[j] * rz[j] * rz[j];
        return obj;
      };
      diag->wrss_before.push_back(objective(zeta));
      diag->wrss_after.push_back(objective(next));
      diag->iterations = it + 1;
    }
    const Scalar delta = (next - zeta).norm();
    zeta = next;
    if (delta < cfg.tol) break;
  }
  if (diag) diag->final_weights = w;
  return zeta;
}

}  // namespace cbfsim
