#include "cbfsim/barrier.hpp"

#include <cmath>

namespace cbfsim {

Scalar eval_h(const ILCBF& cbf, const Vec2& p) {
  const Vec2 q = cbf.model.frame.to_local(p);
  return cbf.sign * (q.y() - cbf.model.eval(q.x()));
}

HDerivatives eval_h_derivs(const ILCBF& cbf, const AgentState& state) {
  const FitFrame& frame = cbf.model.frame;
  const Vec2 q = frame.to_local(state.p);
  const Vec2 vl = rot2(-frame.angle) * state.v;
  const Scalar fp = cbf.model.deriv(q.x());

  HDerivatives d;
  d.h = cbf.sign * (q.y() - cbf.model.eval(q.x()));
  d.h_dot = cbf.sign * (vl.y() - fp * vl.x());
  // h_ddot = sign*(a_yl - F'(x) a_xl) - sign*F''(x) v_xl^2 with F'' = 2*zeta0.
  const Vec2 row_local = cbf.sign * Vec2(-fp, 1.0);
  d.accel_row = rot2(frame.angle) * row_local;
  d.drift = -cbf.sign * 2.0 * cbf.model.zeta[0] * vl.x() * vl.x();
  return d;
}

std::vector<ILCBF> learn_ilcbfs(const PointCloud& cloud, const Vec2& agent_p,
                                const ClusterParams& cluster_params,
                                const RobustFitConfig& fit_cfg) {
  std::vector<ILCBF> out;
  if (cloud.points.empty()) return out;

  const ClusterLabels labels = dbscan(cloud.points, cluster_params);
  for (int k = 1; k <= labels.k; ++k) {
    std::vector<Vec2> pts;
    for (size_t j = 0; j < cloud.points.size(); ++j) {
      if (labels.label[j] == k) pts.push_back(cloud.points[j]);
    }
    // A quadratic is underdetermined below 3 points and non-robust at 3.
    if (pts.size() < 4) continue;

    Vec2 centroid = Vec2::Zero();
    for (const Vec2& p : pts) centroid += p;
    centroid /= static_cast<Scalar>(pts.size());
    Mat2 cov = Mat2::Zero();
    for (const Vec2& p : pts) {
      const Vec2 d = p - centroid;
      cov += d * d.transpose();
    }
    const Scalar angle = 0.5 * std::atan2(2.0 * cov(0, 1), cov(0, 0) - cov(1, 1));

    FitFrame frame{angle, centroid};
    std::vector<Scalar> xs(pts.size()), ys(pts.size());
    for (size_t j = 0; j < pts.size(); ++j) {
      const Vec2 q = frame.to_local(pts[j]);
      xs[j] = q.x();
      ys[j] = q.y();
    }

    FitDiagnostics diag;
    const std::optional<Eigen::Vector3d> zeta = irls_fit(xs, ys, fit_cfg, &diag);
    if (!zeta) continue;  // degenerate geometry even in the principal frame

    ILCBF cbf;
    cbf.model.zeta = *zeta;
    cbf.model.frame = frame;
    cbf.model.degraded = diag.degraded;
    cbf.stamp = cloud.stamp;
    const Vec2 qa = frame.to_local(agent_p);
    const Scalar val = qa.y() - cbf.model.eval(qa.x());
    if (std::abs(val) < 1e-12) continue;  // agent on the fitted curve
    cbf.sign = val > 0.0 ? +1 : -1;
    out.push_back(cbf);
  }
  return out;
}

std::vector<Vec2> barrier_zero_level(const ILCBF& cbf, Scalar x_lo, Scalar x_hi, int n) {
  std::vector<Vec2> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Scalar x = x_lo + (x_hi - x_lo) * i / (n - 1);
    out.push_back(cbf.model.frame.to_world(Vec2(x, cbf.model.eval(x))));
  }
  return out;
}

}  // namespace cbfsim
