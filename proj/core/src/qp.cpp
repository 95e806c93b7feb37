#include "cbfsim/qp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace cbfsim {

namespace {

constexpr Scalar kFeasEps = 1e-9;

struct Row {
  Vec2 a;
  Scalar b;
};

std::vector<Row> with_box(const std::vector<AffineConstraint>& rows, const BoxBounds& box) {
  std::vector<Row> all;
  all.reserve(rows.size() + 4);
  for (const AffineConstraint& r : rows) all.push_back({r.a, r.b});
  all.push_back({Vec2(1, 0), box.lo.x()});
  all.push_back({Vec2(-1, 0), -box.hi.x()});
  all.push_back({Vec2(0, 1), box.lo.y()});
  all.push_back({Vec2(0, -1), -box.hi.y()});
  return all;
}

bool feasible(const std::vector<Row>& all, const Vec2& u) {
  for (const Row& r : all) {
    if (r.a.dot(u) - r.b < -kFeasEps * std::max(1.0, std::abs(r.b))) return false;
  }
  return true;
}

std::vector<int> active_rows(const std::vector<Row>& all, const Vec2& u) {
  std::vector<int> act;
  for (size_t i = 0; i < all.size(); ++i) {
    if (std::abs(all[i].a.dot(u) - all[i].b) <= 1e-7 * std::max(1.0, std::abs(all[i].b))) {
      act.push_back(static_cast<int>(i));
    }
  }
  return act;
}

// Stationarity residual min over nonnegative multipliers on the active rows.
Scalar kkt_residual(const std::vector<Row>& all, const Vec2& u_n, const Vec2& u,
                    const std::vector<int>& act) {
  const Vec2 grad = u - u_n;
  Scalar best = grad.norm();
  for (size_t i = 0; i < act.size(); ++i) {
    const Vec2& ai = all[act[i]].a;
    const Scalar li = grad.dot(ai) / ai.squaredNorm();
    if (li >= -1e-12) best = std::min(best, (grad - li * ai).norm());
    for (size_t j = i + 1; j < act.size(); ++j) {
      const Vec2& aj = all[act[j]].a;
      Mat2 m;
      m.col(0) = ai;
      m.col(1) = aj;
      if (std::abs(m.determinant()) < 1e-12) continue;
      const Vec2 lam = m.inverse() * grad;
      if (lam.minCoeff() >= -1e-12) {
        best = std::min(best, (grad - m * lam).norm());
      }
    }
  }
  return best;
}

}  // namespace

std::string to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Nominal: return "nominal";
    case QpStatus::Constrained: return "constrained";
    case QpStatus::Relaxed: return "relaxed";
    case QpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

std::optional<QpSolution> solve_qp(const Vec2& u_n, const std::vector<AffineConstraint>& rows,
                                   const BoxBounds& box) {
  for (const AffineConstraint& r : rows) {
    if (!finite(r.a) || !std::isfinite(r.b)) throw std::invalid_argument("solve_qp: non-finite row");
  }
  if (box.lo.x() > box.hi.x() || box.lo.y() > box.hi.y()) {
    throw std::invalid_argument("solve_qp: inconsistent box bounds");
  }
  const std::vector<Row> all = with_box(rows, box);

  // Minimal invasiveness: a feasible nominal input is returned bit-exactly.
  if (feasible(all, u_n)) {
    QpSolution sol;
    sol.u = u_n;
    sol.status = QpStatus::Nominal;
    sol.active = active_rows(all, u_n);
    sol.kkt_residual = 0.0;
    return sol;
  }

  const int n = static_cast<int>(all.size());
  Vec2 best_u = Vec2::Zero();
  Scalar best_obj = std::numeric_limits<Scalar>::infinity();
  bool found = false;

  auto consider = [&](const Vec2& u) {
    if (!finite(u) || !feasible(all, u)) return;
    const Scalar obj = (u - u_n).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best_u = u;
      found = true;
    }
  };

  for (int i = 0; i < n; ++i) {
    const Vec2& a = all[i].a;
    const Scalar a2 = a.squaredNorm();
    if (a2 < 1e-16) continue;
    consider(u_n + ((all[i].b - a.dot(u_n)) / a2) * a);
    for (int j = i + 1; j < n; ++j) {
      Mat2 m;
      m.row(0) = all[i].a.transpose();
      m.row(1) = all[j].a.transpose();
      if (std::abs(m.determinant()) < 1e-12) continue;
      consider(m.inverse() * Vec2(all[i].b, all[j].b));
    }
  }

  if (!found) return std::nullopt;

  QpSolution sol;
  sol.u = best_u;
  sol.status = QpStatus::Constrained;
  sol.active = active_rows(all, best_u);
  sol.kkt_residual = kkt_residual(all, u_n, best_u, sol.active);
  return sol;
}

QpSolution solve_qp_relaxed(const Vec2& u_n, const std::vector<AffineConstraint>& rows,
                            const BoxBounds& box, Scalar relax_weight) {
  using Vec3 = Eigen::Vector3d;
  using Mat3 = Eigen::Matrix3d;

  // Variables z = (u_x, u_y, s); objective 0.5*||u - u_n||^2 + relax_weight*s^2.
  Mat3 h = Mat3::Identity();
  h(2, 2) = 2.0 * relax_weight;
  const Vec3 f(u_n.x(), u_n.y(), 0.0);

  struct Row3 {
    Vec3 c;
    Scalar d;
  };
  std::vector<Row3> all;
  for (const AffineConstraint& r : rows) {
    const Scalar s_coeff = r.tag == RowTag::InterAgent ? 0.1 : 1.0;
    all.push_back({Vec3(r.a.x(), r.a.y(), s_coeff), r.b});
  }
  all.push_back({Vec3(1, 0, 0), box.lo.x()});
  all.push_back({Vec3(-1, 0, 0), -box.hi.x()});
  all.push_back({Vec3(0, 1, 0), box.lo.y()});
  all.push_back({Vec3(0, -1, 0), -box.hi.y()});
  all.push_back({Vec3(0, 0, 1), 0.0});
  const int n = static_cast<int>(all.size());

  auto z_feasible = [&](const Vec3& z) {
    for (const Row3& r : all) {
      if (r.c.dot(z) - r.d < -kFeasEps * std::max(1.0, std::abs(r.d))) return false;
    }
    return true;
  };
  auto objective = [&](const Vec3& z) { return 0.5 * z.dot(h * z) - f.dot(z); };

  Vec3 best = Vec3::Zero();
  Scalar best_obj = std::numeric_limits<Scalar>::infinity();
  bool found = false;
  auto consider = [&](const Vec3& z) {
    if (!z.allFinite() || !z_feasible(z)) return;
    const Scalar obj = objective(z);
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
      found = true;
    }
  };

  // Unconstrained minimizer, then all equality-restricted stationary points
  // over active sets of size <= 3.
  consider(h.ldlt().solve(f));
  std::vector<int> subset;
  auto solve_subset = [&](const std::vector<int>& s) {
    const int m = static_cast<int>(s.size());
    Eigen::MatrixXd kkt(3 + m, 3 + m);
    kkt.setZero();
    kkt.topLeftCorner(3, 3) = h;
    Eigen::VectorXd rhs(3 + m);
    rhs.head(3) = f;
    for (int i = 0; i < m; ++i) {
      kkt.block(0, 3 + i, 3, 1) = -all[s[i]].c;
      kkt.block(3 + i, 0, 1, 3) = all[s[i]].c.transpose();
      rhs(3 + i) = all[s[i]].d;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd sol = lu.solve(rhs);
    consider(sol.head(3));
  };
  for (int i = 0; i < n; ++i) {
    solve_subset({i});
    for (int j = i + 1; j < n; ++j) {
      solve_subset({i, j});
      for (int k = j + 1; k < n; ++k) solve_subset({i, j, k});
    }
  }

  QpSolution sol;
  if (!found) {
    // Cannot happen with hard box bounds and a shared slack, but stay total.
    sol.u = clamp_inf(u_n, std::min(box.hi.x(), box.hi.y()));
    sol.status = QpStatus::Infeasible;
    return sol;
  }
  sol.u = Vec2(std::clamp(best.x(), box.lo.x(), box.hi.x()),
               std::clamp(best.y(), box.lo.y(), box.hi.y()));
  sol.slack = std::max(0.0, best.z());
  sol.status = QpStatus::Relaxed;
  for (int i = 0; i < n; ++i) {
    if (std::abs(all[i].c.dot(best) - all[i].d) <= 1e-7 * std::max(1.0, std::abs(all[i].d))) {
      sol.active.push_back(i);
    }
  }
  return sol;
}

}  // namespace cbfsim
