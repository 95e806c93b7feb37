#ifndef CBFSIM_QP_HPP
#define CBFSIM_QP_HPP

#include <optional>
#include <string>
#include <vector>

#include "cbfsim/types.hpp"

namespace cbfsim {

enum class RowTag { IlCbf, InterAgent, Box };

/// Half-plane constraint a . u >= b on the control input.
struct AffineConstraint {
  Vec2 a = Vec2::Zero();
  Scalar b = 0.0;
  RowTag tag = RowTag::IlCbf;
  int ref = -1;  // caller bookkeeping (barrier index / neighbor id)
};

struct BoxBounds {
  Vec2 lo = Vec2(-5.0, -5.0);
  Vec2 hi = Vec2(5.0, 5.0);
};

enum class QpStatus { Nominal, Constrained, Relaxed, Infeasible };

std::string to_string(QpStatus s);

struct QpSolution {
  Vec2 u = Vec2::Zero();
  QpStatus status = QpStatus::Nominal;
  Scalar slack = 0.0;
  std::vector<int> active;   // indices into the assembled constraint list
  Scalar kkt_residual = 0.0; // stationarity residual of the returned point
};

/// Exact minimizer of 0.5*||u - u_n||^2 subject to the rows and box bounds,
/// found by enumerating candidate active sets of size <= 2 over all
/// constraints and keeping the best feasible KKT point. Returns nullopt when
/// the constraint system is infeasible.
std::optional<QpSolution> solve_qp(const Vec2& u_n, const std::vector<AffineConstraint>& rows,
                                   const BoxBounds& box);

/// Fallback for infeasible systems: one shared slack s >= 0 softens barrier
/// rows (a.u >= b - s) and inter-agent rows at a tenth of the allowance
/// (a.u >= b - s/10), with s^2 penalized by relax_weight. Box bounds stay
/// hard, so the program is always feasible.
QpSolution solve_qp_relaxed(const Vec2& u_n, const std::vector<AffineConstraint>& rows,
                            const BoxBounds& box, Scalar relax_weight);

}  // namespace cbfsim

#endif  // CBFSIM_QP_HPP
