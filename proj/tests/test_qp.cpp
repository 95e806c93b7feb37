#include <cmath>
#include <random>

#include "cbfsim/qp.hpp"
#include "doctest.h"

using namespace cbfsim;

namespace {

struct RandomQp {
  Vec2 u_n;
  std::vector<AffineConstraint> rows;
};

// Feasible by construction: every row keeps a margin >= 0.1 around an anchor
// point well inside the box, so a 0.05-coarse grid always sees the feasible
// set.
RandomQp make_feasible_qp(std::mt19937_64& rng) {
  std::uniform_real_distribution<Scalar> in_box(-4.5, 4.5);
  std::uniform_real_distribution<Scalar> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<Scalar> margin(0.1, 1.5);
  std::uniform_int_distribution<int> n_rows(1, 6);
  std::uniform_real_distribution<Scalar> nominal(-8.0, 8.0);

  RandomQp qp;
  const Vec2 anchor(in_box(rng), in_box(rng));
  const int n = n_rows(rng);
  for (int i = 0; i < n; ++i) {
    const Scalar a = angle(rng);
    const Vec2 dir(std::cos(a), std::sin(a));
    qp.rows.push_back({dir, dir.dot(anchor) - margin(rng), RowTag::IlCbf, i});
  }
  // Push the nominal around; often outside the feasible set.
  qp.u_n = Vec2(nominal(rng), nominal(rng));
  return qp;
}

// Two-stage grid search: coarse sweep of the whole box, then a dense
// 1e-3-resolution window around the best coarse point.
bool grid_oracle(const RandomQp& qp, const BoxBounds& box, Vec2* best) {
  auto feasible = [&](const Vec2& u) {
    for (const AffineConstraint& r : qp.rows) {
      if (r.a.dot(u) < r.b - 1e-12) return false;
    }
    return true;
  };
  const Scalar coarse = 0.05;
  bool found = false;
  Vec2 best_u = Vec2::Zero();
  Scalar best_obj = std::numeric_limits<Scalar>::infinity();
  for (Scalar x = box.lo.x(); x <= box.hi.x() + 1e-12; x += coarse) {
    for (Scalar y = box.lo.y(); y <= box.hi.y() + 1e-12; y += coarse) {
      const Vec2 u(x, y);
      if (!feasible(u)) continue;
      const Scalar obj = (u - qp.u_n).squaredNorm();
      if (obj < best_obj) {
        best_obj = obj;
        best_u = u;
        found = true;
      }
    }
  }
  if (!found) return false;
  const Scalar fine = 1e-3;
  const Vec2 lo = (best_u - Vec2(2 * coarse, 2 * coarse)).cwiseMax(box.lo);
  const Vec2 hi = (best_u + Vec2(2 * coarse, 2 * coarse)).cwiseMin(box.hi);
  for (Scalar x = lo.x(); x <= hi.x() + 1e-12; x += fine) {
    for (Scalar y = lo.y(); y <= hi.y() + 1e-12; y += fine) {
      const Vec2 u(x, y);
      if (!feasible(u)) continue;
      const Scalar obj = (u - qp.u_n).squaredNorm();
      if (obj < best_obj) {
        best_obj = obj;
        best_u = u;
      }
    }
  }
  *best = best_u;
  return true;
}

}  // namespace

TEST_CASE("a feasible nominal input passes through bit-exactly") {
  const BoxBounds box;
  std::vector<AffineConstraint> rows{{Vec2(0, 1), -1.0, RowTag::IlCbf, 0}};
  const Vec2 u_n(0.123456789, -0.987654321);
  const auto sol = solve_qp(u_n, rows, box);
  REQUIRE(sol);
  CHECK(sol->status == QpStatus::Nominal);
  CHECK(sol->u == u_n);  // bit-exact
}

TEST_CASE("projection onto a single half-plane") {
  const BoxBounds box;
  std::vector<AffineConstraint> rows{{Vec2(0, 1), -1.0, RowTag::IlCbf, 0}};
  const auto sol = solve_qp(Vec2(0, -3), rows, box);
  REQUIRE(sol);
  CHECK(sol->status == QpStatus::Constrained);
  CHECK((sol->u - Vec2(0, -1)).norm() <= 1e-12);
  CHECK(sol->kkt_residual <= 1e-10);
}

TEST_CASE("contradictory half-planes report infeasible") {
  const BoxBounds box;
  std::vector<AffineConstraint> rows{
      {Vec2(0, 1), 1.0, RowTag::IlCbf, 0},
      {Vec2(0, -1), 0.0, RowTag::IlCbf, 1},
  };
  CHECK(!solve_qp(Vec2(0, 0), rows, box));
}

TEST_CASE("box bounds participate as constraints") {
  const BoxBounds box{Vec2(-1, -1), Vec2(1, 1)};
  const auto sol = solve_qp(Vec2(4, 0.5), {}, box);
  REQUIRE(sol);
  CHECK((sol->u - Vec2(1, 0.5)).norm() <= 1e-12);
}

TEST_CASE("matches the dense-grid oracle and satisfies KKT on random problems") {
  std::mt19937_64 rng(2024);
  const BoxBounds box{Vec2(-5, -5), Vec2(5, 5)};
  int nontrivial = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const RandomQp qp = make_feasible_qp(rng);
    const auto sol = solve_qp(qp.u_n, qp.rows, box);
    REQUIRE(sol);
    Vec2 oracle_u;
    REQUIRE(grid_oracle(qp, box, &oracle_u));
    CHECK((sol->u - oracle_u).norm() <= 2e-3);
    CHECK(sol->kkt_residual <= 1e-8);
    if (sol->status == QpStatus::Constrained) ++nontrivial;
  }
  CHECK(nontrivial > 50);  // the generator produces plenty of active problems
}

TEST_CASE("slack relaxation resolves contradictory rows and keeps the box") {
  const BoxBounds box{Vec2(-5, -5), Vec2(5, 5)};
  std::vector<AffineConstraint> rows{
      {Vec2(0, 1), 1.0, RowTag::IlCbf, 0},
      {Vec2(0, -1), 0.0, RowTag::IlCbf, 1},
  };
  const QpSolution sol = solve_qp_relaxed(Vec2(0, 0), rows, box, 100.0);
  CHECK(sol.status == QpStatus::Relaxed);
  CHECK(sol.slack > 0.0);
  CHECK(sol.u.x() >= box.lo.x());
  CHECK(sol.u.x() <= box.hi.x());
  CHECK(sol.u.y() >= box.lo.y());
  CHECK(sol.u.y() <= box.hi.y());
  // Both rows violated by at most the shared slack.
  for (const AffineConstraint& r : rows) {
    CHECK(r.a.dot(sol.u) >= r.b - sol.slack - 1e-9);
  }
}

TEST_CASE("slack relaxation penalizes inter-agent rows ten times harder") {
  const BoxBounds box{Vec2(-1, -1), Vec2(1, 1)};
  // u_y >= 2 is unreachable inside the box: the needed slack depends on tag.
  std::vector<AffineConstraint> cbf_rows{{Vec2(0, 1), 2.0, RowTag::IlCbf, 0}};
  std::vector<AffineConstraint> agent_rows{{Vec2(0, 1), 2.0, RowTag::InterAgent, 0}};
  const QpSolution a = solve_qp_relaxed(Vec2(0, 0), cbf_rows, box, 100.0);
  const QpSolution b = solve_qp_relaxed(Vec2(0, 0), agent_rows, box, 100.0);
  CHECK(a.slack > 0.0);
  CHECK(b.slack > 5.0 * a.slack);  // the s/10 allowance must cover the same gap
  CHECK(b.u.y() == doctest::Approx(1.0));  // drives as far as the box allows
}
