#include <benchmark/benchmark.h>

#include <random>

#include "cbfsim/barrier.hpp"
#include "cbfsim/lidar.hpp"
#include "cbfsim/qp.hpp"
#include "cbfsim/robust_fit.hpp"
#include "cbfsim/safety_filter.hpp"

namespace {

using namespace cbfsim;

void BM_SolveQp(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<Scalar> uni(-1.0, 1.0);
  std::vector<AffineConstraint> rows;
  for (int i = 0; i < 8; ++i) {
    const Vec2 a = Vec2(uni(rng), uni(rng)).normalized();
    rows.push_back({a, a.dot(Vec2(0.3, -0.2)) - 0.5 - 0.5 * std::abs(uni(rng)), RowTag::IlCbf, i});
  }
  const BoxBounds box{Vec2(-5, -5), Vec2(5, 5)};
  const Vec2 u_n(3.0, -4.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_qp(u_n, rows, box));
  }
}
BENCHMARK(BM_SolveQp);

void BM_Scan(benchmark::State& state) {
  const GridSpec spec = GridSpec::from_extent(Vec2(-4, -4), Vec2(4, 4), 0.05);
  const OccupancyGrid grid =
      rasterize({Obstacle::box(Vec2(-2, 1.5), Vec2(2, 2.5)),
                 Obstacle::box(Vec2(1.0, -2.0), Vec2(2.0, -1.0))},
                0.0, spec);
  LidarConfig cfg;
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan(Vec2(0, 0), grid, cfg, rng));
  }
}
BENCHMARK(BM_Scan);

void BM_IrlsFit(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::normal_distribution<Scalar> noise(0.0, 0.01);
  std::vector<Scalar> xs, ys;
  for (int i = 0; i < 50; ++i) {
    const Scalar x = -1.0 + 2.0 * i / 49.0;
    xs.push_back(x);
    ys.push_back(x * x + noise(rng));
  }
  const RobustFitConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(irls_fit(xs, ys, cfg));
  }
}
BENCHMARK(BM_IrlsFit);

void BM_LearnBarriers(benchmark::State& state) {
  const GridSpec spec = GridSpec::from_extent(Vec2(-4, -4), Vec2(4, 4), 0.05);
  const OccupancyGrid grid =
      rasterize({Obstacle::box(Vec2(-2, 1.5), Vec2(2, 2.5))}, 0.0, spec);
  LidarConfig lidar;
  std::mt19937_64 rng(5);
  const PointCloud cloud = scan(Vec2(0, 0), grid, lidar, rng);
  const ClusterParams cluster;
  const RobustFitConfig fit;
  for (auto _ : state) {
    benchmark::DoNotOptimize(learn_ilcbfs(cloud, Vec2(0, 0), cluster, fit));
  }
}
BENCHMARK(BM_LearnBarriers);

}  // namespace

BENCHMARK_MAIN();
