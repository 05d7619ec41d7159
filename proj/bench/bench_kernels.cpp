#include <vector>

#include <benchmark/benchmark.h>

#include "deltaplan/atlas.hpp"
#include "deltaplan/beacons.hpp"
#include "deltaplan/gaussian.hpp"

using namespace deltaplan;

namespace {

AtlasConfig small_atlas() {
  AtlasConfig c;
  c.n_delta = 256;
  c.n_z = 64;
  return c;
}

void BM_AtlasSerial(benchmark::State& state) {
  const BeaconsEnv env;
  const BeaconsObservationModel p(env, ObsModelKind::original);
  const BeaconsObservationModel q(env, ObsModelKind::simplified);
  for (auto _ : state) benchmark::DoNotOptimize(build_atlas_serial(small_atlas(), p, q, 1));
}
BENCHMARK(BM_AtlasSerial)->Unit(benchmark::kMillisecond);

void BM_AtlasParallel(benchmark::State& state) {
  const BeaconsEnv env;
  const BeaconsObservationModel p(env, ObsModelKind::original);
  const BeaconsObservationModel q(env, ObsModelKind::simplified);
  for (auto _ : state) benchmark::DoNotOptimize(build_atlas(small_atlas(), p, q, 1));
}
BENCHMARK(BM_AtlasParallel)->Unit(benchmark::kMillisecond);

std::vector<Vec2> grid_points(std::size_t n) {
  std::vector<Vec2> pts(n);
  for (std::size_t k = 0; k < n; ++k) pts[k] = {0.001 * static_cast<double>(k % 1000), 0.001 * static_cast<double>(k / 1000)};
  return pts;
}

void BM_GmmBatchSerial(benchmark::State& state) {
  const GaussianMixture2 gmm = build_beacons_gmm({0.5, 0.5});
  const auto pts = grid_points(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(pts.size());
  for (auto _ : state) {
    gmm_pdf_batch_serial(gmm, pts, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_GmmBatchSerial)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_GmmBatchParallel(benchmark::State& state) {
  const GaussianMixture2 gmm = build_beacons_gmm({0.5, 0.5});
  const auto pts = grid_points(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(pts.size());
  for (auto _ : state) {
    gmm_pdf_batch(gmm, pts, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_GmmBatchParallel)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
