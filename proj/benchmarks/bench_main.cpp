#include <benchmark/benchmark.h>

#include <cstdint>

#include "sketchdist/edt.hpp"
#include "sketchdist/flowfield.hpp"
#include "sketchdist/losses.hpp"
#include "sketchdist/metrics.hpp"
#include "sketchdist/sparsity.hpp"
#include "sketchdist/supervision.hpp"

using namespace sketchdist;

namespace {

// Square lattice of disks, roughly one per 32x32 cell.
LabelField disk_lattice(int n) {
  LabelField l(n, n, 0);
  std::int32_t id = 0;
  for (int cy = 16; cy + 12 < n; cy += 32) {
    for (int cx = 16; cx + 12 < n; cx += 32) {
      ++id;
      const int r = 8 + (cx + cy) % 5;
      for (int y = cy - r; y <= cy + r; ++y) {
        for (int x = cx - r; x <= cx + r; ++x) {
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) l(x, y) = id;
        }
      }
    }
  }
  return l;
}

void BM_DistanceTransform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sites = edges_to_sites(boundary_edges(disk_lattice(n)));
  for (auto _ : state) benchmark::DoNotOptimize(distance_to_sites(sites, n, n));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_DistanceTransform)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMicrosecond);

void BM_MakeTargets(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto gt = disk_lattice(n);
  const auto ann = derive_annotation(gt, gaussian_mask(n, n, {0.25, 20.0, 3}));
  for (auto _ : state) benchmark::DoNotOptimize(make_targets(ann));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_MakeTargets)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_GaussianMask(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int jobs = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_mask(n, n, {0.25, 50.0, 11}, jobs));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GaussianMask)->Args({256, 1})->Args({512, 1})->Args({512, 4})->Unit(benchmark::kMillisecond);

void BM_SketchposeLoss(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto gt = disk_lattice(n);
  const auto targets = make_targets(derive_annotation(gt, gaussian_mask(n, n, {0.25, 20.0, 5})));
  const auto gold = make_targets_full(gt).targets;
  for (auto _ : state) benchmark::DoNotOptimize(sketchpose_total(gold.d_star, gold.v_star, targets));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SketchposeLoss)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto t = make_targets_full(disk_lattice(n)).targets;
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_masks(t.d_star, t.v_star));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Reconstruct)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MatchInstances(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto gt = disk_lattice(n);
  const auto t = make_targets_full(gt).targets;
  const auto pred = reconstruct_masks(t.d_star, t.v_star);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(pred, gt, 0.5));
}
BENCHMARK(BM_MatchInstances)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
