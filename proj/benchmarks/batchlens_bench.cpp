#include <benchmark/benchmark.h>

#include <random>

#include "batchlens/anomaly.hpp"
#include "batchlens/geometry.hpp"
#include "batchlens/layout.hpp"
#include "batchlens/synth.hpp"
#include "batchlens/timeseries.hpp"

using namespace batchlens;

namespace {

const TraceStore& synthetic_store() {
  static const TraceStore store = build_store(generate_synthetic(SynthConfig{}).bundle);
  return store;
}

}  // namespace

static void BM_PackSiblings(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r(1, 10);
  std::vector<double> radii(static_cast<std::size_t>(state.range(0)));
  for (auto& v : radii) v = r(rng);
  for (auto _ : state) benchmark::DoNotOptimize(pack_siblings(radii));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PackSiblings)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

static void BM_EnclosingCircle(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> p(-100, 100), r(1, 10);
  std::vector<Circle> circles(static_cast<std::size_t>(state.range(0)));
  for (auto& c : circles) c = {p(rng), p(rng), r(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(enclosing_circle(circles));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EnclosingCircle)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

static void BM_SnapshotLayout(benchmark::State& state) {
  const auto& store = synthetic_store();
  const auto snap = build_snapshot(store, 3600);
  for (auto _ : state) benchmark::DoNotOptimize(layout_snapshot(snap, LayoutStyle{}));
}
BENCHMARK(BM_SnapshotLayout);

static void BM_Downsample(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> v(0, 100);
  Series s{"m", Metric::Cpu, {}};
  for (std::int64_t t = 0; t < state.range(0); ++t) s.points.push_back({t, v(rng)});
  for (auto _ : state) benchmark::DoNotOptimize(downsample(s, 500));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Downsample)->Arg(10'000)->Arg(86'400)->Arg(1'000'000);

static void BM_ActiveJobs(benchmark::State& state) {
  const auto& store = synthetic_store();
  std::int64_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.active_jobs_at(t));
    benchmark::DoNotOptimize(store.multi_job_machines_at(t));
    t = (t + 300) % 7200;
  }
}
BENCHMARK(BM_ActiveJobs);

static void BM_ScanWindow(benchmark::State& state) {
  const auto& store = synthetic_store();
  for (auto _ : state) benchmark::DoNotOptimize(scan_window(store, store.horizon(), DetectorConfig{}));
}
BENCHMARK(BM_ScanWindow)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
