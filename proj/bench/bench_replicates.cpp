#include <benchmark/benchmark.h>

#include "levy/harness.hpp"
#include "levy/parallel.hpp"

namespace {

levy::ExperimentConfig yz_config() {
  levy::ExperimentConfig cfg;
  cfg.spec = levy::LevyMeasureSpec::make(1.5, levy::SlowlyVarying::constant(1.0));
  cfg.kind = levy::ExperimentKind::Yz;
  cfg.report_times = {1e-2, 1e-4};
  cfg.eps_budget = 0.5;
  cfg.seed = 7;
  return cfg;
}

const levy::ReplicateContext& context() {
  static const levy::ReplicateContext ctx(yz_config());
  return ctx;
}

void BM_ReplicatesSerial(benchmark::State& state) {
  const auto& ctx = context();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = levy::serial_map(n, [&](std::size_t i) { return ctx.extremes(ctx.jumps(i)); });
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReplicatesParallel(benchmark::State& state) {
  const auto& ctx = context();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = levy::parallel_map(n, 0, [&](std::size_t i) { return ctx.extremes(ctx.jumps(i)); });
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScanFast(benchmark::State& state) {
  const auto& ctx = context();
  const auto pf = levy::build_path(ctx.jumps(0), ctx.model(), ctx.grid());
  for (auto _ : state) benchmark::DoNotOptimize(levy::scaled_extremes(pf, ctx.model(), ctx.grid().report_times));
}

void BM_ScanReference(benchmark::State& state) {
  const auto& ctx = context();
  const auto pf = levy::build_path(ctx.jumps(0), ctx.model(), ctx.grid());
  for (auto _ : state) {
    benchmark::DoNotOptimize(levy::reference::scaled_extremes(pf, ctx.model(), ctx.grid().report_times));
  }
}

BENCHMARK(BM_ReplicatesSerial)->Arg(256);
BENCHMARK(BM_ReplicatesParallel)->Arg(256);
BENCHMARK(BM_ScanFast);
BENCHMARK(BM_ScanReference);

}  // namespace

BENCHMARK_MAIN();
