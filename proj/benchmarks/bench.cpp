#include <benchmark/benchmark.h>

#include "ccd/rng.hpp"
#include "ccd/sim.hpp"
#include "ccd/transducer.hpp"

namespace {

void BM_TransducerStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    ccd::CounterRng rng(1, 0, ccd::StreamRole::observations);
    ccd::TransducerState t;
    for (std::size_t i = 0; i < n; ++i) benchmark::DoNotOptimize(t.step(rng.normal(), rng.uniform()));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransducerStep)->Arg(1000)->Arg(100000);

void BM_RunPaths(benchmark::State& state) {
  ccd::sim::ExperimentConfig cfg;
  cfg.pair = state.range(0) ? ccd::PrePostPair::gauss_mean(0.2) : ccd::PrePostPair::bernoulli(0.5, 0.6);
  cfg.n0 = 1000;
  cfg.n1 = 0;
  std::uint64_t run = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ccd::sim::run_paths(cfg, run++));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_RunPaths)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
