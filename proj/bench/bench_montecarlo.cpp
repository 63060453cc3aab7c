// OpenMP trial loop vs the serial reference on the three scenario kinds.
// Both return identical estimates; only wall time differs.
#include <benchmark/benchmark.h>
#include <numeric>
#include <omp.h>

#include "pec/caching.hpp"
#include "pec/montecarlo.hpp"

using namespace pec;

namespace {

mc::Scenario scenario(int kind) {
  if (kind == 0) return mc::CodedAnalytic{500, 0.2, 100};
  if (kind == 1) return mc::UncAnalytic{10, 0.2};
  std::vector<Index> t(64);
  std::iota(t.begin(), t.end(), Index{1});
  const auto arch = Architecture::chain(2);
  const Fact q = Fact::idb(63, t);
  return mc::EndToEnd{q, arch, 256, ErasureSpec::uniform(0.2), {}, plan_coded_cache(q, 256, arch, 0.2, 0.1)};
}

void BM_Serial(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mc::simulate_serial(s, state.range(1), 1));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_Parallel(benchmark::State& state) {
  const auto s = scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mc::simulate(s, state.range(1), 1));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.counters["threads"] = omp_get_max_threads();
}

// range(0): 0 coded analytic, 1 uncoded analytic, 2 end-to-end coded; range(1): trials.
void args(benchmark::internal::Benchmark* b) {
  b->Args({0, 100000})->Args({1, 1000000})->Args({2, 20000})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Serial)->Apply(args);
BENCHMARK(BM_Parallel)->Apply(args);

BENCHMARK_MAIN();
