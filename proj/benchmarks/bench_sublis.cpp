#include <benchmark/benchmark.h>

#include "sublis/genlis.hpp"
#include "sublis/instances.hpp"
#include "sublis/reslis.hpp"

using namespace sublis;

namespace {

void BM_TreeBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double delta = 1.0 / static_cast<double>(state.range(1));
  auto y = generate({Family::RandomPermutation, n, 1, 0.1, 1});
  std::uint64_t seed = 0;
  std::size_t reads = 0;
  for (auto _ : state) {
    QueryLedger ledger;
    auto t = PrecisionTree::build(y, delta, 16, ++seed, &ledger);
    reads += ledger.positions_read();
    benchmark::DoNotOptimize(t.node_count());
  }
  state.counters["reads"] = benchmark::Counter(static_cast<double>(reads), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_TreeBuild)->Args({4096, 4})->Args({4096, 64})->Args({65536, 16})->Args({65536, 256});

void BM_SimulateUniform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto t = PrecisionTree::build_shape(n, 1.0 / 64, 16, 3);
  auto rng = CounterRng::derive(5, {});
  for (auto _ : state) benchmark::DoNotOptimize(simulate_uniform(t.view(), 1.0 / 64, rng).size());
}
BENCHMARK(BM_SimulateUniform)->Arg(4096)->Arg(65536);

void BM_LisExact(benchmark::State& state) {
  auto y = generate({Family::RandomPermutation, static_cast<std::size_t>(state.range(0)), 1, 0.1, 2});
  auto v = y.flat_values();
  for (auto _ : state) benchmark::DoNotOptimize(lis_exact(v));
}
BENCHMARK(BM_LisExact)->Arg(4096)->Arg(65536);

void BM_EstimateLis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double lambda = 1.0 / static_cast<double>(state.range(1));
  auto y = generate({Family::PlantedChain, n, 1, 2 * lambda, 4});
  std::uint64_t seed = 0;
  std::size_t reads = 0;
  for (auto _ : state) {
    EstimateOptions o;
    o.seed = ++seed;
    auto r = estimate_lis_main(y, lambda, 0.25, o);
    reads += r.positions_read;
    benchmark::DoNotOptimize(r.estimate);
  }
  state.counters["reads"] = benchmark::Counter(static_cast<double>(reads), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_EstimateLis)->Args({1024, 8})->Args({4096, 8})->Args({4096, 16})->Unit(benchmark::kMillisecond);

void BM_EstGenLis(benchmark::State& state) {
  const std::size_t n = 512;
  const double lambda = 0.125;
  auto y = generate({Family::PlantedChain, n, 1, 0.3, 6});
  std::vector<std::uint8_t> flags(n, 1);
  auto tree = PrecisionTree::build_shape(n, lambda / (10.0 * static_cast<double>(zeta_for(n))), 16, 6);
  for (auto _ : state) {
    QueryLedger ledger;
    EstimatorParams p;
    p.global_n = n;
    Engine engine(p, ledger, 6);
    auto g = make_genlis_instance(y, flags, &ledger);
    benchmark::DoNotOptimize(est_genlis(engine, g, lambda, static_cast<double>(state.range(0)), 16, tree.view()).estimate);
  }
}
BENCHMARK(BM_EstGenLis)->Arg(1)->Arg(1000000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
