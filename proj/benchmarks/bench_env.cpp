#include <benchmark/benchmark.h>

#include "trajstitch/maze.hpp"
#include "trajstitch/mixing.hpp"
#include "trajstitch/policy.hpp"

using namespace trajstitch;

namespace {

void BM_OracleEpisodes(benchmark::State& state) {
  const PointMazeSpec spec;
  const PolicyFn policy = oracle_policy(spec);
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(spec, policy, 50, 0.99, rng));
}
BENCHMARK(BM_OracleEpisodes);

void BM_GenerateDataset(benchmark::State& state) {
  const PointMazeSpec spec;
  for (auto _ : state) {
    Rng rng(6);
    benchmark::DoNotOptimize(generate_offline_dataset(spec, kDisjointFamilies, 50, rng));
  }
}
BENCHMARK(BM_GenerateDataset)->Unit(benchmark::kMillisecond);

void BM_MixedBatch(benchmark::State& state) {
  Rng rng(7);
  const PointMazeSpec spec;
  const Dataset ds = generate_offline_dataset(spec, kDisjointFamilies, 50, rng);
  const StateActionPool orig = make_pool(ds);
  const StateActionPool aug = make_pool(ds);
  for (auto _ : state) benchmark::DoNotOptimize(mixed_batch_sampler(orig, aug, MixConfig{4, 1, 256}, rng));
}
BENCHMARK(BM_MixedBatch);

}  // namespace
