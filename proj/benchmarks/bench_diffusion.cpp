#include <benchmark/benchmark.h>

#include <vector>

#include "trajstitch/denoiser.hpp"
#include "trajstitch/masked_window.hpp"
#include "trajstitch/sampler.hpp"
#include "trajstitch/schedule.hpp"

using namespace trajstitch;

namespace {

void BM_SampleConditional(benchmark::State& state) {
  Rng rng(3);
  const int batch = static_cast<int>(state.range(0));
  const DenoiserModel model = make_denoiser(32, 2, {256, 256, 256}, rng);
  const NoiseSchedule schedule = build_cosine_schedule(100);
  std::vector<MaskedWindow> windows;
  for (int i = 0; i < batch; ++i) windows.push_back(rollout_mask(RowVector::Zero(2), 32));
  for (auto _ : state) {
    std::vector<Rng> rngs;
    for (int i = 0; i < batch; ++i) rngs.emplace_back(static_cast<std::uint64_t>(i));
    benchmark::DoNotOptimize(sample_conditional_batch(model, schedule, windows, rngs));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_SampleConditional)->Arg(1)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TrainingMask(benchmark::State& state) {
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(make_training_mask(32, rng));
}
BENCHMARK(BM_TrainingMask);

}  // namespace
