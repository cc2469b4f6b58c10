#include <benchmark/benchmark.h>

#include "trajstitch/loss.hpp"
#include "trajstitch/mlp.hpp"
#include "trajstitch/optimizer.hpp"

using namespace trajstitch;

namespace {

Matrix noise(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(rng);
  return m;
}

void BM_MlpForward(benchmark::State& state) {
  Rng rng(1);
  const int width = static_cast<int>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  const nn::Mlp net({162, width, width, width, 64}, nn::Activation::kGelu, rng);
  const Matrix x = noise(batch, 162, rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForward)->Args({64, 64})->Args({256, 64})->Args({256, 256});

void BM_MlpTrainStep(benchmark::State& state) {
  Rng rng(2);
  const int width = static_cast<int>(state.range(0));
  nn::Mlp net({162, width, width, width, 64}, nn::Activation::kGelu, rng);
  nn::AdamOptimizer opt(net, {});
  const Matrix x = noise(64, 162, rng);
  const Matrix y = noise(64, 64, rng);
  for (auto _ : state) {
    nn::ForwardCache cache;
    const auto loss = nn::mse_loss(net.forward(x, cache), y);
    opt.step(net, net.backward(cache, loss.gradient));
  }
}
BENCHMARK(BM_MlpTrainStep)->Arg(64)->Arg(256);

}  // namespace
