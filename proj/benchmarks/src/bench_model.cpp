#include <benchmark/benchmark.h>

#include "motiondrift/model.hpp"
#include "motiondrift/random.hpp"

namespace motiondrift {
namespace {

SequenceMatrix<float> random_input(std::size_t length) {
  Rng rng(1);
  SequenceMatrix<float> x(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(kFeatureCount));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(standard_normal(rng));
  return x;
}

void BM_Forward(benchmark::State& state) {
  const auto model = Model::init(ModelConfig{}, 7);
  const auto x = random_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto model = Model::init(ModelConfig{}, 7);
  const auto x = random_input(static_cast<std::size_t>(state.range(0)));
  std::vector<float> grad(model.parameter_count());
  const std::vector<float> upstream(model.config().embedding_dim, 1.0f);
  for (auto _ : state) {
    Model::Cache cache;
    model.forward(x, cache);
    model.backward(cache, upstream, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace motiondrift
