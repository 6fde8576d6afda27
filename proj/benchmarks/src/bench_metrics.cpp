#include <benchmark/benchmark.h>

#include "motiondrift/metrics.hpp"
#include "motiondrift/random.hpp"

namespace motiondrift {
namespace {

std::vector<LabeledEmbedding> embeddings(std::size_t n, std::size_t dim) {
  Rng rng(3);
  std::vector<LabeledEmbedding> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].user_id = "u" + std::to_string(i % 20);
    out[i].condition = "c";
    out[i].window_id = static_cast<std::uint32_t>(i);
    out[i].vector.resize(dim);
    for (auto& v : out[i].vector) v = static_cast<float>(standard_normal(rng));
  }
  return out;
}

void BM_PrecisionAt1(benchmark::State& state) {
  const auto e = embeddings(static_cast<std::size_t>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(precision_at_1(e, e, true));
}
BENCHMARK(BM_PrecisionAt1)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_RPrecision(benchmark::State& state) {
  const auto e = embeddings(static_cast<std::size_t>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(r_precision(e, e, true));
}
BENCHMARK(BM_RPrecision)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace motiondrift
