#include <benchmark/benchmark.h>

#include "motiondrift/encoding.hpp"
#include "motiondrift/synth.hpp"

namespace motiondrift {
namespace {

MotionRecording recording(double fps) {
  const auto spec = default_cohort_spec();
  return generate_recording(draw_profile(spec, 0), default_conditions()[1], 300.0, fps, 11);
}

void BM_BrvEncode(benchmark::State& state) {
  const auto rec = recording(15.0);
  for (auto _ : state) benchmark::DoNotOptimize(brv_encode(rec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rec.size()));
}
BENCHMARK(BM_BrvEncode)->Unit(benchmark::kMillisecond);

void BM_Resample30To15(benchmark::State& state) {
  const auto rec = recording(30.0);
  for (auto _ : state) benchmark::DoNotOptimize(resample(rec, 15.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rec.size()));
}
BENCHMARK(BM_Resample30To15)->Unit(benchmark::kMillisecond);

void BM_EncodeRecording(benchmark::State& state) {
  const auto rec = recording(15.0);
  for (auto _ : state) benchmark::DoNotOptimize(encode_recording(rec, 15.0, 600, 300));
}
BENCHMARK(BM_EncodeRecording)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace motiondrift
