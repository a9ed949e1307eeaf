#include <benchmark/benchmark.h>

#include <cmath>

#include "vsheet/amplitude.hpp"
#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/spectral.hpp"

using namespace vsheet;

namespace {

RealField cosine(const PeriodicGrid& g, double amp, int k) {
  return RealField::sample(g, [=](double a) { return amp * std::cos(k * a); });
}

void BM_BrIntegral(benchmark::State& state) {
  const PeriodicGrid g(static_cast<std::size_t>(state.range(0)));
  const SheetCurve z(RealField::sample(g, [](double a) { return 0.1 * std::sin(a); }), cosine(g, 0.1, 2));
  const VortexAmplitude w(cosine(g, 1.0, 1));
  BrOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(br_integral(z, w, opts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BrIntegral)
    ->ArgsProduct({{128, 256, 512, 1024}, {1, 4}})
    ->Unit(benchmark::kMicrosecond)
    ->Complexity(benchmark::oNSquared);

void BM_Hilbert(benchmark::State& state) {
  const PeriodicGrid g(static_cast<std::size_t>(state.range(0)));
  const RealField f = cosine(g, 1.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(hilbert_transform(f));
}
BENCHMARK(BM_Hilbert)->RangeMultiplier(4)->Range(128, 8192);

void BM_AmplitudeRhs(benchmark::State& state) {
  const PeriodicGrid g(static_cast<std::size_t>(state.range(0)));
  const VortexAmplitude w(cosine(g, 1.0, 1));
  for (auto _ : state) benchmark::DoNotOptimize(amplitude_rhs(w));
}
BENCHMARK(BM_AmplitudeRhs)->RangeMultiplier(4)->Range(128, 8192);

}  // namespace
BENCHMARK_MAIN();
