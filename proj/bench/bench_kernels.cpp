#include "perdyn/analysis.hpp"
#include "perdyn/kernels.hpp"
#include "perdyn/model.hpp"
#include "perdyn/per.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace perdyn;

std::vector<Mat> coeffs_for(int terms) {
  std::vector<Mat> c;
  for (int j = 0; j < terms; ++j) c.push_back(coeff_l(j, 0.01));
  return c;
}

std::vector<Mat> blocks_for(Eigen::Index n, int terms) {
  std::vector<Mat> b;
  for (int j = 0; j < terms; ++j) b.push_back(Mat::Random(n, n));
  return b;
}

void kron(benchmark::State& state, Execution exec) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto c = coeffs_for(5);
  const auto b = blocks_for(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(kron_accumulate(c, b, exec));
  state.SetComplexityN(state.range(0));
}

void BM_KronSerial(benchmark::State& s) { kron(s, Execution::serial); }
void BM_KronParallel(benchmark::State& s) { kron(s, Execution::parallel); }
BENCHMARK(BM_KronSerial)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KronParallel)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMicrosecond);

void stability(benchmark::State& state, Execution exec) {
  for (auto _ : state)
    benchmark::DoNotOptimize(sdof_stability_map(0.05, 2, 2, 20, 1.0, 1e-4, exec));
}

void BM_StabilityMapSerial(benchmark::State& s) { stability(s, Execution::serial); }
void BM_StabilityMapParallel(benchmark::State& s) { stability(s, Execution::parallel); }
BENCHMARK(BM_StabilityMapSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StabilityMapParallel)->Unit(benchmark::kMillisecond);

void beta_map(benchmark::State& state, Execution exec) {
  const SystemModel model = build_beam([] {
    BeamSpec b;
    b.n_elements = 24;
    b.supports = default_beam_supports(b, 0.5, 0.5);
    return b;
  }());
  std::vector<double> dts;
  for (int i = 1; i <= 32; ++i) dts.push_back(1e-6 * i);
  for (auto _ : state) benchmark::DoNotOptimize(beta_radius_map(model, dts, 8, exec));
}

void BM_BetaRadiusMapSerial(benchmark::State& s) { beta_map(s, Execution::serial); }
void BM_BetaRadiusMapParallel(benchmark::State& s) { beta_map(s, Execution::parallel); }
BENCHMARK(BM_BetaRadiusMapSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BetaRadiusMapParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
