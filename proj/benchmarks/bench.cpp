#include <vector>

#include <benchmark/benchmark.h>

#include "topothermo/measure.hpp"
#include "topothermo/morse.hpp"
#include "topothermo/neckgeom.hpp"
#include "topothermo/potential.hpp"

using namespace topothermo;

namespace {

PotentialModel model(ModelKind kind, std::size_t N, double half) {
  return make_builtin({kind, N, {}}, std::vector<Interval>(N, Interval{-half, half}));
}

void BM_F_quadrature(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval_F(-0.1, N / 2, N, 1.0));
}
BENCHMARK(BM_F_quadrature)->Arg(8)->Arg(20);

void BM_F_recursive(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval_F_recursive(-0.1, N / 2 | 1, N, 1.0));
}
BENCHMARK(BM_F_recursive)->Arg(8)->Arg(20);

void BM_coefficient_A(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(coefficient_A(6, 3, 0.2, 1.0));
}
BENCHMARK(BM_coefficient_A);

// hit-or-miss volume; items = samples
void BM_volume(benchmark::State& state) {
  const auto m = model(ModelKind::harmonic, static_cast<std::size_t>(state.range(0)), 1.2);
  SamplerConfig c;
  c.n_samples = 100'000;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_sublevel_volume(m, 1.0, c).mean);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.n_samples));
}
BENCHMARK(BM_volume)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_beta(benchmark::State& state) {
  const auto m = model(ModelKind::harmonic, 8, 1.1);
  SamplerConfig c;
  c.n_samples = 100'000;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_beta(m, 1.0, c).mean);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.n_samples));
}
BENCHMARK(BM_beta)->Unit(benchmark::kMillisecond);

void BM_newton_search(benchmark::State& state) {
  const auto m = model(ModelKind::uncoupled_double_well, static_cast<std::size_t>(state.range(0)), 2.5);
  SearchConfig c;
  c.starts = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(find_critical_points(m, 10.0, c).points.size());
}
BENCHMARK(BM_newton_search)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
