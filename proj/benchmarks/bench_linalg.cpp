#include <benchmark/benchmark.h>

#include "aact/linalg.hpp"
#include "aact/random.hpp"

namespace {

aact::RealMatrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  aact::Substream rng(seed);
  aact::RealMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

// One step-l extension of an N x L design against a full SVD of the result.
void BM_PinvExtend(benchmark::State& state) {
  const auto n = state.range(0);
  const auto L = state.range(1);
  const aact::RealMatrix a = random_matrix(n, L, 1);
  const aact::PinvState base{a, aact::pinv_full(a)};
  const aact::RealMatrix g = random_matrix(n, 10, 2);
  for (auto _ : state) benchmark::DoNotOptimize(aact::pinv_extend(base, g));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PinvExtend)->Args({2000, 50})->Args({2000, 190})->Args({12000, 190})
    ->Unit(benchmark::kMillisecond);

void BM_PinvFull(benchmark::State& state) {
  const aact::RealMatrix a = random_matrix(state.range(0), state.range(1) + 10, 1);
  for (auto _ : state) benchmark::DoNotOptimize(aact::pinv_full(a));
}
BENCHMARK(BM_PinvFull)->Args({2000, 50})->Args({2000, 190})->Args({12000, 190})
    ->Unit(benchmark::kMillisecond);

void BM_WeightsExtend(benchmark::State& state) {
  const auto n = state.range(0);
  const aact::RealMatrix a = random_matrix(n, 100, 3);
  const aact::PinvState base{a, aact::pinv_full(a)};
  const aact::RealMatrix g = random_matrix(n, 10, 4);
  const aact::RealMatrix y = random_matrix(n, 2, 5);
  const aact::RealMatrix w = base.a_pinv * y;
  for (auto _ : state) benchmark::DoNotOptimize(aact::weights_extend(w, base, g, y));
}
BENCHMARK(BM_WeightsExtend)->Arg(2000)->Arg(12000)->Unit(benchmark::kMillisecond);

}  // namespace
