#include <benchmark/benchmark.h>

#include "aact/neural_unit.hpp"
#include "aact/random.hpp"

namespace {

struct Task {
  aact::RealMatrix x, y;
};

Task make_task(Eigen::Index n, Eigen::Index dim) {
  aact::Substream rng(9);
  Task t{aact::RealMatrix(n, dim), aact::RealMatrix::Zero(n, 2)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index c = i % 2;
    for (Eigen::Index j = 0; j < dim; ++j) t.x(i, j) = rng.canonical() + (j % 2 == c ? 0.3 : 0.0);
    t.y(i, c) = 1.0;
  }
  return t;
}

// One recruitment round (t_max draws of l nodes) on an MNIST-sized task.
void BM_TryRecruit(benchmark::State& state) {
  const Task t = make_task(state.range(0), 784);
  aact::GrowthConfig cfg;
  cfg.step = static_cast<std::size_t>(state.range(1));
  cfg.t_max = static_cast<std::size_t>(state.range(2));
  aact::NeuralUnit unit;
  unit.input_dim = 784;
  unit.num_classes = 2;
  unit.w_in.resize(784, 0);
  unit.w_out.resize(0, 2);
  const auto resid = aact::ResidualState::from(t.y);
  std::uint64_t key = 0;
  for (auto _ : state) benchmark::DoNotOptimize(aact::try_recruit(unit, resid, t.x, cfg, key++));
}
BENCHMARK(BM_TryRecruit)
    ->Args({2000, 10, 50})
    ->Args({12000, 10, 50})
    ->Args({12000, 1, 50})
    ->Unit(benchmark::kMillisecond);

void BM_GrowUnit(benchmark::State& state) {
  const Task t = make_task(state.range(0), 784);
  aact::GrowthConfig cfg;
  cfg.l_max = 60;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aact::grow_unit(t.x, t.y, cfg, aact::ActivationKind::kSigmoid));
  }
}
BENCHMARK(BM_GrowUnit)->Arg(2000)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
