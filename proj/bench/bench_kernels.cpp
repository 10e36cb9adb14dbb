#include <benchmark/benchmark.h>

#include "mtctrl/benchmarks.hpp"
#include "mtctrl/trainer.hpp"

namespace {

using namespace mtctrl;

MultiTaskProblem problem_of(int M, int N) {
    MultiTaskProblem p;
    p.N = N;
    for (int k = 0; k < M; ++k) p.systems.push_back(random_siso(2, trial_seed(7, k)));
    return p;
}

DecisionVars vars_of(const MultiTaskProblem& p) { return init_vars(p, TrainConfig{}, 11); }

// args: M, N
void BM_EvaluateReference(benchmark::State& state) {
    const auto p = problem_of(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const ControllerParams params = vars_of(p).params();
    for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate(p, params));
}

void BM_EvaluateStructured(benchmark::State& state) {
    const auto p = problem_of(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const ControllerParams params = vars_of(p).params();
    const CostModel model(p);
    for (auto _ : state) benchmark::DoNotOptimize(model.evaluate(params));
}

void BM_CostReference(benchmark::State& state) {
    const auto p = problem_of(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const ControllerParams params = vars_of(p).params();
    for (auto _ : state) benchmark::DoNotOptimize(reference::cost(p, params));
}

void BM_CostStructured(benchmark::State& state) {
    const auto p = problem_of(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const ControllerParams params = vars_of(p).params();
    const CostModel model(p);
    for (auto _ : state) benchmark::DoNotOptimize(model.cost(params));
}

void shapes(benchmark::internal::Benchmark* b) {
    for (int M : {3, 6, 10})
        for (int N : {1, 4, 8}) b->Args({M, N});
}

}  // namespace

BENCHMARK(BM_EvaluateReference)->Apply(shapes);
BENCHMARK(BM_EvaluateStructured)->Apply(shapes);
BENCHMARK(BM_CostReference)->Apply(shapes);
BENCHMARK(BM_CostStructured)->Apply(shapes);

BENCHMARK_MAIN();
