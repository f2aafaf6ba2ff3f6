#include "spde/integrators.hpp"

#include <benchmark/benchmark.h>

using namespace spde;

namespace {

void semigroup(benchmark::State& state) {
    const Grid grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const HeatOperator op(grid);
    const SemigroupPropagator prop(op, 1e-3);
    SpectralWorkspace ws(grid);
    auto u = sample_initial(InitialData::sine(grid.dimension()), grid);
    std::vector<double> v(u.values().begin(), u.values().end());
    for (auto _ : state) {
        prop.apply(v, v, ws);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(semigroup)->Args({1, 64})->Args({1, 256})->Args({1, 1024})->Args({2, 16})->Args({2, 64});

void implicit_solve(benchmark::State& state) {
    const Grid grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const HeatOperator op(grid);
    const ImplicitSolver solver(op, 1e-3);
    SpectralWorkspace ws(grid);
    auto u = sample_initial(InitialData::sine(grid.dimension()), grid);
    std::vector<double> v(u.values().begin(), u.values().end());
    for (auto _ : state) {
        solver.solve(v, v, ws);
        benchmark::DoNotOptimize(v.data());
    }
}
BENCHMARK(implicit_solve)->Args({1, 256})->Args({1, 1024})->Args({2, 16});

void step_kernel(benchmark::State& state) {
    const auto kind = all_integrators[static_cast<std::size_t>(state.range(0))];
    const Grid grid(1, static_cast<int>(state.range(1)));
    const HeatOperator op(grid);
    const StepContext ctx(op, Nonlinearity::rational(1.0), 1.0 / 8192);
    StepWorkspace ws(grid);
    const auto u0 = sample_initial(InitialData::sine_1d(), grid);
    std::vector<double> v(u0.values().begin(), u0.values().end());
    double db = 0.01;
    for (auto _ : state) {
        step(kind, ctx, v, db, v, ws);
        db = -db;
        benchmark::DoNotOptimize(v.data());
    }
    state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(step_kernel)->ArgsProduct({{0, 1, 2, 3}, {256, 1024}});

void brownian_path(benchmark::State& state) {
    std::uint64_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_path(0.5, static_cast<int>(state.range(0)), 1, k++));
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(brownian_path)->Arg(12)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
