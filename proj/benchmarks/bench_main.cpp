#include <benchmark/benchmark.h>

#include <vector>

#include "treelab/cocycle.hpp"
#include "treelab/population.hpp"
#include "treelab/resolvent.hpp"
#include "treelab/stats.hpp"

using namespace treelab;

namespace {

PotentialSpec disordered(const Distribution& d, double lambda) {
    PotentialSpec p;
    p.disorder.distribution = d;
    p.coupling = lambda;
    return p;
}

void population_step_uniform(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const PotentialSpec pot = disordered(UniformDist{-1.0, 1.0}, 0.3);
    GammaPool pool = population_init(n, TreeParams(2), {0.0, 1e-3, 1});
    for (auto _ : state) {
        pool = population_step(pool, TreeParams(2), pot, 1);
        benchmark::DoNotOptimize(pool.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(population_step_uniform)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void population_step_cauchy(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const PotentialSpec pot = disordered(CauchyDist{1.0}, 0.2);
    GammaPool pool = population_init(n, TreeParams(2), {0.0, 1e-3, 1});
    for (auto _ : state) {
        pool = population_step(pool, TreeParams(2), pot, 1);
        benchmark::DoNotOptimize(pool.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(population_step_cauchy)->Arg(100'000)->Unit(benchmark::kMillisecond);

void exact_tree(benchmark::State& state) {
    const auto depth = static_cast<int>(state.range(0));
    const PotentialSpec pot = disordered(UniformDist{-1.0, 1.0}, 0.5);
    const TreeParams params(2, depth);
    for (auto _ : state) {
        auto r = exact_tree_gamma(params, pot, {0.3, 0.01, 1}, 7);
        benchmark::DoNotOptimize(r.root());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(params.vertex_count()));
}
BENCHMARK(exact_tree)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

void bands(benchmark::State& state) {
    const std::vector<double> u{1.0, 0.0, -1.0};
    for (auto _ : state) {
        auto b = ac_bands(u, 2, -5.0, 5.0, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(b.intervals.data());
    }
}
BENCHMARK(bands)->Arg(1000)->Arg(10000);

void lyapunov(benchmark::State& state) {
    const PotentialSpec pot = disordered(UniformDist{-1.0, 1.0}, 0.3);
    GammaPool pool = population_init(100'000, TreeParams(2), {0.0, 1e-2, 1});
    for (int i = 0; i < 20; ++i) pool = population_step(pool, TreeParams(2), pot, 3);
    const std::vector<GammaPool> pools{pool};
    for (auto _ : state) benchmark::DoNotOptimize(lyapunov_estimate(pools, 2).gamma_mean);
}
BENCHMARK(lyapunov)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
