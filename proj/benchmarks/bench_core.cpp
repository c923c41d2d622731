#include <benchmark/benchmark.h>

#include "stabclt/functionals.hpp"
#include "stabclt/neighbors.hpp"
#include "stabclt/point_process.hpp"

using namespace stabclt;

namespace {

DensitySpec unit_cube(std::size_t d) {
    return DensitySpec::homogeneous(Region({Box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0))}));
}

void BM_SamplePoisson(benchmark::State& state) {
    const auto density = unit_cube(static_cast<std::size_t>(state.range(0)));
    const double lambda = static_cast<double>(state.range(1));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_poisson(density, lambda, 1, StreamId{stream++, 0}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_SamplePoisson)->Args({1, 2000})->Args({2, 10000})->Args({3, 10000});

void BM_NeighborIndexBuild(benchmark::State& state) {
    const auto config = sample_poisson(unit_cube(static_cast<std::size_t>(state.range(0))),
                                       static_cast<double>(state.range(1)), 2, StreamId{0, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(NeighborIndex(config));
    }
}
BENCHMARK(BM_NeighborIndexBuild)->Args({1, 10000})->Args({2, 10000})->Args({3, 10000});

void BM_KnnAll(benchmark::State& state) {
    const auto config = sample_poisson(unit_cube(static_cast<std::size_t>(state.range(0))), 10000.0, 3,
                                       StreamId{0, 0});
    const NeighborIndex index(config);
    const auto k = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) {
        for (std::size_t i = 0; i < config.size(); ++i) {
            benchmark::DoNotOptimize(index.nearest(i, k));
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.size()));
}
BENCHMARK(BM_KnnAll)->Args({1, 1})->Args({2, 1})->Args({2, 5})->Args({3, 5});

void BM_TStatisticDirected(benchmark::State& state) {
    const auto density = unit_cube(1);
    const double lambda = static_cast<double>(state.range(0));
    const auto config = sample_poisson(density, lambda, 4, StreamId{0, 0});
    const auto f = TestFunctionSpec::indicator(Region::interval(0.0, 1.0));
    const FunctionalSpec spec{Family::nn_directed, 1, WeightExponent{1.0}, lambda};
    for (auto _ : state) {
        benchmark::DoNotOptimize(t_statistic(config, f, spec));
    }
}
BENCHMARK(BM_TStatisticDirected)->Arg(2000)->Arg(6400);

} // namespace

BENCHMARK_MAIN();
