#include <benchmark/benchmark.h>

#include "edkit/oracles.hpp"
#include "edkit/pso.hpp"
#include "edkit/rng.hpp"
#include "edkit/sa.hpp"

namespace {

edkit::DispatchProblem three_units(bool lossy)
{
    edkit::DispatchProblem p;
    p.units = {
        {0.008, 7.0, 200.0, 10.0, 85.0},
        {0.009, 6.3, 180.0, 10.0, 80.0},
        {0.007, 6.8, 140.0, 10.0, 70.0},
    };
    p.demand = 150.0;
    if (lossy)
        p.loss.emplace(std::vector<std::vector<double>>{
            {2.18e-5, 0.93e-5, 0.28e-5},
            {0.93e-5, 2.28e-5, 0.17e-5},
            {0.28e-5, 0.17e-5, 1.79e-5},
        });
    return p;
}

void BM_TotalCost(benchmark::State& state)
{
    const auto p = three_units(false);
    const std::vector<double> power = {31.9, 67.3, 50.8};
    for (auto _ : state)
        benchmark::DoNotOptimize(edkit::total_cost(p, power));
}
BENCHMARK(BM_TotalCost);

void BM_RepairLossless(benchmark::State& state)
{
    const auto p = three_units(false);
    std::vector<double> power = {40.0, 60.0, 30.0};
    for (auto _ : state) {
        power = edkit::repair_balance(p, std::move(power), 2);
        benchmark::DoNotOptimize(power.data());
    }
}
BENCHMARK(BM_RepairLossless);

void BM_RepairLossy(benchmark::State& state)
{
    const auto p = three_units(true);
    for (auto _ : state) {
        std::vector<double> power = {40.0, 60.0, 30.0};
        power = edkit::repair_balance(p, std::move(power), 2);
        benchmark::DoNotOptimize(power.data());
    }
}
BENCHMARK(BM_RepairLossy);

void BM_LambdaDispatch(benchmark::State& state)
{
    const auto p = three_units(state.range(0) != 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(edkit::lambda_dispatch(p));
}
BENCHMARK(BM_LambdaDispatch)->Arg(0)->Arg(1);

void BM_GridSearch(benchmark::State& state)
{
    const auto p = three_units(false);
    edkit::OracleParams params;
    params.grid_resolution = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(edkit::grid_search(p, params));
}
BENCHMARK(BM_GridSearch);

void BM_PsoSolve(benchmark::State& state)
{
    const auto p = three_units(state.range(0) != 0);
    edkit::PsoParams params;
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(edkit::pso_solve(p, params, seed++));
}
BENCHMARK(BM_PsoSolve)->Arg(0)->Arg(1);

void BM_SaSolve(benchmark::State& state)
{
    const auto p = three_units(false);
    edkit::SaParams params;
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(edkit::sa_solve(p, params, 200, seed++));
}
BENCHMARK(BM_SaSolve);

void BM_HybridSolve(benchmark::State& state)
{
    const auto p = three_units(state.range(0) != 0);
    edkit::HybridParams params;
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(edkit::hybrid_solve(p, params, seed++));
}
BENCHMARK(BM_HybridSolve)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
