#include <benchmark/benchmark.h>

#include "xol/montecarlo.hpp"

namespace {

const auto kModel = xol::SeverityModel::pareto(9.0, 8.0);

void bm_portfolio_draws(benchmark::State& state) {
    for (auto _ : state) {
        xol::PortfolioDraws draws(kModel, static_cast<std::size_t>(state.range(0)), 20000, 1, 0, 1);
        benchmark::DoNotOptimize(draws.rows());
    }
}
BENCHMARK(bm_portfolio_draws)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void bm_mc_var_total_cost(benchmark::State& state) {
    const xol::PortfolioDraws draws(kModel, static_cast<std::size_t>(state.range(0)), 20000, 1, 0, 1);
    const auto rule = xol::LoadingRule::decreasing(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(xol::mc_var_total_cost(draws, rule, 0.75, 0.55));
}
BENCHMARK(bm_mc_var_total_cost)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void bm_brute_force(benchmark::State& state) {
    const xol::PortfolioDraws draws(kModel, 25, 20000, 1, 0, 1);
    const auto grid = xol::default_d_grid(kModel);
    const auto rule = xol::LoadingRule::decreasing(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(xol::brute_force_optimal(draws, rule, 0.75, grid));
}
BENCHMARK(bm_brute_force)->Unit(benchmark::kMillisecond);

} // namespace
