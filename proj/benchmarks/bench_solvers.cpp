#include <benchmark/benchmark.h>

#include "xol/edgeworth.hpp"
#include "xol/inference.hpp"
#include "xol/retention.hpp"

namespace {

const auto kModel = xol::SeverityModel::pareto(9.0, 8.0);
const auto kVar75 = xol::DistortionMeasure::var(0.75);

void bm_solve(benchmark::State& state) {
    const auto rule = xol::make_rule(static_cast<xol::LoadingKind>(state.range(0)), state.range(0) == 0 ? 0.3 : 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(xol::solve_retention(kModel, rule, kVar75, 100));
    state.SetLabel(rule.name());
}
BENCHMARK(bm_solve)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void bm_solve_edgeworth(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(xol::solve_retention_edgeworth(kModel, 0.3, 0.75, 100, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(bm_solve_edgeworth)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void bm_estimate(benchmark::State& state) {
    const auto sample = xol::SeverityModel::empirical(xol::sample(kModel, static_cast<std::size_t>(state.range(1)), 7));
    const auto rule = xol::make_rule(static_cast<xol::LoadingKind>(state.range(0)), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(xol::estimate(sample, rule, kVar75));
    state.SetLabel(rule.name());
}
BENCHMARK(bm_estimate)
    ->ArgsProduct({{1, 2, 3}, {2000, 10000}})
    ->Unit(benchmark::kMillisecond);

} // namespace
