#include <benchmark/benchmark.h>

#include "xol/severity.hpp"

namespace {

void bm_pareto_moments(benchmark::State& state) {
    const auto m = xol::SeverityModel::pareto(9.0, 8.0);
    double d = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(xol::truncated_moments(m, d));
        d = d < 5.0 ? d * 1.01 : 0.5;
    }
}
BENCHMARK(bm_pareto_moments);

void bm_empirical_moments(benchmark::State& state) {
    const auto m = xol::SeverityModel::empirical(xol::sample(xol::SeverityModel::pareto(9.0, 8.0),
                                                             static_cast<std::size_t>(state.range(0)), 1));
    double d = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(xol::truncated_moments(m, d));
        d = d < 5.0 ? d * 1.01 : 0.5;
    }
}
BENCHMARK(bm_empirical_moments)->Arg(1000)->Arg(100000);

void bm_higher_moments(benchmark::State& state) {
    const auto m = xol::SeverityModel::pareto(9.0, 8.0);
    for (auto _ : state) benchmark::DoNotOptimize(xol::higher_truncated_moments(m, 2.0));
}
BENCHMARK(bm_higher_moments);

} // namespace
