#include <benchmark/benchmark.h>

#include "grushin/observability.hpp"
#include "grushin/shooting.hpp"
#include "grushin/spectrum.hpp"

using namespace grushin;

namespace {

const OperatorSpec& classical() {
    static const OperatorSpec s = OperatorSpec::make_power_law(1.0, 1.0, 1.0);
    return s;
}

void BM_KummerRoot(benchmark::State& state) {
    const double xi = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(interval_eigenvalue_kummer(classical(), xi, 1).lambda);
}
BENCHMARK(BM_KummerRoot)->Arg(10)->Arg(50)->Arg(100);

void BM_FdOracle(benchmark::State& state) {
    const int cells = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(fd_eigs_adapted(classical(), 50.0, cells, 2, {1e-6, false, true}).best(0));
}
BENCHMARK(BM_FdOracle)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ShootingGround(benchmark::State& state) {
    const double xi = static_cast<double>(state.range(0));
    const double guess = interval_eigenvalue_kummer(classical(), std::min(xi, 60.0), 0).lambda * xi / std::min(xi, 60.0);
    for (auto _ : state) benchmark::DoNotOptimize(ground_state_profile(classical(), xi, guess).lambda);
}
BENCHMARK(BM_ShootingGround)->Arg(40)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ObsSweepRow(benchmark::State& state) {
    for (auto _ : state) {
        const auto sys = ModeSystem::build(classical(), state.range(0));
        benchmark::DoNotOptimize(observability_ratio(sys, {0.5, 0.7}, 0.0625).log_ratio);
    }
}
BENCHMARK(BM_ObsSweepRow)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
