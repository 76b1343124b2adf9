#include <benchmark/benchmark.h>

#include "qfactor/qcalc.hpp"

using namespace qfactor;

static void bm_jackson_integral(benchmark::State& state) {
    QLattice lat(0.9, 0.1, 1.0, static_cast<int>(state.range(0)));
    LatticeFn f = LatticeFn::sample(lat, [](double x) { return x * x + 1.0; });
    for (auto _ : state) {
        benchmark::DoNotOptimize(jackson_integral(f).value);
    }
}
BENCHMARK(bm_jackson_integral)->Arg(64)->Arg(256);

static void bm_q_pochhammer_inf(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(q_pochhammer_inf(0.5, 0.9).value);
    }
}
BENCHMARK(bm_q_pochhammer_inf);

BENCHMARK_MAIN();
