#include "fssecm/analysis.h"
#include "fssecm/constants.h"

#include <benchmark/benchmark.h>

namespace {

using namespace fssecm;

fss_stack reference_stack() {
    const extracted_circuit c{4.9 * units::nh, 0.5 * units::pf, 4.0 * units::nh,
                              0.35 * units::pf, 0.8 * units::nh};
    return build_first_order(c, {0.635 * units::mm, 10.2, 0.0023}, {}, true);
}

sweep_grid grid_of(benchmark::State& state) {
    sweep_grid g;
    g.start = 0.5 * units::ghz;
    g.stop = 12 * units::ghz;
    g.points = static_cast<int>(state.range(0));
    return g;
}

void bm_sweep_serial(benchmark::State& state) {
    const fss_stack stack = reference_stack();
    const sweep_grid grid = grid_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep_serial(stack, grid));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_sweep_parallel(benchmark::State& state) {
    const fss_stack stack = reference_stack();
    const sweep_grid grid = grid_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep(stack, grid));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_report_bands(benchmark::State& state) {
    const fss_stack stack = reference_stack();
    const response_table t = sweep(stack, grid_of(state));
    const auto zeros = transmission_zeros(stack);
    for (auto _ : state) {
        benchmark::DoNotOptimize(report_bands(t, zeros));
    }
}

} // namespace

BENCHMARK(bm_sweep_serial)->Arg(1401)->Arg(14001)->Arg(140001);
BENCHMARK(bm_sweep_parallel)->Arg(1401)->Arg(14001)->Arg(140001);
BENCHMARK(bm_report_bands)->Arg(1401)->Arg(14001);

BENCHMARK_MAIN();
