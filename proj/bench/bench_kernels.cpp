// Serial reference loop against the OpenMP batch kernel on the test problem.
#include <benchmark/benchmark.h>

#include <vector>

#include "jdweak/jumps.hpp"
#include "jdweak/kernels.hpp"
#include "jdweak/model.hpp"
#include "jdweak/realization.hpp"

namespace {

using namespace jdweak;

const Simulator& simulator() {
    static const Simulator sim(builtin_test_problem(), Seeds{});
    return sim;
}

void BM_BatchSerial(benchmark::State& state) {
    const auto mesh = uniform_mesh(1.0, static_cast<std::size_t>(state.range(0)));
    const std::size_t m = 1024;
    std::vector<double> out(m);
    for (auto _ : state) {
        for_each_index_serial(m, [&](std::size_t i) {
            out[i] = sample_on_mesh(simulator(), mesh, i, DensityMode::rhotilde, 0.02).indicator_total;
        });
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}

void BM_BatchParallel(benchmark::State& state) {
    const auto mesh = uniform_mesh(1.0, static_cast<std::size_t>(state.range(0)));
    const std::size_t m = 1024;
    const int workers = available_workers();
    std::vector<double> out(m);
    for (auto _ : state) {
        for_each_index(m, workers, [&](std::size_t i) {
            out[i] = sample_on_mesh(simulator(), mesh, i, DensityMode::rhotilde, 0.02).indicator_total;
        });
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["workers"] = workers;
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
