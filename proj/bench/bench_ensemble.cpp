#include <benchmark/benchmark.h>
#include <omp.h>
#include <spdlog/spdlog.h>

#include "scnd/stochastic.hpp"

namespace {

struct Fixture {
    scnd::InstanceSpec spec;
    scnd::Stage1Solution sol;
};

// A 20x20x20 design from the first branch-and-bound nodes; the ensemble cost
// depends on the cell count, not on how close the design is to optimal.
const Fixture& fixture() {
    static const Fixture f = [] {
        spdlog::set_level(spdlog::level::warn);
        Fixture out;
        out.spec = scnd::generate_instance(42, 20, 20, 20);
        scnd::SolverConfig cfg;
        cfg.node_limit = 2;
        out.sol = *scnd::solve_stage1(out.spec, cfg).solution;
        return out;
    }();
    return f;
}

scnd::EnsembleOptions options(std::size_t n, int threads) {
    scnd::EnsembleOptions o;
    o.n = n;
    o.seed = 42;
    o.threads = threads;
    o.include_infeasible = true;
    return o;
}

void BM_EnsembleParallel(benchmark::State& state) {
    const auto& f = fixture();
    const auto o = options(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(scnd::run_ensemble(f.spec, f.sol, scnd::NoiseSpec{}, o));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_EnsembleSerial(benchmark::State& state) {
    const auto& f = fixture();
    const auto o = options(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(scnd::run_ensemble_serial(f.spec, f.sol, scnd::NoiseSpec{}, o));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_CountFeasible(benchmark::State& state) {
    const auto& f = fixture();
    const auto o = options(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(scnd::count_feasible(f.spec, f.sol, scnd::NoiseSpec{}, o));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void thread_sweep(benchmark::internal::Benchmark* b) {
    const int max_threads = omp_get_max_threads();
    for (int n : {10, 50}) {
        b->Args({n, 1});
        if (max_threads > 1) b->Args({n, max_threads});
    }
}

}  // namespace

BENCHMARK(BM_EnsembleParallel)->Apply(thread_sweep)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnsembleSerial)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CountFeasible)->Apply(thread_sweep)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
