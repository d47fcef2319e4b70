#include <benchmark/benchmark.h>

#include <random>

#include "isosum/localized.hpp"
#include "isosum/matfree.hpp"
#include "isosum/problem.hpp"

namespace {

isosum::BuiltProblem make(int dim, int order, int elements, const char* geometry) {
    isosum::ProblemSpec spec;
    spec.dim = dim;
    spec.order = {order};
    spec.elements = {elements};
    spec.geometry = geometry;
    return isosum::build_problem(spec);
}

void report(benchmark::State& state, const isosum::FlopCounter& fc, std::uint64_t flops) {
    state.counters["flops"] = static_cast<double>(flops);
    state.counters["flop_rate"] =
        benchmark::Counter(static_cast<double>(flops) * static_cast<double>(state.iterations()),
                           benchmark::Counter::kIsRate);
    (void)fc;
}

void BM_assemble_global(benchmark::State& state) {
    const auto built = make(2, static_cast<int>(state.range(0)), 32, "quarter_annulus");
    isosum::FlopCounter fc;
    for (auto _ : state) {
        fc = {};
        benchmark::DoNotOptimize(isosum::assemble(built.problem, fc));
    }
    report(state, fc, fc.block_update);
}

void localized(benchmark::State& state, isosum::PartitionStrategy strategy) {
    const auto built = make(2, static_cast<int>(state.range(0)), 32, "quarter_annulus");
    const auto part = isosum::make_partition(built.problem.trial, strategy);
    isosum::FlopCounter fc;
    for (auto _ : state) {
        fc = {};
        benchmark::DoNotOptimize(isosum::assemble_localized(built.problem, part, fc));
    }
    report(state, fc, fc.block_update);
}

void BM_assemble_element(benchmark::State& state) { localized(state, isosum::PartitionStrategy::element); }
void BM_assemble_macro(benchmark::State& state) { localized(state, isosum::PartitionStrategy::macro); }
void BM_assemble_narrow(benchmark::State& state) { localized(state, isosum::PartitionStrategy::narrow); }

void BM_apply_global(benchmark::State& state) {
    const auto built = make(2, static_cast<int>(state.range(0)), 32, "quarter_annulus");
    const isosum::MatrixFreeOperator op(built.problem);
    std::vector<double> u(static_cast<std::size_t>(op.cols()));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& v : u) {
        v = dist(rng);
    }
    isosum::FlopCounter fc;
    for (auto _ : state) {
        fc = {};
        benchmark::DoNotOptimize(op.apply(u, fc));
    }
    report(state, fc, fc.apply_contract);
}

void BM_assemble_global_3d(benchmark::State& state) {
    const auto built = make(3, static_cast<int>(state.range(0)), 8, "twisted_box");
    isosum::FlopCounter fc;
    for (auto _ : state) {
        fc = {};
        benchmark::DoNotOptimize(isosum::assemble(built.problem, fc));
    }
    report(state, fc, fc.block_update);
}

}  // namespace

BENCHMARK(BM_assemble_global)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_element)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_macro)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_narrow)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_apply_global)->DenseRange(2, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_global_3d)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
