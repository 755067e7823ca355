#include <benchmark/benchmark.h>

#include "qcosamp/builder.hpp"
#include "qcosamp/circuit.hpp"
#include "qcosamp/sampling_engine.hpp"
#include "qcosamp/statevec.hpp"

using namespace qcosamp;

static void BM_HadamardLayer(benchmark::State& state) {
    const int qubits = static_cast<int>(state.range(0));
    Circuit c(qubits);
    for (int q = 0; q < qubits; ++q) c.add(GateApplication::h(q));
    for (auto _ : state) {
        StateVector s = c.run_from_zero();
        benchmark::DoNotOptimize(s.amplitudes().data());
    }
    state.SetComplexityN(std::int64_t{1} << qubits);
}
BENCHMARK(BM_HadamardLayer)->DenseRange(10, 22, 4)->Complexity();

static void BM_ControlledPhaseCascade(benchmark::State& state) {
    const int qubits = static_cast<int>(state.range(0));
    Circuit c(qubits);
    for (int q = 0; q < qubits; ++q) c.add(GateApplication::h(q));
    for (int q = 1; q < qubits; ++q) {
        c.add(GateApplication::phase(kPi / (1 << q), qubits - 1, {q - 1}));
    }
    for (auto _ : state) {
        StateVector s = c.run_from_zero();
        benchmark::DoNotOptimize(s.amplitudes().data());
    }
}
BENCHMARK(BM_ControlledPhaseCascade)->DenseRange(10, 20, 5);

static void BM_AssembleThreeLeaves(benchmark::State& state) {
    QCoSampSpec spec;
    spec.components.push_back({Direct{1.0}, Direct{0.3}, Direct{-0.4}});
    spec.components.push_back({Direct{2.0}, Direct{1.2}, Direct{0.1}});
    spec.components.push_back({Direct{3.0}, Direct{-2.0}, Direct{0.8}});
    spec.tree = canonical_tree(3);
    spec.argument = Direct{0.7};
    for (auto _ : state) {
        const AssembledOperator op = assemble(spec);
        benchmark::DoNotOptimize(op.circuit.size());
    }
}
BENCHMARK(BM_AssembleThreeLeaves);

static void BM_SweepExact(benchmark::State& state) {
    QCoSampSpec spec;
    spec.components.push_back({Direct{2.0}, Direct{-0.2}, Direct{2.1}});
    spec.tree = TreeNode::make_leaf(0);
    spec.argument = Direct{0.0};
    const auto grid = default_grid(33);
    for (auto _ : state) {
        const SweepResult r = sweep(spec, grid, 0, 0);
        benchmark::DoNotOptimize(r.exact.data());
    }
}
BENCHMARK(BM_SweepExact);

static void BM_Sampling8192(benchmark::State& state) {
    Circuit c(4);
    for (int q = 0; q < 4; ++q) c.add(GateApplication::h(q));
    const StateVector s = c.run_from_zero();
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const Histogram h = sample(s, {0, 1, 2, 3}, 8192, seed++);
        benchmark::DoNotOptimize(h.counts.size());
    }
}
BENCHMARK(BM_Sampling8192);

BENCHMARK_MAIN();
