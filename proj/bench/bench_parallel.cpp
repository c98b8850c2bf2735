// Serial reference vs OpenMP path for the data-parallel kernels.
// The second argument of each benchmark selects the path (0 serial, 1 parallel).

#include <benchmark/benchmark.h>

#include "dynpolar/fibers.hpp"
#include "dynpolar/mean_rotation.hpp"
#include "dynpolar/parallel.hpp"

using namespace dynpolar;

namespace {

Execution exec_of(const benchmark::State& state) {
    return state.range(1) ? Execution::Parallel : Execution::Serial;
}

const VelocityField& field() {
    static const VelocityField f = VelocityField::shear3d(1.0, 0.5, 0.2);
    return f;
}

void BM_MeanSpinHistory(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const BodySampler sampler = BodySampler::uniform_grid(Vec{-1.0, -1.0, -1.0}, Vec{1.0, 1.0, 1.0}, {n, n, n});
    const TimeGrid grid(0.0, 1.0, 200);
    for (auto _ : state) benchmark::DoNotOptimize(mean_spin_history(field(), sampler, grid, exec_of(state)));
    state.counters["seeds"] = static_cast<double>(sampler.size());
}

void BM_AdvectBatch(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const BodySampler sampler = BodySampler::uniform_grid(Vec{-1.0, -1.0, -1.0}, Vec{1.0, 1.0, 1.0}, {n, n, n});
    const TimeGrid grid(0.0, 1.0, 200);
    for (auto _ : state) benchmark::DoNotOptimize(advect_batch(field(), sampler.seeds(), grid, exec_of(state)));
}

void BM_FiberAverage(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SphereQuadrature q = SphereQuadrature::gauss_product(n, 2 * n);
    const FieldSample s = evaluate(VelocityField::linear(Mat{{0.1, 0.7, -0.2}, {0.3, -0.4, 0.5}, {0.6, 0.0, 0.3}}),
                                   Vec(3), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(fiber_averaged_angular_velocity(s, q, exec_of(state)));
    state.counters["nodes"] = static_cast<double>(q.nodes.size());
}

} // namespace

BENCHMARK(BM_MeanSpinHistory)->ArgsProduct({{4, 8}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdvectBatch)->ArgsProduct({{4, 8}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FiberAverage)->ArgsProduct({{24, 96}, {0, 1}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
