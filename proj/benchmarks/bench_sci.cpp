#include <benchmark/benchmark.h>

#include <random>

#include "sci/denoise.hpp"
#include "sci/operator.hpp"
#include "sci/solver.hpp"
#include "sci/unfold.hpp"

using namespace sci;

namespace {

MaskCube bench_mask(int rows, int cols, int frames) {
    std::mt19937_64 rng(42);
    MaskCube mask(rows, cols, frames);
    for (double& v : mask.data) v = (rng() & 1) ? 1.0 : 0.0;
    return mask;
}

VideoCube bench_cube(int rows, int cols, int frames) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    VideoCube cube(rows, cols, frames);
    for (double& v : cube.data) v = dist(rng);
    return cube;
}

const DenoiserSpec kBlend{DenoiserKind::gaussian_blend, 2, 1.0};
const DenoiserSpec kHaar{DenoiserKind::haar_soft_threshold, 2, 1.0};

void BM_apply_phi(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SciOperator op(bench_mask(n, n, 8));
    const VideoCube cube = bench_cube(n, n, 8);
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(cube));
    state.SetItemsProcessed(state.iterations() * cube.size());
}
BENCHMARK(BM_apply_phi)->Arg(64)->Arg(256);

void BM_apply_phi_transpose(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SciOperator op(bench_mask(n, n, 8));
    const Measurement y = op.apply(bench_cube(n, n, 8));
    for (auto _ : state) benchmark::DoNotOptimize(op.apply_adjoint(y));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n * 8);
}
BENCHMARK(BM_apply_phi_transpose)->Arg(64)->Arg(256);

void BM_admm_iteration(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SciOperator op(bench_mask(n, n, 8));
    const Measurement y = op.apply(bench_cube(n, n, 8));
    SolverState st = init_state(y, op, SolverVariant::admm);
    for (auto _ : state) admm_step(st, y, op, 0.01, kBlend, 12.0 / 255.0);
}
BENCHMARK(BM_admm_iteration)->Arg(64)->Arg(128);

void BM_gap_iteration(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SciOperator op(bench_mask(n, n, 8));
    const Measurement y = op.apply(bench_cube(n, n, 8));
    SolverState st = init_state(y, op, SolverVariant::gap_accelerated);
    for (auto _ : state) gap_step(st, y, op, true, kBlend, 12.0 / 255.0);
}
BENCHMARK(BM_gap_iteration)->Arg(64)->Arg(128);

void BM_denoise_blend(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const VideoCube cube = bench_cube(n, n, 8);
    for (auto _ : state) benchmark::DoNotOptimize(denoise(kBlend, cube, 0.1));
}
BENCHMARK(BM_denoise_blend)->Arg(64)->Arg(128);

void BM_denoise_haar(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const VideoCube cube = bench_cube(n, n, 8);
    for (auto _ : state) benchmark::DoNotOptimize(denoise(kHaar, cube, 0.1));
}
BENCHMARK(BM_denoise_haar)->Arg(64)->Arg(128);

void BM_unrolled_gradient(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    SciOperator op(bench_mask(32, 32, 8));
    const VideoCube truth = bench_cube(32, 32, 8);
    const Measurement y = op.apply(truth);
    const TrainableSchedule params = init_logits_step(k);
    const CheckpointPlan plan = CheckpointPlan::make(k);
    UnfoldProblem prob(op, kBlend, SolverVariant::admm, 0.01);
    for (auto _ : state)
        benchmark::DoNotOptimize(prob.gradient(y, truth, params, plan));
}
BENCHMARK(BM_unrolled_gradient)->Arg(10)->Arg(20);

} // namespace

BENCHMARK_MAIN();
