#include <benchmark/benchmark.h>

#include "roughpam/chaos_expansion.hpp"
#include "roughpam/feynman_kac.hpp"
#include "roughpam/heat_solver.hpp"
#include "roughpam/rng.hpp"
#include "roughpam/spectral_noise.hpp"

using namespace roughpam;

static void BM_PhiloxNormal(benchmark::State& state) {
    RngStream rng(1, 2);
    std::vector<double> buf(4096);
    for (auto _ : state) {
        rng.fill_normal(buf.data(), buf.size());
        benchmark::DoNotOptimize(buf.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(buf.size()));
}
BENCHMARK(BM_PhiloxNormal);

static void BM_MildStep(benchmark::State& state) {
    ModelParams p;
    SpectralGrid g;
    g.mode_cutoff = static_cast<int>(state.range(0));
    MildStepper stepper(p, g);
    RngStream rng(3, 4);
    SolutionField u = project_initial_condition(p.u0, g);
    NoiseIncrement dw(g.mode_cutoff);
    std::int64_t steps = 0;
    for (auto _ : state) {
        stepper.sampler().sample(rng, dw);
        stepper.step(u, dw);
        benchmark::DoNotOptimize(u.coeffs.data());
        // Restart at the horizon so the field stays in its typical range.
        if (++steps % 1000 == 0) u = project_initial_condition(p.u0, g);
    }
}
BENCHMARK(BM_MildStep)->Arg(256)->Arg(1024);

static void BM_KernelTable(benchmark::State& state) {
    const HurstParam h(0.35);
    for (auto _ : state) {
        MollifiedKernel k(h);
        benchmark::DoNotOptimize(k.profile(1.0));
    }
}
BENCHMARK(BM_KernelTable)->Unit(benchmark::kMillisecond);

static void BM_KernelLookup(benchmark::State& state) {
    const auto k = MollifiedKernel::shared(HurstParam(0.35))->at(1e-3);
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(k(x));
        x += 1e-4;
        if (x > 2.0) x = 0.0;
    }
}
BENCHMARK(BM_KernelLookup);

static void BM_FkPairFunctional(benchmark::State& state) {
    RngStream rng(5, 6);
    const auto ens = sample_ensemble(3, 0.25, 6.25e-5, 1.0, rng);
    const HurstParam h(0.35);
    for (auto _ : state) benchmark::DoNotOptimize(pair_functional(ens, 0, 1, 1e-3, h));
}
BENCHMARK(BM_FkPairFunctional);

static void BM_ChaosQuadrature(benchmark::State& state) {
    ModelParams p;
    ChaosBudget b;
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(chaos_norm_sq(n, 0.25, 0.0, p, b).value);
}
BENCHMARK(BM_ChaosQuadrature)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
