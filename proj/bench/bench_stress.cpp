// Stress kernel throughput: serial reference, OpenMP kernel, FFT oracle, and one explicit step.

#include "gbevolve/evolution.hpp"
#include "gbevolve/stress.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace gbevolve;

namespace {

Field profile(const Grid& g) {
    return Field::sample(g, [](double x) { return std::cos(x) + 0.3 * std::sin(3.0 * x); });
}

void toeplitz(benchmark::State& state, bool parallel) {
    const Grid g = make_grid(0.0, 2.0 * std::numbers::pi, static_cast<std::size_t>(state.range(0)));
    const StressOperator op(g, 1.0, {.local = true, .image_terms = 64, .eps = 0.0, .parallel = parallel});
    const Field hx = profile(g);
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(hx));
    state.SetComplexityN(state.range(0));
}

void BM_ToeplitzSerial(benchmark::State& state) { toeplitz(state, false); }
void BM_ToeplitzParallel(benchmark::State& state) { toeplitz(state, true); }

void BM_Spectral(benchmark::State& state) {
    const Grid g = make_grid(0.0, 2.0 * std::numbers::pi, static_cast<std::size_t>(state.range(0)));
    const Field hx = profile(g);
    for (auto _ : state) benchmark::DoNotOptimize(sigma_spectral_oracle(hx, 1.0));
}

void BM_ExplicitStep(benchmark::State& state) {
    const Grid g = make_grid(0.0, 2.0 * std::numbers::pi, static_cast<std::size_t>(state.range(0)));
    ModelParams p;
    p.alpha2 = 0.05;
    p.alpha3 = 0.1;
    p.kappa = 0.05;
    const Evolver ev(g, p, SigmaMethod::truncated());
    const Field h = Field::sample(g, [](double x) { return std::sin(x); });
    const double dt = ev.stable_dt(h, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(ev.step_explicit(h, dt));
}

}  // namespace

BENCHMARK(BM_ToeplitzSerial)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_ToeplitzParallel)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_Spectral)->RangeMultiplier(2)->Range(256, 4096);
BENCHMARK(BM_ExplicitStep)->RangeMultiplier(2)->Range(256, 2048);

BENCHMARK_MAIN();
