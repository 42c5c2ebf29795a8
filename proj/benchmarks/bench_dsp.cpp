#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "intercept/augment.hpp"
#include "intercept/dsp.hpp"

using namespace intercept;

namespace {

dsp::Signal noise(std::size_t n) {
    std::mt19937_64 gen(n);
    std::normal_distribution<double> d(0.0, 0.1);
    dsp::Signal x{std::vector<double>(n), 48000};
    for (auto& s : x.samples) s = d(gen);
    return x;
}

void BM_PhaseShift(benchmark::State& state) {
    const auto x = noise(static_cast<std::size_t>(state.range(0)));
    const dsp::PhaseAngle theta(0.6);
    for (auto _ : state) benchmark::DoNotOptimize(dsp::phase_shift(x, theta));
    state.SetComplexityN(state.range(0));
}

void BM_Hilbert(benchmark::State& state) {
    const auto x = noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(dsp::hilbert(x));
    state.SetComplexityN(state.range(0));
}

void BM_Augment(benchmark::State& state) {
    const auto x = noise(static_cast<std::size_t>(state.range(0)));
    augment::AugmentStream stream(augment::AugmentConfig{42, 1.0}, 0);
    for (auto _ : state) benchmark::DoNotOptimize(stream.next(x));
    state.SetComplexityN(state.range(0));
}

// Odd and prime lengths take FFTW's slower paths.
void BM_PhaseShiftPrime(benchmark::State& state) {
    const auto x = noise(65521);
    const dsp::PhaseAngle theta(-1.1);
    for (auto _ : state) benchmark::DoNotOptimize(dsp::phase_shift(x, theta));
}

}  // namespace

BENCHMARK(BM_PhaseShift)->RangeMultiplier(2)->Range(1 << 10, 1 << 20)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_Hilbert)->RangeMultiplier(2)->Range(1 << 10, 1 << 20)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_Augment)->RangeMultiplier(2)->Range(1 << 16, 1 << 20)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_PhaseShiftPrime);
BENCHMARK_MAIN();
