#include <benchmark/benchmark.h>

#include "zkcyl/profiles.hpp"
#include "zkcyl/transform.hpp"

using namespace zkcyl;

namespace {

GridSpec grid(int mx, int my) { return GridSpec{1.0, 1.0, mx, my, 1e-3}; }

void bm_forward(benchmark::State& state) {
    const GridSpec g = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const PhysicalField f = inverse(random_field(g, 1.0, 0.5, 0, 0, 7));
    for (auto _ : state) {
        SpectralField out = forward(f);
        benchmark::DoNotOptimize(out.coeffs.data());
    }
}

void bm_roundtrip(benchmark::State& state) {
    const GridSpec g = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const SpectralField f = random_field(g, 1.0, 0.5, 0, 0, 7);
    for (auto _ : state) {
        SpectralField out = forward(inverse(f));
        benchmark::DoNotOptimize(out.coeffs.data());
    }
}

void bm_convolve(benchmark::State& state) {
    const GridSpec g = grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const SpectralField f = random_field(g, 1.0, 0.5, 0, 0, 7);
    const SpectralField h = random_field(g, 1.0, 0.5, 0, 0, 8);
    for (auto _ : state) {
        SpectralField out = convolve(f, h);
        benchmark::DoNotOptimize(out.coeffs.data());
    }
}

}  // namespace

BENCHMARK(bm_forward)->Args({256, 64})->Args({512, 32})->Args({1024, 16});
BENCHMARK(bm_roundtrip)->Args({256, 64})->Args({512, 32});
BENCHMARK(bm_convolve)->Args({256, 64})->Args({512, 32});
