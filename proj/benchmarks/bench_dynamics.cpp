#include <benchmark/benchmark.h>

#include "zkcyl/dynamics.hpp"
#include "zkcyl/functionals.hpp"
#include "zkcyl/multipliers.hpp"
#include "zkcyl/profiles.hpp"

using namespace zkcyl;

namespace {

void bm_nonlinear_rhs(benchmark::State& state) {
    const GridSpec g{1.0, 1.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                     1e-3};
    const SpectralField u = bump_data(g, 0.5, 0.2);
    for (auto _ : state) {
        SpectralField out = nonlinear_rhs(u);
        benchmark::DoNotOptimize(out.coeffs.data());
    }
}

void bm_step(benchmark::State& state) {
    const GridSpec g{1.0, 1.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                     1e-3};
    IntegratorConfig ic;
    ic.scheme = state.range(2) == 0 ? Scheme::etdrk4 : Scheme::strang;
    ic.dt = g.dt;
    ic.tend = g.dt;
    SpectralField u = bump_data(g, 0.5, 0.2);
    for (auto _ : state) {
        u = step(u, ic);
        benchmark::DoNotOptimize(u.coeffs.data());
    }
}

void bm_modified_energy(benchmark::State& state) {
    const GridSpec g{1.0, 1.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                     1e-3};
    const SpectralField u = bump_data(g, 0.5, 0.2);
    const IMultiplier m(32.0, 0.95);
    for (auto _ : state) {
        double e = modified_energy(u, m);
        benchmark::DoNotOptimize(e);
    }
}

}  // namespace

BENCHMARK(bm_nonlinear_rhs)->Args({256, 64})->Args({512, 32});
BENCHMARK(bm_step)->Args({512, 32, 0})->Args({512, 32, 1});
BENCHMARK(bm_modified_energy)->Args({512, 32});
