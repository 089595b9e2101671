#pragma once

#include <cstdint>
#include <random>

#include "zkcyl/estimates.hpp"
#include "zkcyl/util.hpp"

namespace zkcyl {

// Line soliton of speed c: u = 3c sech^2(sqrt(c) (x - x0) / 2), constant in y.
// Solves the flow exactly on the line; on the box the tails must sit below
// roundoff, which the caller controls through Lambda.
inline PhysicalField soliton_profile(const GridSpec& g, double c, double x0) {
    PhysicalField f(g);
    const double r = 0.5 * std::sqrt(c);
    for (int i = 0; i < g.mx; ++i) {
        const double sech = 1.0 / std::cosh(r * (g.x(i) - x0));
        const double val = 3.0 * c * sech * sech;
        for (int j = 0; j < g.my; ++j) f.at(i, j) = val;
    }
    return f;
}

// Spectral translate: exact shift by delta in x.
inline SpectralField translate_x(const SpectralField& f, double delta) {
    SpectralField out = f;
    for (int k = 0; k < f.grid.mx; ++k) {
        const cplx phase = std::polar(1.0, -delta * f.grid.xi(k));
        for (int j = 0; j < f.grid.my; ++j) out.at(k, j) *= phase;
    }
    return out;
}

// Residual of the traveling-wave substitution u(x - c t): c u' = u''' + u u'
// fails by this much on the grid; measured in L2.
inline double traveling_residual(const SpectralField& f, double c) {
    SpectralField lin = x_derivative(laplacian(f));
    const SpectralField adv = x_derivative(f);
    const SpectralField nl = nonlinear_rhs(f, true);
    SpectralField res = lin;
    for (std::size_t i = 0; i < res.coeffs.size(); ++i)
        res.coeffs[i] = -c * adv.coeffs[i] + lin.coeffs[i] - nl.coeffs[i];
    return l2_norm(res);
}

// Deterministic random real field with coefficient magnitude
// amp * <|(xi,q)|_w>^(-decay) inside |xi| <= ximax, |q| <= qmax (0 = no cap),
// zero mean.  Used for generic smooth or slowly-decaying test data.
inline SpectralField random_field(const GridSpec& g, double amp, double decay, double ximax,
                                  double qmax, std::uint64_t seed) {
    SpectralField f(g);
    std::uint64_t st = seed ^ 0x9d2c5680a7b4c2e1ULL;
    std::mt19937_64 eng(splitmix64(st));
    for (int k = 0; k < g.mx; ++k) {
        for (int j = 0; j < g.my; ++j) {
            const double xi = g.xi(k), q = g.qy(j);
            const double phase = two_pi * uniform01(eng);  // drawn for every site in order
            if (k == 0 && j == 0) continue;
            if (ximax > 0.0 && std::abs(xi) > ximax) continue;
            if (qmax > 0.0 && std::abs(q) > qmax) continue;
            // respect the dealias budget so squares stay representable
            if (std::abs(g.ks(k)) > g.mx / 3 || std::abs(g.js(j)) > g.my / 3) continue;
            const double mag = amp * std::pow(jbracket(weighted_mod(xi, q)), -decay);
            f.at(k, j) = std::polar(mag, phase);
        }
    }
    enforce_hermitian(f);
    return f;
}

// Smooth low-frequency pulse with a mild transverse ripple; the workhorse
// initial datum for conservation and increment runs.
inline SpectralField bump_data(const GridSpec& g, double amp, double ripple,
                               std::uint64_t seed = 11) {
    PhysicalField f(g);
    std::uint64_t st = seed;
    std::mt19937_64 eng(splitmix64(st));
    const double ph1 = two_pi * uniform01(eng), ph2 = two_pi * uniform01(eng);
    const double xc = 0.5 * g.x_period();
    for (int i = 0; i < g.mx; ++i) {
        const double x = g.x(i) - xc;
        const double envelope = std::exp(-0.5 * x * x);
        for (int j = 0; j < g.my; ++j) {
            const double y = g.y(j);
            f.at(i, j) = amp * envelope *
                         (1.0 + ripple * std::cos(y / g.lambda + ph1) +
                          0.5 * ripple * std::cos(2.0 * y / g.lambda + ph2));
        }
    }
    return forward(f);
}

}  // namespace zkcyl
