#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace zkcyl {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Uniform collocation grid on the rectangle [0, 2π·Lambda) x [0, 2π·lambda).
// The x direction stands in for the real line (the box is taken long enough
// that fields of interest decay below roundoff at the ends); the y direction
// is genuinely periodic with circumference 2π·lambda, so the y frequencies
// live on the lattice Z/lambda.  x frequencies live on Z/Lambda.
struct GridSpec {
    double Lambda = 1.0;  // x period scale (period 2π·Lambda)
    double lambda = 1.0;  // y circumference scale (period 2π·lambda)
    int mx = 8;           // x modes, even, >= 8
    int my = 8;           // y modes, even, >= 8
    double dt = 1e-3;     // default integrator step

    void validate() const {
        if (!(Lambda >= lambda) || !(lambda >= 1.0))
            throw std::invalid_argument("GridSpec: requires Lambda >= lambda >= 1");
        if (mx < 8 || my < 8 || mx % 2 != 0 || my % 2 != 0)
            throw std::invalid_argument("GridSpec: mx, my must be even and >= 8");
        if (!(dt > 0.0)) throw std::invalid_argument("GridSpec: dt must be positive");
    }

    double x_period() const { return two_pi * Lambda; }
    double y_period() const { return two_pi * lambda; }
    double dx() const { return x_period() / mx; }
    double dy() const { return y_period() / my; }
    double x(int i) const { return dx() * i; }
    double y(int j) const { return dy() * j; }

    // Storage uses natural FFT order; k in [0,mx) maps to the signed integer
    // index k - mx for k >= mx/2.
    int ks(int k) const { return k < mx / 2 ? k : k - mx; }
    int js(int j) const { return j < my / 2 ? j : j - my; }
    double xi(int k) const { return ks(k) / Lambda; }
    double qy(int j) const { return js(j) / lambda; }
    double xi_max() const { return (mx / 2) / Lambda; }
    double qy_max() const { return (my / 2) / lambda; }

    // Storage index of the signed mode pair, e.g. (-1, 2).
    int index_signed(int kx, int jy) const {
        int k = kx < 0 ? kx + mx : kx;
        int j = jy < 0 ? jy + my : jy;
        return k * my + j;
    }

    std::size_t modes() const { return static_cast<std::size_t>(mx) * my; }

    bool same_shape(const GridSpec& o) const {
        return mx == o.mx && my == o.my && Lambda == o.Lambda && lambda == o.lambda;
    }
};

// Real samples u(x_i, y_j), row-major with x outer, y inner.
struct PhysicalField {
    GridSpec grid;
    std::vector<double> values;

    PhysicalField() = default;
    explicit PhysicalField(const GridSpec& g) : grid(g), values(g.modes(), 0.0) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.my + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.my + j]; }
};

// Transform-side coefficients, same storage layout as PhysicalField with the
// natural FFT frequency order.  A field representing a real function carries
// the Hermitian symmetry F(-xi,-q) = conj F(xi,q).
struct SpectralField {
    GridSpec grid;
    std::vector<cplx> coeffs;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(g.modes(), cplx{0.0, 0.0}) {}

    cplx& at(int k, int j) { return coeffs[static_cast<std::size_t>(k) * grid.my + j]; }
    cplx at(int k, int j) const { return coeffs[static_cast<std::size_t>(k) * grid.my + j]; }
    cplx& at_signed(int kx, int jy) { return coeffs[grid.index_signed(kx, jy)]; }
    cplx at_signed(int kx, int jy) const { return coeffs[grid.index_signed(kx, jy)]; }
};

// Space-time coefficients indexed by (xi, q, tau).  tau frequencies form the
// uniform lattice n * (2π/tspan) in natural FFT order, n in [-mt/2, mt/2).
struct SpaceTimeField {
    GridSpec grid;
    int mt = 8;           // time modes, even, >= 8
    double tspan = 1.0;   // time period
    std::vector<cplx> coeffs;

    SpaceTimeField() = default;
    SpaceTimeField(const GridSpec& g, int mt_, double tspan_)
        : grid(g), mt(mt_), tspan(tspan_), coeffs(g.modes() * mt_, cplx{0.0, 0.0}) {
        validate();
    }

    void validate() const {
        grid.validate();
        if (mt < 8 || mt % 2 != 0)
            throw std::invalid_argument("SpaceTimeField: mt must be even and >= 8");
        if (!(tspan > 0.0)) throw std::invalid_argument("SpaceTimeField: tspan must be positive");
    }

    int ns(int n) const { return n < mt / 2 ? n : n - mt; }
    double dtau() const { return two_pi / tspan; }
    double tau(int n) const { return dtau() * ns(n); }
    double tau_max() const { return dtau() * (mt / 2); }
    double tgrid(int n) const { return tspan / mt * n; }

    std::size_t index(int k, int j, int n) const {
        return (static_cast<std::size_t>(k) * grid.my + j) * mt + n;
    }
    cplx& at(int k, int j, int n) { return coeffs[index(k, j, n)]; }
    cplx at(int k, int j, int n) const { return coeffs[index(k, j, n)]; }

    bool same_shape(const SpaceTimeField& o) const {
        return grid.same_shape(o.grid) && mt == o.mt && tspan == o.tspan;
    }
};

}  // namespace zkcyl
