#include "zkcyl/dynamics.hpp"

#include <cmath>

#include "zkcyl/util.hpp"

namespace zkcyl {
namespace {

std::vector<double> sigma_table(const GridSpec& g) {
    std::vector<double> sig(g.modes());
    for (int k = 0; k < g.mx; ++k) {
        const double xi = g.xi(k);
        for (int j = 0; j < g.my; ++j)
            sig[static_cast<std::size_t>(k) * g.my + j] = dispersion(xi, g.qy(j));
    }
    return sig;
}

bool finite(const SpectralField& f) {
    for (const auto& c : f.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// Plain (aliased) product transform, for the dealias=false path.
SpectralField product_aliased(const SpectralField& f) {
    PhysicalField u = inverse(f, 1e-6);
    PhysicalField sq(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i) sq.values[i] = u.values[i] * u.values[i];
    return forward(sq);
}

SpectralField square(const SpectralField& f, bool dealias) {
    return dealias ? convolve(f, f) : product_aliased(f);
}

SpectralField rhs(const SpectralField& f, bool dealias) {
    SpectralField out = x_derivative(square(f, dealias));
    for (auto& c : out.coeffs) c *= -0.5;
    return out;
}

SpectralField strang_step(const SpectralField& f, const std::vector<double>& sig, double dt,
                          bool dealias) {
    SpectralField u = f;
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
        u.coeffs[i] *= std::polar(1.0, 0.5 * dt * sig[i]);
    // classical RK4 on u_t = -(1/2) d_x(u^2) within the split
    SpectralField k1 = rhs(u, dealias);
    SpectralField u2 = u;
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) u2.coeffs[i] += 0.5 * dt * k1.coeffs[i];
    SpectralField k2 = rhs(u2, dealias);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
        u2.coeffs[i] = u.coeffs[i] + 0.5 * dt * k2.coeffs[i];
    SpectralField k3 = rhs(u2, dealias);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
        u2.coeffs[i] = u.coeffs[i] + dt * k3.coeffs[i];
    SpectralField k4 = rhs(u2, dealias);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
        u.coeffs[i] += dt / 6.0 *
                       (k1.coeffs[i] + 2.0 * k2.coeffs[i] + 2.0 * k3.coeffs[i] + k4.coeffs[i]);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
        u.coeffs[i] *= std::polar(1.0, 0.5 * dt * sig[i]);
    return u;
}

struct Etdrk4Tables {
    std::vector<cplx> e, e2, q, f1, f2, f3;
};

// phi-function values by averaging over a unit circle around z; the averaged
// expressions are entire, so the mean-value property gives the exact value
// without cancellation trouble near z = 0.
Etdrk4Tables etdrk4_tables(const std::vector<double>& sig, double dt) {
    constexpr int m = 32;
    Etdrk4Tables t;
    const std::size_t n = sig.size();
    t.e.resize(n);
    t.e2.resize(n);
    t.q.assign(n, cplx{0, 0});
    t.f1.assign(n, cplx{0, 0});
    t.f2.assign(n, cplx{0, 0});
    t.f3.assign(n, cplx{0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        const cplx z{0.0, sig[i] * dt};
        t.e[i] = std::exp(z);
        t.e2[i] = std::exp(0.5 * z);
        for (int p = 0; p < m; ++p) {
            const cplx zr = z + std::polar(1.0, two_pi * (p + 0.5) / m);
            const cplx ez = std::exp(zr);
            const cplx zr3 = zr * zr * zr;
            t.q[i] += (std::exp(0.5 * zr) - 1.0) / zr;
            t.f1[i] += (-4.0 - zr + ez * (4.0 - 3.0 * zr + zr * zr)) / zr3;
            t.f2[i] += (2.0 + zr + ez * (-2.0 + zr)) / zr3;
            t.f3[i] += (-4.0 - 3.0 * zr - zr * zr + ez * (4.0 - zr)) / zr3;
        }
        const double w = dt / m;
        t.q[i] *= w;
        t.f1[i] *= w;
        t.f2[i] *= w;
        t.f3[i] *= w;
    }
    return t;
}

SpectralField etdrk4_step(const SpectralField& f, const Etdrk4Tables& t, bool dealias) {
    const std::size_t n = f.coeffs.size();
    SpectralField nu = rhs(f, dealias);
    SpectralField a = f;
    for (std::size_t i = 0; i < n; ++i)
        a.coeffs[i] = t.e2[i] * f.coeffs[i] + t.q[i] * nu.coeffs[i];
    SpectralField na = rhs(a, dealias);
    SpectralField b = f;
    for (std::size_t i = 0; i < n; ++i)
        b.coeffs[i] = t.e2[i] * f.coeffs[i] + t.q[i] * na.coeffs[i];
    SpectralField nb = rhs(b, dealias);
    SpectralField c = a;
    for (std::size_t i = 0; i < n; ++i)
        c.coeffs[i] = t.e2[i] * a.coeffs[i] + t.q[i] * (2.0 * nb.coeffs[i] - nu.coeffs[i]);
    SpectralField nc = rhs(c, dealias);
    SpectralField out = f;
    for (std::size_t i = 0; i < n; ++i)
        out.coeffs[i] = t.e[i] * f.coeffs[i] + t.f1[i] * nu.coeffs[i] +
                        2.0 * t.f2[i] * (na.coeffs[i] + nb.coeffs[i]) + t.f3[i] * nc.coeffs[i];
    return out;
}

}  // namespace

SpectralField propagate_linear(const SpectralField& f, double t) {
    SpectralField out = f;
    for (int k = 0; k < f.grid.mx; ++k) {
        const double xi = f.grid.xi(k);
        for (int j = 0; j < f.grid.my; ++j)
            out.at(k, j) *= std::polar(1.0, t * dispersion(xi, f.grid.qy(j)));
    }
    return out;
}

SpectralField nonlinear_rhs(const SpectralField& f, bool dealias) { return rhs(f, dealias); }

SpectralField step(const SpectralField& f, const IntegratorConfig& cfg) {
    cfg.validate();
    const auto sig = sigma_table(f.grid);
    if (cfg.scheme == Scheme::strang) return strang_step(f, sig, cfg.dt, cfg.dealias);
    const auto tables = etdrk4_tables(sig, cfg.dt);
    return etdrk4_step(f, tables, cfg.dealias);
}

Trajectory evolve(const SpectralField& f0, const IntegratorConfig& cfg, int snap_every) {
    cfg.validate();
    if (snap_every < 1) throw std::invalid_argument("evolve: snap_every must be >= 1");
    const double steps_exact = cfg.tend / cfg.dt;
    const long long nsteps = std::llround(steps_exact);
    if (nsteps < 1 || std::abs(steps_exact - static_cast<double>(nsteps)) > 1e-8)
        throw std::invalid_argument("evolve: tend must be an integer number of steps");
    const auto sig = sigma_table(f0.grid);
    std::optional<Etdrk4Tables> tables;
    if (cfg.scheme == Scheme::etdrk4) tables = etdrk4_tables(sig, cfg.dt);
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(f0);
    SpectralField u = f0;
    for (long long i = 1; i <= nsteps; ++i) {
        u = cfg.scheme == Scheme::strang ? strang_step(u, sig, cfg.dt, cfg.dealias)
                                         : etdrk4_step(u, *tables, cfg.dealias);
        const double t = cfg.dt * static_cast<double>(i);
        if (!finite(u)) throw BlowupError(t);
        if (i % snap_every == 0 || i == nsteps) {
            traj.times.push_back(t);
            traj.states.push_back(u);
        }
    }
    return traj;
}

namespace {

// Prefix integrals of samples at uniform spacing h, fourth order: composite
// Simpson on even prefixes, with a 3/8 (or one-sided quadratic) closure on
// odd ones.
std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double h) {
    const std::size_t n = f.size();
    std::vector<cplx> out(n, cplx{0, 0});
    for (std::size_t j = 1; j < n; ++j) {
        if (j == 1) {
            out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
        } else if (j % 2 == 0) {
            out[j] = out[j - 2] + h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
        } else if (j == 3) {
            out[3] = 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
        } else {
            out[j] = out[j - 3] + 3.0 * h / 8.0 * (f[j - 3] + 3.0 * f[j - 2] + 3.0 * f[j - 1] + f[j]);
        }
    }
    return out;
}

}  // namespace

PicardResult duhamel_picard(const SpectralField& u0, double delta, int iterations, int nodes) {
    if (!(delta > 0.0)) throw std::invalid_argument("duhamel_picard: delta must be positive");
    if (iterations < 1 || nodes < 8 || nodes % 2 != 0)
        throw std::invalid_argument("duhamel_picard: need iterations >= 1 and even nodes >= 8");
    const double h = delta / nodes;
    const std::size_t nmodes = u0.coeffs.size();
    const auto sig = sigma_table(u0.grid);

    auto make_linear = [&]() {
        Trajectory tr;
        for (int i = 0; i <= nodes; ++i) {
            tr.times.push_back(h * i);
            tr.states.push_back(propagate_linear(u0, h * i));
        }
        return tr;
    };

    PicardResult res;
    res.iterates.push_back(make_linear());

    for (int it = 1; it < iterations; ++it) {
        const Trajectory& prev = res.iterates.back();
        // integrand in the interaction picture: e^{-i t sigma} N(u(t))
        std::vector<std::vector<cplx>> integrand(nmodes, std::vector<cplx>(nodes + 1));
        for (int i = 0; i <= nodes; ++i) {
            SpectralField n = nonlinear_rhs(prev.states[i], true);
            const double t = prev.times[i];
            for (std::size_t m = 0; m < nmodes; ++m)
                integrand[m][i] = std::polar(1.0, -t * sig[m]) * n.coeffs[m];
        }
        Trajectory next;
        next.times = prev.times;
        next.states.assign(nodes + 1, SpectralField(u0.grid));
        std::vector<std::vector<cplx>> cums(nmodes);
        for (std::size_t m = 0; m < nmodes; ++m) cums[m] = cumulative_integral(integrand[m], h);
        for (int i = 0; i <= nodes; ++i) {
            SpectralField& s = next.states[i];
            const double t = next.times[i];
            for (std::size_t m = 0; m < nmodes; ++m)
                s.coeffs[m] = std::polar(1.0, t * sig[m]) * (u0.coeffs[m] + cums[m][i]);
        }
        double dist = 0.0;
        for (int i = 0; i <= nodes; ++i) {
            SpectralField diff = next.states[i];
            for (std::size_t m = 0; m < nmodes; ++m) diff.coeffs[m] -= prev.states[i].coeffs[m];
            dist = std::max(dist, hs_norm(diff, 1.0));
        }
        res.h1_deltas.push_back(dist);
        res.iterates.push_back(std::move(next));
        if (!std::isfinite(dist) || dist > 1e8) {
            res.diverged = true;
            break;
        }
        if (res.h1_deltas.size() >= 2 &&
            dist > 4.0 * res.h1_deltas[res.h1_deltas.size() - 2] && dist > 1.0) {
            res.diverged = true;
            break;
        }
    }
    return res;
}

}  // namespace zkcyl
