#pragma once

#include <optional>
#include <vector>

#include "zkcyl/multipliers.hpp"

namespace zkcyl {

// The evolution solved here is u_t + u_xxx + u_xyy + u u_x = 0, i.e.
// coefficient-wise dU/dt = i sigma(xi,q) U - (1/2) i xi transform(u^2).

struct BlowupError : std::runtime_error {
    double t;
    explicit BlowupError(double t_)
        : std::runtime_error("evolution lost finiteness at t = " + std::to_string(t_)), t(t_) {}
};

enum class Scheme { strang, etdrk4 };

struct IntegratorConfig {
    Scheme scheme = Scheme::etdrk4;
    double dt = 1e-3;
    bool dealias = true;
    double tend = 1.0;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be positive");
        if (!(tend > 0.0)) throw std::invalid_argument("IntegratorConfig: tend must be positive");
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
};

// Exact linear flow: coefficients pick up the phase e^{i t sigma(xi,q)}.
SpectralField propagate_linear(const SpectralField& f, double t);

// -(1/2) i xi transform(u^2); the square is alias-free when dealias is set.
SpectralField nonlinear_rhs(const SpectralField& f, bool dealias = true);

// One step of the configured scheme.  Strang: exact half phase, RK4 on the
// nonlinear part, exact half phase.  ETDRK4: Cox-Matthews coefficients with
// phi-functions evaluated by contour averaging around each i*sigma*dt.
SpectralField step(const SpectralField& f, const IntegratorConfig& cfg);

// March to tend (which must be an integer number of steps), storing every
// snap_every-th state plus the endpoints.  Throws BlowupError on NaN/Inf.
Trajectory evolve(const SpectralField& f0, const IntegratorConfig& cfg, int snap_every = 1);

struct PicardResult {
    // iterate k holds the k-th Duhamel iterate sampled on the quadrature
    // nodes; iterate 0 is the linear solution.
    std::vector<Trajectory> iterates;
    // sup-in-time H1 distance between consecutive iterates
    std::vector<double> h1_deltas;
    bool diverged = false;
};

// Picard iteration of the integral form
//   u(t) = e^{t S} u0 + ∫_0^t e^{(t-t') S} (-(1/2)) d_x(u(t')^2) dt',  S = linear flow,
// on [0, delta] with a fourth-order cumulative quadrature over `nodes`
// uniform intervals.  Divergence is reported, not fatal.
PicardResult duhamel_picard(const SpectralField& u0, double delta, int iterations,
                            int nodes = 64);

}  // namespace zkcyl
