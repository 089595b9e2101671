#pragma once

#include <string>

#include "zkcyl/dynamics.hpp"

namespace zkcyl {

// ∫ u^2 dx dy, evaluated spectrally.
double mass(const SpectralField& f);

// E[u] = (1/2) ∫ |∇u|^2 - (1/3) u^3 dx dy.  The gradient symbol is the
// Euclidean xi^2 + q^2; the cubic term pairs the alias-free square against u,
// which is an exact trigonometric quadrature for every stored mode.
double energy(const SpectralField& f);

// E[Iu].
double modified_energy(const SpectralField& f, const IMultiplier& m);

// The two terms of d/dt E[Iu] along the flow, with D = (Iu)^2 - I(u^2):
//   cubic   = -(1/2) ∫ (Delta I u) d_x D
//   quartic = -(1/4) ∫ I(u^2) d_x D
// Both vanish identically when the multiplier acts as the identity on the
// whole field (D = 0).
struct IncrementTerms {
    double cubic = 0.0;
    double quartic = 0.0;
    double total() const { return cubic + quartic; }
};

IncrementTerms increment_terms(const SpectralField& f, const IMultiplier& m);
double increment_integrand(const SpectralField& f, const IMultiplier& m);

// Time series of the tracked functionals along a trajectory plus the check
// that the quadrature of the increment integrand reproduces the change of the
// modified energy.
struct EnergyLedger {
    std::vector<double> t, mass_series, energy_series, modified_series;
    std::vector<double> inc3, inc4;              // increment terms at each time
    std::vector<double> cumulative_quadrature;   // Simpson prefix integral of inc3+inc4
    std::vector<double> mismatch;                // |ΔE[Iu] - prefix integral|

    // Same final-time quadrature evaluated on every other snapshot; the gap
    // to `mismatch.back()` exposes the quadrature convergence order.
    double final_mismatch_coarse = 0.0;

    static std::string csv_header();
    std::string csv() const;
};

// Requires an odd number of snapshots at uniform spacing (composite Simpson);
// throws if the spacing is not uniform.
EnergyLedger increment_check(const Trajectory& traj, const IMultiplier& m);

// Space-time norm with weights <|(xi,q)|_w>^s <tau - sigma(xi,q)>^b.
// Requires s in [-2,3], b in [-1,1].
double xsb_norm(const SpaceTimeField& u, double s, double b);

}  // namespace zkcyl
