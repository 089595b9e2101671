#pragma once

#include "zkcyl/grid.hpp"

namespace zkcyl {

// Normalization table.  Every transform, norm, and product in the library is
// derived from this one convention; nothing else introduces 2π factors.
//
//   forward:   F(xi_k, q_j) = dx dy Σ_{i,m} f(x_i, y_m) e^{-i(x_i xi_k + y_m q_j)}
//              (trapezoid quadrature of the analytic transform; exact for
//              band-limited f)
//   inverse:   f(x_i, y_m) = nu Σ_{k,j} F(xi_k, q_j) e^{+i(...)}
//              with nu = spectral_measure = 1 / ((2π)^2 Lambda lambda)
//   round trip: dx dy · nu · mx my = 1, so inverse(forward(f)) = f exactly
//   Parseval:  ∫∫ f g dx dy = nu Σ F conj(G);  hs_norm(F, 0) = || f ||_L2
//   products:  transform(f·g) = nu (F ⊛ G), lattice convolution sum
//   space-time: one more periodic direction of period tspan appends a factor
//              1/tspan to the measure and dt' = tspan/mt to the quadrature.
double spectral_measure(const GridSpec& g);   // nu above
double quad_weight(const GridSpec& g);        // dx dy
double st_spectral_measure(const SpaceTimeField& u);
double st_quad_weight(const SpaceTimeField& u);

// sqrt(3 xi^2 + q^2): the modulus adapted to the symbol xi^3 + xi q^2.  Used
// by every norm weight and dyadic band in the library.
inline double weighted_mod2(double xi, double q) { return 3.0 * xi * xi + q * q; }
inline double weighted_mod(double xi, double q) { return std::sqrt(weighted_mod2(xi, q)); }
inline double jbracket(double x) { return 1.0 + std::abs(x); }

SpectralField forward(const PhysicalField& f);

// Fails on inputs that are not Hermitian-symmetric within tol (relative to the
// largest coefficient); the payload of a real field must round-trip to real.
PhysicalField inverse(const SpectralField& f, double herm_tol = 1e-9);

// Largest Hermitian-symmetry defect, relative to max |coeff|.
double hermitian_defect(const SpectralField& f);
void enforce_hermitian(SpectralField& f);

// Sobolev norm with weight <|(xi,q)|>^s built on the weighted modulus.
// Requires s in [-2, 3].
double hs_norm(const SpectralField& f, double s);
double l2_norm(const SpectralField& f);

// ∫∫ f g dx dy for real fields, evaluated spectrally (exact Parseval).
double inner_l2(const SpectralField& f, const SpectralField& g);

// Physical-space quadrature Σ f g dx dy; the independent route used by tests.
double inner_quadrature(const PhysicalField& f, const PhysicalField& g);

// Transform of the pointwise product f·g, computed alias-free on a 3/2
// zero-padded grid and truncated back to the stored window.  Identical to the
// lattice convolution nu Σ F(ζ-ζ') G(ζ') on the retained modes.
SpectralField convolve(const SpectralField& f, const SpectralField& g);

// In-place 2D DFT over the space dimensions of each time slice is not needed;
// space-time fields transform as one 3D lattice.
// Physical samples u(x_i, y_j, t_n) of a space-time field, row-major (x, y, t).
std::vector<double> st_inverse(const SpaceTimeField& u, double herm_tol = 1e-9);
SpaceTimeField st_forward(const std::vector<double>& samples, const GridSpec& g, int mt,
                          double tspan);

// Pointwise product of two real space-time fields on the collocation grid,
// transformed back without padding.  Exact for inputs supported in the half
// band |k| <= mx/4, |j| <= my/4, |n| <= mt/4; estimate probes construct their
// samples inside that box.
SpaceTimeField st_product(const SpaceTimeField& u, const SpaceTimeField& v);

double st_l2_norm(const SpaceTimeField& u);
double st_inner(const SpaceTimeField& u, const SpaceTimeField& v);
double st_hermitian_defect(const SpaceTimeField& u);

}  // namespace zkcyl
