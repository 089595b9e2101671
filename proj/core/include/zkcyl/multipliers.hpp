#pragma once

#include <string>
#include <vector>

#include "zkcyl/symbols.hpp"

namespace zkcyl {

// C^1 bump: 1 on [-1,1], raised cosine on 1 <= |x| <= 2, 0 beyond.  This is
// the concrete representative of the cutoff class used by every projection;
// nothing downstream depends on more smoothness than C^1.
inline double eta_bump(double x) {
    const double a = std::abs(x);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (a - 1.0));
    return c * c;
}

// Dyadic shell profile phi = eta(x) - eta(2x), supported on 1/2 <= |x| <= 2.
// Shells phi(x/N), N = 1,2,4,... telescope to 1 - eta(2x).
inline double phi_shell(double x) { return eta_bump(x) - eta_bump(2.0 * x); }

// Throws unless N is a power of two and N >= least.
void require_dyadic(double n, double least, const char* who);

// Frequency shell |(xi,q)|_w ~ N.
SpectralField project_pn(const SpectralField& f, double n);
SpaceTimeField project_pn(const SpaceTimeField& u, double n);

// Modulation shell |tau - sigma(xi,q)| ~ L.
SpaceTimeField project_ql(const SpaceTimeField& u, double l);

// x-frequency shell |xi| ~ K.
SpectralField restrict_rk(const SpectralField& f, double k);
SpaceTimeField restrict_rk(const SpaceTimeField& u, double k);

// Smoothing multiplier of strength 1-s below scale N: m(r) = 1 for r <= N and
// (r/N)^(s-1) beyond, evaluated at the weighted modulus.  The branch keeps
// m == 1.0 exact on low modes, which tests rely on.
struct IMultiplier {
    double threshold = 2.0;  // N, dyadic, >= 2
    double s = 0.5;          // regularity, in (0,1)

    IMultiplier(double n, double s_) : threshold(n), s(s_) { validate(); }
    void validate() const;

    double value(double r) const {
        return r <= threshold ? 1.0 : std::pow(r / threshold, s - 1.0);
    }
};

SpectralField apply_i(const SpectralField& f, const IMultiplier& m);
SpaceTimeField apply_i(const SpaceTimeField& u, const IMultiplier& m);

// "modulus,m" rows over the given sample points.
std::string multiplier_table_csv(const IMultiplier& m, const std::vector<double>& moduli);

// Pointwise frequency-symbol application helpers shared by the dynamics and
// the functionals.
SpectralField x_derivative(const SpectralField& f);              // * i xi
SpectralField laplacian(const SpectralField& f);                 // * -(xi^2 + q^2)
SpaceTimeField x_derivative(const SpaceTimeField& u);

}  // namespace zkcyl
