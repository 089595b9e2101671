#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "zkcyl/functionals.hpp"

namespace zkcyl {

// Exact rational arithmetic for the endpoint bookkeeping; the feasibility
// boundary lives at s = 29/31 and floating point must not blur it.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);
    static Rational parse(const std::string& text);  // "19/20", "0.95", "3"

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const;
    bool operator>(const Rational& o) const { return o < *this; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

// Scaling and iteration-count arithmetic of the almost-conservation argument:
//   lambda ~ N^{(1-s)/(1+s)},   N ~ T^{10(1+s)/(31s-29)},
//   sup_{[0,T]} H^s growth exponent 10(1-s)/(31s-29),
// feasible exactly when 1/10 > 3(1-s)/(1+s), i.e. s > 29/31.
struct GwpRecord {
    Rational s;
    bool feasible = false;
    Rational lambda_exponent;   // lambda as a power of N
    Rational n_exponent;        // N as a power of T (feasible case only)
    Rational growth_exponent;   // sup-norm growth as a power of T
    double n_of_t = 0.0;        // numeric N for the given horizon
    std::string csv_row() const;
    static std::string csv_header();
};

// Requires 0 < s < 1; infeasible s (<= 29/31) is reported, not an error.
GwpRecord gwp_arithmetic(const Rational& s, double horizon);

// A unit-norm random real space-time field supported on
//   |(xi,q)|_w in [n/2, 2n],  |tau - sigma(xi,q)| in [l/2, 2l],
// and |xi| in [k/2, 2k] when k_band is set, intersected with the half box
// |k| <= mx/4, |j| <= my/4, |n| <= mt/4 (so that products of two samples are
// exactly representable on the stored lattice).  Deterministic per seed.
struct DyadicSample {
    SpaceTimeField field;
    double n_band = 1.0;
    double l_band = 1.0;
    double k_band = 0.0;      // 0 = unrestricted
    std::uint64_t seed = 0;
};

DyadicSample make_dyadic(const GridSpec& g, int mt, double tspan, double n_band, double l_band,
                         std::uint64_t seed, std::optional<double> k_band = std::nullopt);

// Smooth unit-plateau window over the time period, 1 on the middle half.
SpaceTimeField apply_time_window(const SpaceTimeField& u);

// Random real space-time field with polynomial decay in the weighted modulus
// and in the distance to the characteristic tau = sigma(xi,q); supported in
// the half box.  Used by the commutator and quartic probes.
SpaceTimeField make_packet(const GridSpec& g, int mt, double tspan, double mod_decay,
                           double char_decay, std::uint64_t seed);

struct RatioReport {
    std::string estimate_id;
    double n1 = 0, n2 = 0, l1 = 0, l2 = 0, k = 0, theta = 0, eps = 0;
    std::uint64_t seed = 0;
    double lhs = 0, rhs = 0, ratio = 0;
    bool converged = true;
    static std::string csv_header();
    std::string csv_row() const;
};

// Product-norm probes.  id selects the envelope:
//   b1: (N1^N2) (L1^L2)^{1/2}                          of || u v ||_L2
//   b2: (Nmin)^{1/2} Nmax^{-1} (Lmin Lmax)^{1/2}       needs Nmax/Nmin >= 4
//   b3: (Nmin)^{1/2} K^{-1/4} Lmin^{1/2} Lmax^{1/4}    of || R_K(u v) ||_L2
//   b4: Nmin^{(1+th)/2} Nmax^{-(1-th)} Lmin^{1/2} Lmax^{th/2},  0 < th < 1,
//       needs Nmax/Nmin >= 4
// Samples carry unit space-time L2 norm, so the right side is the envelope.
RatioReport probe_bilinear(const std::string& id, const DyadicSample& u, const DyadicSample& v,
                           double theta = 0.0, std::optional<double> k_out = std::nullopt);

// Same probes sharing one product transform; one report per id, in order.
std::vector<RatioReport> probe_bilinear_batch(const DyadicSample& u, const DyadicSample& v,
                                              const std::vector<std::string>& ids, double theta,
                                              std::optional<double> k_out = std::nullopt);

struct CommutatorProbe {
    RatioReport gain;      // rhs carries the N^{-1/10+eps} factor
    RatioReport baseline;  // rhs without it
};

// lhs = || d_x (Iu Iv - I(uv)) ||_{X^{1,-1/2+eps}} against
// N^{-1/10+eps} ||Iu||_{X^{1,1/2+eps}} ||Iv||_{X^{1,1/2+eps}}.  Inputs are
// expected time-windowed.
CommutatorProbe probe_commutator(const SpaceTimeField& u, const SpaceTimeField& v,
                                 const IMultiplier& m, double eps);

// lhs = | ∫∫∫ I(u^2) d_x ((Iu)^2 - I(u^2)) | against
// N^{-1/10+eps} ||Iu||_{X^{1,1/2+eps}}^4.
CommutatorProbe probe_quartic(const SpaceTimeField& u, const IMultiplier& m, double eps);

// u^lam(x,y) = lam^{-2} u(x/lam, y/lam) realized as an exact coefficient copy
// onto the grid with Lambda, lambda (and dt) scaled; requires lam >= 1 dyadic.
SpectralField rescale(const SpectralField& u0, double lam);

// L2 under the alternative spectral measure 1/(2π Lambda lambda) per mode
// (one power of 2π); differs from l2_norm by the constant sqrt(2π).
double l2_norm_alt(const SpectralField& f);

// Least-squares slope of log(y) against log(x); the exponent reported next to
// dyadic sweeps.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace zkcyl
