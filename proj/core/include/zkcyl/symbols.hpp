#pragma once

#include <functional>
#include <string>

#include "zkcyl/transform.hpp"

namespace zkcyl {

// A point of the frequency lattice R x (Z/lambda).
struct Frequency {
    double xi = 0.0;
    double q = 0.0;
};

inline double weighted_mod2(const Frequency& z) { return weighted_mod2(z.xi, z.q); }
inline double weighted_mod(const Frequency& z) { return weighted_mod(z.xi, z.q); }

// Dispersion relation of the linear flow: sigma(xi,q) = xi^3 + xi q^2.
inline double dispersion(double xi, double q) { return xi * xi * xi + xi * q * q; }
inline double dispersion(const Frequency& z) { return dispersion(z.xi, z.q); }

// Resonance of a pair interaction, sigma(z1+z2) - sigma(z1) - sigma(z2),
// in the cancellation-free expanded form.
inline double resonance(double xi1, double xi2, double q1, double q2) {
    return 3.0 * xi1 * xi2 * (xi1 + xi2) + xi2 * q1 * q1 + xi1 * q2 * q2 +
           2.0 * (xi1 + xi2) * q1 * q2;
}

// Signed first xi1-derivative scale of the resonance at (xi1, xi-xi1, q1, q-q1):
// returns 3 xi1^2 + q1^2 - 3 (xi-xi1)^2 - (q-q1)^2, which equals
// weighted_mod2(xi1,q1) - weighted_mod2(xi-xi1,q-q1) identically and matches
// |d resonance / d xi1| in absolute value.
inline double resonance_d1(double xi1, double xi, double q1, double q) {
    return weighted_mod2(xi1, q1) - weighted_mod2(xi - xi1, q - q1);
}

// Second xi1-derivative scale; |result| = 6|xi|.
inline double resonance_d2(double xi) { return 6.0 * xi; }

// One row of counting evidence: how many lattice points q in Z/lambda
// satisfy a q^2 + b q + c in [lo, hi], against the bound
// 4 lambda (sqrt(|I|/|a|) + 1).
struct CountReport {
    double a = 0.0, b = 0.0, c = 0.0;
    double lo = 0.0, hi = 0.0;
    double lambda = 1.0;
    long long count = 0;
    double bound = 0.0;

    static std::string csv_header();
    std::string csv_row() const;
};

// Largest |q| the preimage {a q^2 + b q + c in [lo,hi]} can reach, from the
// parabola's roots; any enumeration window at least this wide is conclusive.
double parabola_window(double a, double b, double c, double lo, double hi);

// Exact enumeration of {q in Z/lambda : a q^2 + b q + c in [lo,hi]}.  qmax is
// the enumeration window |q| <= qmax; it must contain the analytic preimage
// (checked from the parabola's roots) or the count would be inconclusive and
// the call throws.  Requires a != 0 and lo <= hi.
CountReport count_parabola(double a, double b, double c, double lo, double hi, double lambda,
                           double qmax);

// Counting for graph-like strip sets over the product of an x-cell window and
// the q lattice: rows are indexed by q = n/lambda inside [qlo, qhi], columns
// by cell in [0, xcells).  Every row must contain at most max_per_row true
// cells (throws otherwise), and the returned total respects
// lambda * max_per_row * (|qhi-qlo| + 1).
long long count_graph_set(const std::function<bool(int cell, double q)>& member, int xcells,
                          double qlo, double qhi, double lambda, int max_per_row);

// Measure of {x in [jlo,jhi] : f(x) in [lo,hi]} by uniform sampling with
// refinement until two consecutive resolutions agree.  dmin must lower-bound
// inf |f'| on the interval; the result is checked against 2 |hi-lo| / dmin.
// Throws if the sampling never settles.
double preimage_measure(const std::function<double(double)>& f, double jlo, double jhi, double lo,
                        double hi, double dmin);

}  // namespace zkcyl
