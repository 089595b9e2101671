#include "zkcyl/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zkcyl/util.hpp"

namespace zkcyl {

std::string CountReport::csv_header() { return "a,b,c,lo,hi,lambda,count,bound"; }

std::string CountReport::csv_row() const {
    std::ostringstream os;
    os << fmt_double(a) << ',' << fmt_double(b) << ',' << fmt_double(c) << ',' << fmt_double(lo)
       << ',' << fmt_double(hi) << ',' << fmt_double(lambda) << ',' << count << ','
       << fmt_double(bound);
    return os.str();
}

// Largest |q| over the solutions of a q^2 + b q + c = y for y in {lo, hi}.
// The preimage of [lo,hi] under the parabola is bounded by those roots.
double parabola_window(double a, double b, double c, double lo, double hi) {
    double reach = 0.0;
    for (double y : {lo, hi}) {
        const double disc = b * b - 4.0 * a * (c - y);
        if (disc < 0.0) continue;
        const double r = std::sqrt(disc);
        reach = std::max({reach, std::abs((-b + r) / (2.0 * a)), std::abs((-b - r) / (2.0 * a))});
    }
    return reach;
}

CountReport count_parabola(double a, double b, double c, double lo, double hi, double lambda,
                           double qmax) {
    if (a == 0.0) throw std::invalid_argument("count_parabola: a must be nonzero");
    if (lo > hi) throw std::invalid_argument("count_parabola: empty interval");
    if (!(lambda >= 1.0)) throw std::invalid_argument("count_parabola: lambda must be >= 1");
    const double reach = parabola_window(a, b, c, lo, hi);
    if (qmax < reach)
        throw std::invalid_argument(
            "count_parabola: enumeration window |q| <= " + fmt_double(qmax) +
            " cannot be conclusive, preimage reaches |q| = " + fmt_double(reach));
    CountReport rep;
    rep.a = a;
    rep.b = b;
    rep.c = c;
    rep.lo = lo;
    rep.hi = hi;
    rep.lambda = lambda;
    const long long nmax = static_cast<long long>(std::floor(qmax * lambda)) + 1;
    for (long long n = -nmax; n <= nmax; ++n) {
        const double q = static_cast<double>(n) / lambda;
        const double val = (a * q + b) * q + c;
        if (val >= lo && val <= hi) ++rep.count;
    }
    rep.bound = 4.0 * lambda * (std::sqrt((hi - lo) / std::abs(a)) + 1.0);
    return rep;
}

long long count_graph_set(const std::function<bool(int cell, double q)>& member, int xcells,
                          double qlo, double qhi, double lambda, int max_per_row) {
    if (xcells < 0) throw std::invalid_argument("count_graph_set: negative window");
    if (qlo > qhi) throw std::invalid_argument("count_graph_set: empty q interval");
    if (!(lambda >= 1.0)) throw std::invalid_argument("count_graph_set: lambda must be >= 1");
    long long total = 0;
    const long long nlo = static_cast<long long>(std::ceil(qlo * lambda));
    const long long nhi = static_cast<long long>(std::floor(qhi * lambda));
    for (long long n = nlo; n <= nhi; ++n) {
        const double q = static_cast<double>(n) / lambda;
        int row = 0;
        for (int cell = 0; cell < xcells; ++cell)
            if (member(cell, q)) ++row;
        if (row > max_per_row)
            throw std::runtime_error("count_graph_set: row at q = " + fmt_double(q) +
                                     " holds " + std::to_string(row) +
                                     " cells, exceeding the per-row cap");
        total += row;
    }
    const double bound = lambda * max_per_row * ((qhi - qlo) + 1.0);
    if (static_cast<double>(total) > bound)
        throw std::logic_error("count_graph_set: total exceeds lambda*C*(|I|+1)");
    return total;
}

double preimage_measure(const std::function<double(double)>& f, double jlo, double jhi, double lo,
                        double hi, double dmin) {
    if (jlo >= jhi) throw std::invalid_argument("preimage_measure: empty domain interval");
    if (lo > hi) throw std::invalid_argument("preimage_measure: empty target interval");
    if (!(dmin > 0.0)) throw std::invalid_argument("preimage_measure: dmin must be positive");
    const double span = jhi - jlo;
    auto measure_at = [&](std::size_t n) {
        const double h = span / static_cast<double>(n);
        long long inside = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = jlo + h * (static_cast<double>(i) + 0.5);
            const double val = f(x);
            if (val >= lo && val <= hi) ++inside;
        }
        return h * static_cast<double>(inside);
    };
    const double bound = 2.0 * (hi - lo) / dmin;
    double prev = measure_at(4096);
    for (std::size_t n = 8192; n <= (1u << 22); n *= 2) {
        const double cur = measure_at(n);
        // a monotone f crosses each target boundary once, so the midpoint
        // estimate settles to within a couple of cells
        if (std::abs(cur - prev) <= std::max(1e-3 * bound, 4.0 * span / static_cast<double>(n))) {
            if (cur > bound)
                throw std::logic_error("preimage_measure: measure exceeds 2|I|/dmin");
            return cur;
        }
        prev = cur;
    }
    throw std::runtime_error("preimage_measure: sampling resolution insufficient to converge");
}

}  // namespace zkcyl
