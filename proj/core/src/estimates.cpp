#include "zkcyl/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "zkcyl/util.hpp"

namespace zkcyl {

namespace {

long long checked_gcd(long long a, long long b) {
    return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

}  // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) {
        den = 1;
        return;
    }
    const long long g = checked_gcd(num, den);
    num /= g;
    den /= g;
}

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(text), 1);
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("Rational: too many decimal digits");
    long long den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const long long whole = dot == 0 ? 0 : std::stoll(text.substr(0, dot));
    const bool neg = !text.empty() && text[0] == '-';
    const long long fpart = frac.empty() ? 0 : std::stoll(frac);
    const long long mag = (whole < 0 ? -whole : whole) * den + fpart;
    return Rational(neg ? -mag : mag, den);
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
    return Rational(num * o.den - o.num * den, den * o.den);
}
Rational Rational::operator*(const Rational& o) const { return Rational(num * o.num, den * o.den); }
Rational Rational::operator/(const Rational& o) const {
    if (o.num == 0) throw std::invalid_argument("Rational: division by zero");
    return Rational(num * o.den, den * o.num);
}
bool Rational::operator<(const Rational& o) const { return num * o.den < o.num * den; }

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::string GwpRecord::csv_header() {
    return "s,feasible,lambda_exponent,n_exponent,growth_exponent,n_of_t";
}

std::string GwpRecord::csv_row() const {
    std::ostringstream os;
    os << s.str() << ',' << (feasible ? 1 : 0) << ',' << lambda_exponent.str() << ','
       << (feasible ? n_exponent.str() : std::string("-")) << ','
       << (feasible ? growth_exponent.str() : std::string("-")) << ','
       << (feasible ? fmt_double(n_of_t) : std::string("-"));
    return os.str();
}

GwpRecord gwp_arithmetic(const Rational& s, double horizon) {
    const Rational zero(0, 1), one(1, 1);
    if (!(zero < s) || !(s < one))
        throw std::invalid_argument("gwp_arithmetic: s must lie in (0,1)");
    GwpRecord rec;
    rec.s = s;
    const Rational one_minus = one - s, one_plus = one + s;
    rec.lambda_exponent = one_minus / one_plus;
    // solvability of the interval count: 1/10 > 3(1-s)/(1+s)
    const Rational tenth(1, 10), three(3, 1), ten(10, 1);
    rec.feasible = three * one_minus / one_plus < tenth;
    // equivalent boundary form; both roads must agree
    const Rational boundary(29, 31);
    if (rec.feasible != (boundary < s))
        throw std::logic_error("gwp_arithmetic: feasibility forms disagree");
    if (!rec.feasible) return rec;
    const Rational denom = Rational(31, 1) * s - Rational(29, 1);
    rec.n_exponent = ten * one_plus / denom;
    rec.growth_exponent = ten * one_minus / denom;
    rec.n_of_t = std::pow(horizon, rec.n_exponent.value());
    return rec;
}

namespace {

struct GaussDraw {
    std::mt19937_64 eng;
    bool have_spare = false;
    double spare = 0.0;

    explicit GaussDraw(std::uint64_t seed) {
        std::uint64_t st = seed ^ 0x2545f4914f6cdd1dULL;
        eng.seed(splitmix64(st));
    }

    // Box-Muller on raw engine bits; bit-stable across standard libraries.
    double operator()() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        double u1 = uniform01(eng), u2 = uniform01(eng);
        while (u1 <= 1e-300) u1 = uniform01(eng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare = r * std::sin(two_pi * u2);
        have_spare = true;
        return r * std::cos(two_pi * u2);
    }
};

bool in_halfbox(const SpaceTimeField& u, int k, int j, int n) {
    return std::abs(u.grid.ks(k)) <= u.grid.mx / 4 && std::abs(u.grid.js(j)) <= u.grid.my / 4 &&
           std::abs(u.ns(n)) <= u.mt / 4;
}

// Assign conj-mirrored Gaussian coefficients to the lattice points accepted
// by `keep`, visiting sites in storage order so the draw sequence is a pure
// function of the seed.
template <class Keep, class Weight>
SpaceTimeField hermitian_fill(const GridSpec& g, int mt, double tspan, std::uint64_t seed,
                              Keep&& keep, Weight&& weight) {
    SpaceTimeField u(g, mt, tspan);
    GaussDraw draw(seed);
    const int mx = g.mx, my = g.my;
    for (int k = 0; k < mx; ++k) {
        for (int j = 0; j < my; ++j) {
            for (int n = 0; n < mt; ++n) {
                if (!keep(k, j, n)) continue;
                const int kp = (mx - k) % mx, jp = (my - j) % my, np = (mt - n) % mt;
                const std::size_t self = u.index(k, j, n), partner = u.index(kp, jp, np);
                if (self > partner) continue;  // mirrored when the partner is visited
                if (self == partner) continue; // kills the DC site; Nyquist sits outside the box
                const cplx val{draw(), draw()};
                u.coeffs[self] = weight(k, j, n) * val;
                u.coeffs[partner] = std::conj(u.coeffs[self]);
            }
        }
    }
    return u;
}

}  // namespace

DyadicSample make_dyadic(const GridSpec& g, int mt, double tspan, double n_band, double l_band,
                         std::uint64_t seed, std::optional<double> k_band) {
    require_dyadic(n_band, 1.0, "make_dyadic(n)");
    require_dyadic(l_band, 1.0, "make_dyadic(l)");
    if (k_band) require_dyadic(*k_band, 1.0, "make_dyadic(k)");
    DyadicSample out;
    out.n_band = n_band;
    out.l_band = l_band;
    out.k_band = k_band.value_or(0.0);
    out.seed = seed;
    out.field = hermitian_fill(
        g, mt, tspan, seed,
        [&](int k, int j, int n) {
            const double xi = g.xi(k), q = g.qy(j);
            const double wm = weighted_mod(xi, q);
            if (wm < n_band / 2 || wm > 2 * n_band) return false;
            const double tau = two_pi / tspan * (n < mt / 2 ? n : n - mt);
            const double mu = std::abs(tau - dispersion(xi, q));
            if (mu < l_band / 2 || mu > 2 * l_band) return false;
            if (k_band && (std::abs(xi) < *k_band / 2 || std::abs(xi) > 2 * *k_band)) return false;
            return std::abs(g.ks(k)) <= g.mx / 4 && std::abs(g.js(j)) <= g.my / 4 &&
                   std::abs(n < mt / 2 ? n : n - mt) <= mt / 4;
        },
        [](int, int, int) { return 1.0; });
    const double norm = st_l2_norm(out.field);
    if (norm == 0.0)
        throw std::invalid_argument("make_dyadic: the requested band is empty on this lattice");
    for (auto& c : out.field.coeffs) c /= norm;
    return out;
}

SpaceTimeField apply_time_window(const SpaceTimeField& u) {
    std::vector<double> samples = st_inverse(u, 1e-6);
    const int mt = u.mt;
    std::vector<double> w(mt);
    for (int n = 0; n < mt; ++n)
        w[n] = eta_bump(4.0 * u.tgrid(n) / u.tspan - 2.0);
    std::size_t idx = 0;
    for (int k = 0; k < u.grid.mx; ++k)
        for (int j = 0; j < u.grid.my; ++j)
            for (int n = 0; n < mt; ++n, ++idx) samples[idx] *= w[n];
    return st_forward(samples, u.grid, mt, u.tspan);
}

SpaceTimeField make_packet(const GridSpec& g, int mt, double tspan, double mod_decay,
                           double char_decay, std::uint64_t seed) {
    SpaceTimeField shape(g, mt, tspan);
    SpaceTimeField u = hermitian_fill(
        g, mt, tspan, seed,
        [&](int k, int j, int n) { return in_halfbox(shape, k, j, n) && !(k == 0 && j == 0 && n == 0); },
        [&](int k, int j, int n) {
            const double xi = g.xi(k), q = g.qy(j);
            const double mu = shape.tau(n) - dispersion(xi, q);
            return std::pow(jbracket(weighted_mod(xi, q)), -mod_decay) *
                   std::pow(jbracket(mu), -char_decay);
        });
    const double norm = st_l2_norm(u);
    if (norm == 0.0) throw std::invalid_argument("make_packet: empty half box");
    for (auto& c : u.coeffs) c /= norm;
    return u;
}

std::string RatioReport::csv_header() {
    return "estimate_id,N1,N2,L1,L2,K,theta,eps,seed,lhs,rhs,ratio,converged";
}

std::string RatioReport::csv_row() const {
    std::ostringstream os;
    os << estimate_id << ',' << fmt_double(n1) << ',' << fmt_double(n2) << ',' << fmt_double(l1)
       << ',' << fmt_double(l2) << ',' << fmt_double(k) << ',' << fmt_double(theta) << ','
       << fmt_double(eps) << ',' << seed << ',' << fmt_double(lhs) << ',' << fmt_double(rhs)
       << ',' << fmt_double(ratio) << ',' << (converged ? 1 : 0);
    return os.str();
}

namespace {

RatioReport envelope_ratio(const SpaceTimeField& prod, const std::string& id,
                           const DyadicSample& u, const DyadicSample& v, double theta,
                           std::optional<double> k_out) {
    const double nmin = std::min(u.n_band, v.n_band), nmax = std::max(u.n_band, v.n_band);
    const double lmin = std::min(u.l_band, v.l_band), lmax = std::max(u.l_band, v.l_band);
    RatioReport rep;
    rep.estimate_id = id;
    rep.n1 = u.n_band;
    rep.n2 = v.n_band;
    rep.l1 = u.l_band;
    rep.l2 = v.l_band;
    rep.theta = theta;
    rep.seed = u.seed;
    if (id == "b1") {
        rep.lhs = st_l2_norm(prod);
        rep.rhs = nmin * std::sqrt(lmin);
    } else if (id == "b2") {
        if (nmax < 4.0 * nmin)
            throw std::invalid_argument("probe_bilinear: b2 needs separated bands (ratio >= 4)");
        rep.lhs = st_l2_norm(prod);
        rep.rhs = std::sqrt(nmin) / nmax * std::sqrt(lmin * lmax);
    } else if (id == "b3") {
        if (!k_out) throw std::invalid_argument("probe_bilinear: b3 needs the output K band");
        rep.k = *k_out;
        rep.lhs = st_l2_norm(restrict_rk(prod, *k_out));
        rep.rhs = std::sqrt(nmin) * std::pow(*k_out, -0.25) * std::sqrt(lmin) *
                  std::pow(lmax, 0.25);
    } else if (id == "b4") {
        if (!(theta > 0.0 && theta < 1.0))
            throw std::invalid_argument("probe_bilinear: b4 needs theta in (0,1)");
        if (nmax < 4.0 * nmin)
            throw std::invalid_argument("probe_bilinear: b4 needs separated bands (ratio >= 4)");
        rep.lhs = st_l2_norm(prod);
        rep.rhs = std::pow(nmin, 0.5 * (1.0 + theta)) * std::pow(nmax, theta - 1.0) *
                  std::sqrt(lmin) * std::pow(lmax, 0.5 * theta);
    } else {
        throw std::invalid_argument("probe_bilinear: unknown estimate id " + id);
    }
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

}  // namespace

RatioReport probe_bilinear(const std::string& id, const DyadicSample& u, const DyadicSample& v,
                           double theta, std::optional<double> k_out) {
    if (!u.field.same_shape(v.field))
        throw std::invalid_argument("probe_bilinear: sample shapes differ");
    const SpaceTimeField prod = st_product(u.field, v.field);
    return envelope_ratio(prod, id, u, v, theta, k_out);
}

std::vector<RatioReport> probe_bilinear_batch(const DyadicSample& u, const DyadicSample& v,
                                              const std::vector<std::string>& ids, double theta,
                                              std::optional<double> k_out) {
    if (!u.field.same_shape(v.field))
        throw std::invalid_argument("probe_bilinear: sample shapes differ");
    const SpaceTimeField prod = st_product(u.field, v.field);
    std::vector<RatioReport> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(envelope_ratio(prod, id, u, v, theta, k_out));
    return out;
}

namespace {

SpaceTimeField commutator_field(const SpaceTimeField& u, const SpaceTimeField& v,
                                const IMultiplier& m) {
    const SpaceTimeField iu = apply_i(u, m), iv = apply_i(v, m);
    SpaceTimeField d = st_product(iu, iv);
    const SpaceTimeField isq = apply_i(st_product(u, v), m);
    for (std::size_t i = 0; i < d.coeffs.size(); ++i) d.coeffs[i] -= isq.coeffs[i];
    return d;
}

}  // namespace

CommutatorProbe probe_commutator(const SpaceTimeField& u, const SpaceTimeField& v,
                                 const IMultiplier& m, double eps) {
    if (!u.same_shape(v)) throw std::invalid_argument("probe_commutator: shape mismatch");
    if (!(eps > 0.0 && eps < 0.25)) throw std::invalid_argument("probe_commutator: eps in (0,1/4)");
    const double lhs = xsb_norm(x_derivative(commutator_field(u, v, m)), 1.0, -0.5 + eps);
    const double nu = xsb_norm(apply_i(u, m), 1.0, 0.5 + eps);
    const double nv = xsb_norm(apply_i(v, m), 1.0, 0.5 + eps);
    CommutatorProbe out;
    out.gain.estimate_id = "commutator";
    out.gain.n1 = m.threshold;
    out.gain.eps = eps;
    out.gain.lhs = lhs;
    out.gain.rhs = std::pow(m.threshold, -0.1 + eps) * nu * nv;
    out.gain.ratio = out.gain.rhs > 0.0 ? lhs / out.gain.rhs : 0.0;
    out.baseline = out.gain;
    out.baseline.estimate_id = "commutator_baseline";
    out.baseline.rhs = nu * nv;
    out.baseline.ratio = out.baseline.rhs > 0.0 ? lhs / out.baseline.rhs : 0.0;
    return out;
}

CommutatorProbe probe_quartic(const SpaceTimeField& u, const IMultiplier& m, double eps) {
    if (!(eps > 0.0 && eps < 0.25)) throw std::invalid_argument("probe_quartic: eps in (0,1/4)");
    const SpaceTimeField iu = apply_i(u, m);
    SpaceTimeField d = st_product(iu, iu);
    const SpaceTimeField isq = apply_i(st_product(u, u), m);
    for (std::size_t i = 0; i < d.coeffs.size(); ++i) d.coeffs[i] -= isq.coeffs[i];
    const double lhs = std::abs(st_inner(isq, x_derivative(d)));
    const double niu = xsb_norm(iu, 1.0, 0.5 + eps);
    CommutatorProbe out;
    out.gain.estimate_id = "quartic";
    out.gain.n1 = m.threshold;
    out.gain.eps = eps;
    out.gain.lhs = lhs;
    out.gain.rhs = std::pow(m.threshold, -0.1 + eps) * std::pow(niu, 4.0);
    out.gain.ratio = out.gain.rhs > 0.0 ? lhs / out.gain.rhs : 0.0;
    out.baseline = out.gain;
    out.baseline.estimate_id = "quartic_baseline";
    out.baseline.rhs = std::pow(niu, 4.0);
    out.baseline.ratio = out.baseline.rhs > 0.0 ? lhs / out.baseline.rhs : 0.0;
    return out;
}

SpectralField rescale(const SpectralField& u0, double lam) {
    require_dyadic(lam, 1.0, "rescale");
    SpectralField out = u0;
    out.grid.Lambda *= lam;
    out.grid.lambda *= lam;
    out.grid.dt *= lam * lam * lam;
    return out;
}

double l2_norm_alt(const SpectralField& f) { return l2_norm(f) * std::sqrt(two_pi); }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("loglog_slope: need matching series with >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace zkcyl
