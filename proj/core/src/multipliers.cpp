#include "zkcyl/multipliers.hpp"

#include <cmath>
#include <sstream>

#include "zkcyl/util.hpp"

namespace zkcyl {
namespace {

template <class Fn>
SpectralField map_modes(const SpectralField& f, Fn&& weight) {
    SpectralField out = f;
    for (int k = 0; k < f.grid.mx; ++k) {
        const double xi = f.grid.xi(k);
        for (int j = 0; j < f.grid.my; ++j)
            out.at(k, j) *= weight(xi, f.grid.qy(j));
    }
    return out;
}

template <class Fn>
SpaceTimeField map_space_modes(const SpaceTimeField& u, Fn&& weight) {
    SpaceTimeField out = u;
    for (int k = 0; k < u.grid.mx; ++k) {
        const double xi = u.grid.xi(k);
        for (int j = 0; j < u.grid.my; ++j) {
            const double w = weight(xi, u.grid.qy(j));
            for (int n = 0; n < u.mt; ++n) out.at(k, j, n) *= w;
        }
    }
    return out;
}

}  // namespace

void require_dyadic(double n, double least, const char* who) {
    int e = 0;
    const double mant = std::frexp(n, &e);
    if (n < least || mant != 0.5)
        throw std::invalid_argument(std::string(who) + ": scale " + fmt_double(n) +
                                    " must be a dyadic value >= " + fmt_double(least));
}

SpectralField project_pn(const SpectralField& f, double n) {
    require_dyadic(n, 1.0, "project_pn");
    return map_modes(f, [n](double xi, double q) { return phi_shell(weighted_mod(xi, q) / n); });
}

SpaceTimeField project_pn(const SpaceTimeField& u, double n) {
    require_dyadic(n, 1.0, "project_pn");
    return map_space_modes(u,
                           [n](double xi, double q) { return phi_shell(weighted_mod(xi, q) / n); });
}

SpaceTimeField project_ql(const SpaceTimeField& u, double l) {
    require_dyadic(l, 1.0, "project_ql");
    SpaceTimeField out = u;
    for (int k = 0; k < u.grid.mx; ++k) {
        const double xi = u.grid.xi(k);
        for (int j = 0; j < u.grid.my; ++j) {
            const double sig = dispersion(xi, u.grid.qy(j));
            for (int n = 0; n < u.mt; ++n)
                out.at(k, j, n) *= phi_shell((u.tau(n) - sig) / l);
        }
    }
    return out;
}

SpectralField restrict_rk(const SpectralField& f, double k) {
    require_dyadic(k, 1.0, "restrict_rk");
    return map_modes(f, [k](double xi, double) { return phi_shell(xi / k); });
}

SpaceTimeField restrict_rk(const SpaceTimeField& u, double k) {
    require_dyadic(k, 1.0, "restrict_rk");
    return map_space_modes(u, [k](double xi, double) { return phi_shell(xi / k); });
}

void IMultiplier::validate() const {
    require_dyadic(threshold, 2.0, "IMultiplier");
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("IMultiplier: s must lie in (0,1)");
}

SpectralField apply_i(const SpectralField& f, const IMultiplier& m) {
    return map_modes(f, [&m](double xi, double q) { return m.value(weighted_mod(xi, q)); });
}

SpaceTimeField apply_i(const SpaceTimeField& u, const IMultiplier& m) {
    return map_space_modes(u,
                           [&m](double xi, double q) { return m.value(weighted_mod(xi, q)); });
}

std::string multiplier_table_csv(const IMultiplier& m, const std::vector<double>& moduli) {
    std::ostringstream os;
    os << "modulus,m\n";
    for (double r : moduli) os << fmt_double(r) << ',' << fmt_double(m.value(r)) << '\n';
    return os.str();
}

SpectralField x_derivative(const SpectralField& f) {
    SpectralField out = f;
    for (int k = 0; k < f.grid.mx; ++k) {
        const cplx w{0.0, f.grid.xi(k)};
        for (int j = 0; j < f.grid.my; ++j) out.at(k, j) *= w;
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    return map_modes(f, [](double xi, double q) { return -(xi * xi + q * q); });
}

SpaceTimeField x_derivative(const SpaceTimeField& u) {
    SpaceTimeField out = u;
    for (int k = 0; k < u.grid.mx; ++k) {
        const cplx w{0.0, u.grid.xi(k)};
        for (int j = 0; j < u.grid.my; ++j)
            for (int n = 0; n < u.mt; ++n) out.at(k, j, n) *= w;
    }
    return out;
}

}  // namespace zkcyl
