#include "zkcyl/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "zkcyl/util.hpp"

namespace zkcyl {
namespace {

// One cached in-place c2c plan per lattice shape and sign.  FFTW's planner is
// not thread safe, so creation is serialized; execution through the new-array
// interface is re-entrant.  Plans are created FFTW_UNALIGNED so they can run
// on std::vector storage.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    void run2d(cplx* data, int nx, int ny, int sign) {
        fftw_plan p = get({nx, ny, 0, sign});
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

    void run3d(cplx* data, int nx, int ny, int nz, int sign) {
        fftw_plan p = get({nx, ny, nz, sign});
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

  private:
    using Key = std::tuple<int, int, int, int>;

    fftw_plan get(const Key& key) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        auto [nx, ny, nz, sign] = key;
        std::size_t n = static_cast<std::size_t>(nx) * ny * (nz ? nz : 1);
        fftw_complex* scratch = fftw_alloc_complex(n);
        fftw_plan p = nz ? fftw_plan_dft_3d(nx, ny, nz, scratch, scratch, sign,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED)
                         : fftw_plan_dft_2d(nx, ny, scratch, scratch, sign,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        plans_.emplace(key, p);
        return p;
    }

    std::mutex mu_;
    std::map<Key, fftw_plan> plans_;
};

}  // namespace

double spectral_measure(const GridSpec& g) {
    return 1.0 / (two_pi * two_pi * g.Lambda * g.lambda);
}

double quad_weight(const GridSpec& g) { return g.dx() * g.dy(); }

double st_spectral_measure(const SpaceTimeField& u) {
    return spectral_measure(u.grid) / u.tspan;
}

double st_quad_weight(const SpaceTimeField& u) {
    return quad_weight(u.grid) * (u.tspan / u.mt);
}

SpectralField forward(const PhysicalField& f) {
    f.grid.validate();
    SpectralField out(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.coeffs[i] = f.values[i];
    PlanCache::instance().run2d(out.coeffs.data(), f.grid.mx, f.grid.my, FFTW_FORWARD);
    const double w = quad_weight(f.grid);
    for (auto& c : out.coeffs) c *= w;
    return out;
}

double hermitian_defect(const SpectralField& f) {
    const int mx = f.grid.mx, my = f.grid.my;
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < mx; ++k) {
        for (int j = 0; j < my; ++j) {
            const cplx a = f.at(k, j);
            const cplx b = f.at((mx - k) % mx, (my - j) % my);
            worst = std::max(worst, std::abs(a - std::conj(b)));
            scale = std::max(scale, std::abs(a));
        }
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

void enforce_hermitian(SpectralField& f) {
    const int mx = f.grid.mx, my = f.grid.my;
    for (int k = 0; k < mx; ++k) {
        for (int j = 0; j < my; ++j) {
            const int kp = (mx - k) % mx, jp = (my - j) % my;
            if (k * my + j > kp * my + jp) continue;
            const cplx mean = 0.5 * (f.at(k, j) + std::conj(f.at(kp, jp)));
            f.at(k, j) = mean;
            f.at(kp, jp) = std::conj(mean);
        }
    }
}

PhysicalField inverse(const SpectralField& f, double herm_tol) {
    f.grid.validate();
    if (hermitian_defect(f) > herm_tol)
        throw std::invalid_argument("inverse: non-Hermitian coefficients, field is not real");
    std::vector<cplx> work = f.coeffs;
    PlanCache::instance().run2d(work.data(), f.grid.mx, f.grid.my, FFTW_BACKWARD);
    const double nu = spectral_measure(f.grid);
    PhysicalField out(f.grid);
    for (std::size_t i = 0; i < work.size(); ++i) out.values[i] = nu * work[i].real();
    return out;
}

double hs_norm(const SpectralField& f, double s) {
    if (s < -2.0 || s > 3.0) throw std::invalid_argument("hs_norm: s outside [-2, 3]");
    const double nu = spectral_measure(f.grid);
    std::vector<double> terms;
    terms.reserve(f.coeffs.size());
    for (int k = 0; k < f.grid.mx; ++k) {
        for (int j = 0; j < f.grid.my; ++j) {
            const double w = jbracket(weighted_mod(f.grid.xi(k), f.grid.qy(j)));
            terms.push_back(std::pow(w, 2.0 * s) * std::norm(f.at(k, j)));
        }
    }
    return std::sqrt(nu * pairwise_sum(terms));
}

double l2_norm(const SpectralField& f) {
    const double nu = spectral_measure(f.grid);
    std::vector<double> terms;
    terms.reserve(f.coeffs.size());
    for (const auto& c : f.coeffs) terms.push_back(std::norm(c));
    return std::sqrt(nu * pairwise_sum(terms));
}

double inner_l2(const SpectralField& f, const SpectralField& g) {
    if (!f.grid.same_shape(g.grid)) throw std::invalid_argument("inner_l2: grid mismatch");
    const double nu = spectral_measure(f.grid);
    std::vector<double> terms;
    terms.reserve(f.coeffs.size());
    for (std::size_t i = 0; i < f.coeffs.size(); ++i)
        terms.push_back((std::conj(f.coeffs[i]) * g.coeffs[i]).real());
    return nu * pairwise_sum(terms);
}

double inner_quadrature(const PhysicalField& f, const PhysicalField& g) {
    if (!f.grid.same_shape(g.grid)) throw std::invalid_argument("inner_quadrature: grid mismatch");
    std::vector<double> terms;
    terms.reserve(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) terms.push_back(f.values[i] * g.values[i]);
    return quad_weight(f.grid) * pairwise_sum(terms);
}

namespace {

// Scatter stored modes into a 3/2 zero-padded lattice (same physical box, so
// the same frequencies carry over by signed index).
// Copies the stored window into a larger lattice.  The band-edge rows
// k = -mx/2 and j = -my/2 are left out: their conjugate partners are not
// stored, so letting them pair in a product would break Hermitian symmetry.
std::vector<cplx> pad_modes(const SpectralField& f, int px, int py) {
    std::vector<cplx> out(static_cast<std::size_t>(px) * py, cplx{0.0, 0.0});
    const int mx = f.grid.mx, my = f.grid.my;
    for (int k = 0; k < mx; ++k) {
        if (f.grid.ks(k) == -mx / 2) continue;
        const int kp = f.grid.ks(k) >= 0 ? f.grid.ks(k) : f.grid.ks(k) + px;
        for (int j = 0; j < my; ++j) {
            if (f.grid.js(j) == -my / 2) continue;
            const int jp = f.grid.js(j) >= 0 ? f.grid.js(j) : f.grid.js(j) + py;
            out[static_cast<std::size_t>(kp) * py + jp] = f.at(k, j);
        }
    }
    return out;
}

}  // namespace

SpectralField convolve(const SpectralField& f, const SpectralField& g) {
    if (!f.grid.same_shape(g.grid)) throw std::invalid_argument("convolve: grid mismatch");
    const int mx = f.grid.mx, my = f.grid.my;
    const int px = 3 * mx / 2, py = 3 * my / 2;
    auto a = pad_modes(f, px, py);
    auto b = pad_modes(g, px, py);
    auto& cache = PlanCache::instance();
    cache.run2d(a.data(), px, py, FFTW_BACKWARD);
    cache.run2d(b.data(), px, py, FFTW_BACKWARD);
    const double nu = spectral_measure(f.grid);
    // physical samples of f and g on the fine grid, then the product, then a
    // forward quadrature with the fine-grid cell size
    const double wq = two_pi * two_pi * f.grid.Lambda * f.grid.lambda /
                      (static_cast<double>(px) * py);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (nu * a[i]) * (nu * b[i]);
    cache.run2d(a.data(), px, py, FFTW_FORWARD);
    SpectralField out(f.grid);
    for (int k = 0; k < mx; ++k) {
        const int kp = f.grid.ks(k) >= 0 ? f.grid.ks(k) : f.grid.ks(k) + px;
        for (int j = 0; j < my; ++j) {
            const int jp = f.grid.js(j) >= 0 ? f.grid.js(j) : f.grid.js(j) + py;
            // The band edges k = -mx/2 and j = -my/2 have no stored conjugate
            // partner, so keeping them would break Hermitian symmetry of real
            // products; they are dropped along with the padded modes.
            const bool edge = f.grid.ks(k) == -mx / 2 || f.grid.js(j) == -my / 2;
            out.at(k, j) = edge ? cplx{0.0, 0.0} : wq * a[static_cast<std::size_t>(kp) * py + jp];
        }
    }
    return out;
}

double st_hermitian_defect(const SpaceTimeField& u) {
    const int mx = u.grid.mx, my = u.grid.my, mt = u.mt;
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < mx; ++k) {
        for (int j = 0; j < my; ++j) {
            for (int n = 0; n < mt; ++n) {
                const cplx a = u.at(k, j, n);
                const cplx b = u.at((mx - k) % mx, (my - j) % my, (mt - n) % mt);
                worst = std::max(worst, std::abs(a - std::conj(b)));
                scale = std::max(scale, std::abs(a));
            }
        }
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

std::vector<double> st_inverse(const SpaceTimeField& u, double herm_tol) {
    u.validate();
    if (st_hermitian_defect(u) > herm_tol)
        throw std::invalid_argument("st_inverse: non-Hermitian coefficients");
    std::vector<cplx> work = u.coeffs;
    PlanCache::instance().run3d(work.data(), u.grid.mx, u.grid.my, u.mt, FFTW_BACKWARD);
    const double nu = st_spectral_measure(u);
    std::vector<double> out(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) out[i] = nu * work[i].real();
    return out;
}

SpaceTimeField st_forward(const std::vector<double>& samples, const GridSpec& g, int mt,
                          double tspan) {
    SpaceTimeField out(g, mt, tspan);
    if (samples.size() != out.coeffs.size())
        throw std::invalid_argument("st_forward: sample count does not match lattice");
    for (std::size_t i = 0; i < samples.size(); ++i) out.coeffs[i] = samples[i];
    PlanCache::instance().run3d(out.coeffs.data(), g.mx, g.my, mt, FFTW_FORWARD);
    const double w = st_quad_weight(out);
    for (auto& c : out.coeffs) c *= w;
    return out;
}

SpaceTimeField st_product(const SpaceTimeField& u, const SpaceTimeField& v) {
    if (!u.same_shape(v)) throw std::invalid_argument("st_product: shape mismatch");
    std::vector<cplx> a = u.coeffs, b = v.coeffs;
    auto& cache = PlanCache::instance();
    cache.run3d(a.data(), u.grid.mx, u.grid.my, u.mt, FFTW_BACKWARD);
    cache.run3d(b.data(), u.grid.mx, u.grid.my, u.mt, FFTW_BACKWARD);
    const double nu = st_spectral_measure(u);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (nu * a[i]) * (nu * b[i]);
    cache.run3d(a.data(), u.grid.mx, u.grid.my, u.mt, FFTW_FORWARD);
    SpaceTimeField out(u.grid, u.mt, u.tspan);
    const double w = st_quad_weight(u);
    for (std::size_t i = 0; i < a.size(); ++i) out.coeffs[i] = w * a[i];
    return out;
}

double st_l2_norm(const SpaceTimeField& u) {
    const double nu = st_spectral_measure(u);
    std::vector<double> terms;
    terms.reserve(u.coeffs.size());
    for (const auto& c : u.coeffs) terms.push_back(std::norm(c));
    return std::sqrt(nu * pairwise_sum(terms));
}

double st_inner(const SpaceTimeField& u, const SpaceTimeField& v) {
    if (!u.same_shape(v)) throw std::invalid_argument("st_inner: shape mismatch");
    const double nu = st_spectral_measure(u);
    std::vector<double> terms;
    terms.reserve(u.coeffs.size());
    for (std::size_t i = 0; i < u.coeffs.size(); ++i)
        terms.push_back((std::conj(u.coeffs[i]) * v.coeffs[i]).real());
    return nu * pairwise_sum(terms);
}

}  // namespace zkcyl
