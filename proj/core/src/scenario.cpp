#include "zkcyl/scenario.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "zkcyl/dynamics.hpp"
#include "zkcyl/estimates.hpp"
#include "zkcyl/profiles.hpp"
#include "zkcyl/snapshot.hpp"
#include "zkcyl/symbols.hpp"
#include "zkcyl/util.hpp"

#ifndef ZKCYL_VERSION
#define ZKCYL_VERSION "0.0.0"
#endif

namespace zkcyl {

const char* version_string() { return ZKCYL_VERSION; }

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

// Every key any scenario understands; unknown keys are validation errors so
// that typos do not silently fall back to defaults.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "scenario", "out_dir",  "seed",       "jobs",        "Lambda",     "lambda",
        "mx",       "my",       "dt",         "scheme",      "tend",       "dealias",
        "snap_every", "N",      "s",          "N_list",      "s_list",     "data",
        "amp",      "ripple",   "decay",      "ximax",       "qmax",       "c",
        "x0",       "perturb",  "mt",         "tspan",       "bands",      "kout",
        "theta",    "eps",      "seeds",      "mod_decay",   "char_decay", "cases",
        "graph_cases", "horizon", "lambda_list",
    };
    return keys;
}

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

double parse_num(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        bad("key '" + key + "': expected a number, got '" + text + "'");
    }
}

// Accepts "19/20" as well as plain decimals; the rational form keeps the
// regularity exponents exact where that matters.
double parse_reg(const std::string& key, const std::string& text) {
    try {
        return Rational::parse(text).value();
    } catch (const std::exception&) {
        bad("key '" + key + "': expected a rational or decimal, got '" + text + "'");
    }
}

// --------------------------------------------------------------------------
// output collection

struct Emitter {
    fs::path dir;
    std::vector<std::string> names;

    void text(const std::string& name, const std::string& payload) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
        os << payload;
        os.close();
        if (!os) throw std::runtime_error("short write on " + (dir / name).string());
        names.push_back(name);
    }

    void snap(const std::string& name, const SpectralField& f) {
        write_snapshot((dir / name).string(), f);
        names.push_back(name);
    }
};

std::string csv_join(const std::string& header, const std::vector<std::string>& rows) {
    std::ostringstream os;
    os << header << '\n';
    for (const auto& r : rows) os << r << '\n';
    return os.str();
}

std::uint32_t crc32_of_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + p.string() + " for checksum");
    std::vector<char> buf(1 << 20);
    uLong crc = crc32(0L, Z_NULL, 0);
    while (is) {
        is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::streamsize got = is.gcount();
        if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()),
                                 static_cast<uInt>(got));
    }
    return static_cast<std::uint32_t>(crc);
}

std::string hex32(std::uint32_t v) {
    char out[16];
    std::snprintf(out, sizeof out, "%08x", v);
    return out;
}

// Runs fn(0..n-1) on up to `jobs` threads; the caller indexes results so the
// schedule cannot affect output order.  The first exception wins and rethrows.
template <class Fn>
void parallel_for(int jobs, int n, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int width = std::min(jobs, n);
    pool.reserve(width);
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// --------------------------------------------------------------------------
// shared parsing pieces

GridSpec grid_from(const ScenarioConfig& cfg, double lam_big, double lam_small, int mx, int my,
                   double dt) {
    GridSpec g;
    g.Lambda = cfg.get_num("Lambda", lam_big);
    g.lambda = cfg.get_num("lambda", lam_small);
    g.mx = static_cast<int>(cfg.get_int("mx", mx));
    g.my = static_cast<int>(cfg.get_int("my", my));
    g.dt = cfg.get_num("dt", dt);
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    return g;
}

IntegratorConfig integ_from(const ScenarioConfig& cfg, const GridSpec& g, double tend) {
    IntegratorConfig ic;
    ic.dt = g.dt;
    ic.tend = cfg.get_num("tend", tend);
    ic.dealias = cfg.get_flag("dealias", true);
    const std::string scheme = cfg.get("scheme", "etdrk4");
    if (scheme == "etdrk4")
        ic.scheme = Scheme::etdrk4;
    else if (scheme == "strang")
        ic.scheme = Scheme::strang;
    else
        bad("key 'scheme': expected etdrk4 or strang, got '" + scheme + "'");
    try {
        ic.validate();
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    return ic;
}

long long steps_of(const IntegratorConfig& ic) {
    const double raw = ic.tend / ic.dt;
    const long long n = std::llround(raw);
    if (n <= 0 || std::abs(raw - static_cast<double>(n)) > 1e-8)
        bad("tend must be an integer number of dt steps (tend/dt = " + fmt_double(raw) + ")");
    return n;
}

// snap_every must tile the run, and the snapshot intervals must come in
// multiples of four so the ledger's coarse/fine quadrature comparison stays a
// pure composite rule.
int ledger_stride(const ScenarioConfig& cfg, long long nsteps, int fallback) {
    const int snap = static_cast<int>(cfg.get_int("snap_every", fallback));
    if (snap <= 0) bad("snap_every must be positive");
    if (nsteps % snap != 0 || (nsteps / snap) % 4 != 0)
        bad("snap_every must divide the step count with a multiple-of-4 quotient (steps = " +
            std::to_string(nsteps) + ", snap_every = " + std::to_string(snap) + ")");
    return snap;
}

double threshold_from(const ScenarioConfig& cfg, double fallback) {
    const double n = cfg.get_num("N", fallback);
    try {
        require_dyadic(n, 2.0, "N");
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    return n;
}

void check_band(double n, const GridSpec& g, bool half_box) {
    const double wm = half_box ? weighted_mod((g.mx / 4) / g.Lambda, (g.my / 4) / g.lambda)
                               : weighted_mod(g.xi_max(), g.qy_max());
    const double reach = half_box ? n / 2.0 : n;
    if (reach > wm)
        bad("N = " + fmt_double(n) + " exceeds the grid's weighted Nyquist band (max |.|_w = " +
            fmt_double(wm) + (half_box ? ", half-box)" : ")"));
}

SpectralField initial_data(const ScenarioConfig& cfg, const GridSpec& g,
                           const std::string& fallback_kind) {
    const std::string kind = cfg.get("data", fallback_kind);
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 11));
    if (kind == "bump")
        return bump_data(g, cfg.get_num("amp", 0.5), cfg.get_num("ripple", 0.2), seed);
    if (kind == "random")
        return random_field(g, cfg.get_num("amp", 0.3), cfg.get_num("decay", 1.5),
                            cfg.get_num("ximax", 0.0), cfg.get_num("qmax", 0.0), seed);
    if (kind == "soliton" || kind == "soliton_ripple") {
        const double c = cfg.get_num("c", 1.0);
        if (!(c > 0.0)) bad("key 'c': the traveling speed must be positive");
        const double x0 = cfg.get_num("x0", 0.5 * g.x_period());
        SpectralField u = forward(soliton_profile(g, c, x0));
        if (kind == "soliton_ripple") {
            const double perturb = cfg.get_num("perturb", 0.05);
            const SpectralField extra =
                bump_data(g, perturb, cfg.get_num("ripple", 1.0), seed);
            for (std::size_t i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] += extra.coeffs[i];
        }
        return u;
    }
    bad("key 'data': expected bump, random, soliton or soliton_ripple, got '" + kind + "'");
}

// --------------------------------------------------------------------------
// scenarios; em == nullptr runs the parse/consistency phase only

void sc_conserve(const ScenarioConfig& cfg, Emitter* em) {
    const GridSpec g = grid_from(cfg, 8.0, 1.0, 512, 32, 1e-3);
    const IntegratorConfig ic = integ_from(cfg, g, 1.0);
    const int snap = ledger_stride(cfg, steps_of(ic), 25);
    const double n = threshold_from(cfg, 32.0);
    const double s = parse_reg("s", cfg.get("s", "19/20"));
    check_band(n, g, false);
    IMultiplier m(n, s);
    if (!em) return;

    const SpectralField u0 = initial_data(cfg, g, "bump");
    const Trajectory traj = evolve(u0, ic, snap);
    const EnergyLedger led = increment_check(traj, m);
    em->text("ledger.csv", led.csv());

    double dm = 0.0, de = 0.0;
    for (std::size_t i = 0; i < led.t.size(); ++i) {
        dm = std::max(dm, std::abs(led.mass_series[i] - led.mass_series[0]));
        de = std::max(de, std::abs(led.energy_series[i] - led.energy_series[0]));
    }
    const double reality = hermitian_defect(traj.states.back());
    em->text("conserve_summary.csv",
             csv_join("max_mass_drift,max_energy_drift,final_reality_defect",
                      {fmt_double(dm) + "," + fmt_double(de) + "," + fmt_double(reality)}));
    em->snap("initial.snap", u0);
    em->snap("final.snap", traj.states.back());
}

void sc_soliton(const ScenarioConfig& cfg, Emitter* em) {
    const GridSpec g = grid_from(cfg, 32.0, 1.0, 1024, 16, 1e-3);
    const IntegratorConfig ic = integ_from(cfg, g, 5.0);
    const long long nsteps = steps_of(ic);
    const int snap = static_cast<int>(cfg.get_int("snap_every", 200));
    if (snap <= 0 || nsteps % snap != 0)
        bad("snap_every must divide the step count (steps = " + std::to_string(nsteps) + ")");
    const double c = cfg.get_num("c", 1.0);
    if (!(c > 0.0)) bad("key 'c': the traveling speed must be positive");
    if (!em) return;

    const double x0 = cfg.get_num("x0", 0.5 * g.x_period());
    const SpectralField u0 = forward(soliton_profile(g, c, x0));
    const double residual = traveling_residual(u0, c);
    const double ref = l2_norm(u0), m0 = mass(u0), e0 = energy(u0);
    const Trajectory traj = evolve(u0, ic, snap);

    std::vector<std::string> rows;
    double max_err = 0.0, final_err = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const SpectralField exact = translate_x(u0, c * traj.times[i]);
        SpectralField diff = traj.states[i];
        for (std::size_t p = 0; p < diff.coeffs.size(); ++p) diff.coeffs[p] -= exact.coeffs[p];
        const double err = l2_norm(diff) / ref;
        max_err = std::max(max_err, err);
        final_err = err;
        rows.push_back(fmt_double(traj.times[i]) + "," + fmt_double(err) + "," +
                       fmt_double(std::abs(mass(traj.states[i]) - m0)) + "," +
                       fmt_double(std::abs(energy(traj.states[i]) - e0)));
    }
    em->text("soliton.csv", csv_join("t,l2_error,mass_drift,energy_drift", rows));
    em->text("soliton_summary.csv",
             csv_join("residual_l2,max_l2_error,final_l2_error",
                      {fmt_double(residual) + "," + fmt_double(max_err) + "," +
                       fmt_double(final_err)}));
    em->snap("initial.snap", u0);
    em->snap("final.snap", traj.states.back());
}

void sc_increment(const ScenarioConfig& cfg, Emitter* em) {
    const GridSpec g = grid_from(cfg, 8.0, 1.0, 256, 16, 2e-3);
    const IntegratorConfig ic = integ_from(cfg, g, 1.0);
    const int snap = ledger_stride(cfg, steps_of(ic), 25);
    const double n = threshold_from(cfg, 8.0);
    const double s = parse_reg("s", cfg.get("s", "19/20"));
    check_band(n, g, false);
    IMultiplier m(n, s);
    if (!em) return;

    const SpectralField u0 = initial_data(cfg, g, "soliton_ripple");
    const Trajectory traj = evolve(u0, ic, snap);
    const EnergyLedger led = increment_check(traj, m);
    em->text("ledger.csv", led.csv());

    const double fine = led.mismatch.back();
    const double coarse = led.final_mismatch_coarse;
    const double shrink = fine > 0.0 ? coarse / fine : 0.0;
    em->text("increment_summary.csv",
             csv_join("mismatch_fine,mismatch_coarse,shrink_factor",
                      {fmt_double(fine) + "," + fmt_double(coarse) + "," + fmt_double(shrink)}));
}

void sc_drift_vs_n(const ScenarioConfig& cfg, Emitter* em) {
    const GridSpec g = grid_from(cfg, 1.0, 1.0, 512, 32, 1e-3);
    const IntegratorConfig ic = integ_from(cfg, g, 1.0);
    steps_of(ic);
    const double s = parse_reg("s", cfg.get("s", "19/20"));
    std::vector<double> ns = cfg.get_list("N_list", "8,16,32,64");
    if (ns.empty()) bad("N_list must not be empty");
    std::sort(ns.begin(), ns.end());
    for (double n : ns) {
        try {
            require_dyadic(n, 2.0, "N_list entry");
        } catch (const std::invalid_argument& e) {
            bad(e.what());
        }
        check_band(n, g, false);
        IMultiplier{n, s};
    }
    if (!em) return;

    const SpectralField u0 = initial_data(cfg, g, "random");
    const Trajectory traj = evolve(u0, ic, static_cast<int>(steps_of(ic)));
    const SpectralField& uT = traj.states.back();

    std::vector<std::string> rows;
    std::vector<double> drifts;
    bool monotone = true;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        IMultiplier m(ns[i], s);
        const double drift = std::abs(modified_energy(uT, m) - modified_energy(u0, m));
        drifts.push_back(drift);
        if (i > 0 && !(drift < drifts[i - 1])) monotone = false;
        rows.push_back(fmt_double(ns[i]) + "," + fmt_double(s) + "," + fmt_double(drift));
    }
    em->text("drift.csv", csv_join("N,s,drift", rows));
    const double slope = loglog_slope(ns, drifts);
    em->text("drift_fit.csv", csv_join("slope,monotone", {fmt_double(slope) + "," +
                                                          std::string(monotone ? "1" : "0")}));
}

struct BandConfig {
    double n1, l1, n2, l2;
};

std::vector<BandConfig> bands_from(const ScenarioConfig& cfg, const GridSpec& g) {
    const std::string text = cfg.get("bands", "4,1,4,1;8,2,8,1;2,1,8,4;2,2,16,2");
    std::vector<BandConfig> out;
    for (const std::string& part : split(text, ';')) {
        const auto nums = split(part, ',');
        if (nums.size() != 4) bad("key 'bands': each config needs N1,L1,N2,L2 (got '" + part + "')");
        BandConfig b;
        b.n1 = parse_num("bands", nums[0]);
        b.l1 = parse_num("bands", nums[1]);
        b.n2 = parse_num("bands", nums[2]);
        b.l2 = parse_num("bands", nums[3]);
        for (double v : {b.n1, b.l1, b.n2, b.l2}) {
            try {
                require_dyadic(v, 1.0, "bands entry");
            } catch (const std::invalid_argument& e) {
                bad(e.what());
            }
        }
        check_band(b.n1, g, true);
        check_band(b.n2, g, true);
        out.push_back(b);
    }
    if (out.empty()) bad("key 'bands': at least one band config is required");
    return out;
}

void sc_bilinear(const ScenarioConfig& cfg, Emitter* em) {
    const GridSpec g = grid_from(cfg, 2.0, 2.0, 64, 64, 1e-3);
    const int mt = static_cast<int>(cfg.get_int("mt", 64));
    const double tspan = cfg.get_num("tspan", two_pi);
    if (mt < 8 || mt % 2 != 0) bad("key 'mt': must be even and >= 8");
    if (!(tspan > 0.0)) bad("key 'tspan': must be positive");
    const double theta = cfg.get_num("theta", 0.5);
    if (!(theta > 0.0 && theta < 1.0)) bad("key 'theta': must lie in (0,1)");
    const double kout = cfg.get_num("kout", 2.0);
    try {
        require_dyadic(kout, 1.0, "kout");
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    const int seeds = static_cast<int>(cfg.get_int("seeds", 50));
    if (seeds < 1) bad("key 'seeds': must be >= 1");
    const auto bands = bands_from(cfg, g);
    const std::uint64_t seed0 = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    const int jobs = std::max(1, static_cast<int>(cfg.get_int("jobs", 1)));
    if (!em) return;

    GridSpec g2 = g;
    g2.mx *= 2;
    g2.my *= 2;
    const int mt2 = 2 * mt;

    struct Task {
        std::vector<RatioReport> base, refined;
    };
    const int ntask = static_cast<int>(bands.size()) * seeds;
    std::vector<Task> tasks(ntask);

    parallel_for(jobs, ntask, [&](int t) {
        const int ci = t / seeds, si = t % seeds;
        const BandConfig& b = bands[ci];
        const std::uint64_t su = seed0 + 1000003ULL * ci + 2ULL * si;
        std::vector<std::string> ids = {"b1", "b3"};
        const double nmin = std::min(b.n1, b.n2), nmax = std::max(b.n1, b.n2);
        if (nmax >= 4.0 * nmin) {
            ids.push_back("b2");
            ids.push_back("b4");
        }
        for (int pass = 0; pass < 2; ++pass) {
            const GridSpec& gg = pass == 0 ? g : g2;
            const int mm = pass == 0 ? mt : mt2;
            const DyadicSample u = make_dyadic(gg, mm, tspan, b.n1, b.l1, su);
            const DyadicSample v = make_dyadic(gg, mm, tspan, b.n2, b.l2, su + 1);
            auto rows = probe_bilinear_batch(u, v, ids, theta, kout);
            (pass == 0 ? tasks[t].base : tasks[t].refined) = std::move(rows);
        }
        for (std::size_t r = 0; r < tasks[t].base.size(); ++r) {
            RatioReport& a = tasks[t].base[r];
            RatioReport& c = tasks[t].refined[r];
            const bool ok = std::isfinite(a.ratio) && std::isfinite(c.ratio) && a.ratio > 0.0 &&
                            c.ratio > 0.5 * a.ratio && c.ratio < 2.0 * a.ratio;
            a.converged = ok;
            c.converged = ok;
        }
    });

    std::vector<std::string> rows, rows_refined;
    std::map<std::pair<int, std::string>, std::array<double, 2>> peak;  // (config,id) -> max
    std::map<std::pair<int, std::string>, bool> allok;
    for (int t = 0; t < ntask; ++t) {
        const int ci = t / seeds;
        for (std::size_t r = 0; r < tasks[t].base.size(); ++r) {
            const RatioReport& a = tasks[t].base[r];
            const RatioReport& c = tasks[t].refined[r];
            rows.push_back(a.csv_row());
            rows_refined.push_back(c.csv_row());
            auto key = std::make_pair(ci, a.estimate_id);
            auto& mx = peak[key];
            mx[0] = std::max(mx[0], a.ratio);
            mx[1] = std::max(mx[1], c.ratio);
            auto it = allok.find(key);
            allok[key] = (it == allok.end() ? true : it->second) && a.converged;
        }
    }
    em->text("ratios.csv", csv_join(RatioReport::csv_header(), rows));
    em->text("ratios_refined.csv", csv_join(RatioReport::csv_header(), rows_refined));
    std::vector<std::string> sm;
    for (const auto& [key, mx] : peak)
        sm.push_back(std::to_string(key.first) + "," + key.second + "," + fmt_double(mx[0]) +
                     "," + fmt_double(mx[1]) + "," + (allok[key] ? "1" : "0"));
    em->text("bilinear_summary.csv",
             csv_join("config,estimate_id,max_ratio,max_ratio_refined,all_converged", sm));
}

void sc_commutator(const ScenarioConfig& cfg, Emitter* em) {
    const GridSpec g = grid_from(cfg, 1.0, 1.0, 256, 64, 1e-3);
    const int mt = static_cast<int>(cfg.get_int("mt", 32));
    const double tspan = cfg.get_num("tspan", two_pi);
    if (mt < 8 || mt % 2 != 0) bad("key 'mt': must be even and >= 8");
    if (!(tspan > 0.0)) bad("key 'tspan': must be positive");
    const double s = parse_reg("s", cfg.get("s", "19/20"));
    const double eps = cfg.get_num("eps", 0.05);
    if (!(eps > 0.0 && eps < 0.25)) bad("key 'eps': must lie in (0, 1/4)");
    std::vector<double> ns = cfg.get_list("N_list", "8,16,32,64");
    if (ns.empty()) bad("N_list must not be empty");
    std::sort(ns.begin(), ns.end());
    for (double n : ns) {
        try {
            require_dyadic(n, 2.0, "N_list entry");
        } catch (const std::invalid_argument& e) {
            bad(e.what());
        }
        check_band(n, g, true);
        IMultiplier{n, s};
    }
    const int seeds = static_cast<int>(cfg.get_int("seeds", 3));
    if (seeds < 1) bad("key 'seeds': must be >= 1");
    const double mod_decay = cfg.get_num("mod_decay", 1.0);
    const double char_decay = cfg.get_num("char_decay", 1.5);
    const std::uint64_t seed0 = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    const int jobs = std::max(1, static_cast<int>(cfg.get_int("jobs", 1)));
    if (!em) return;

    struct Cell {
        RatioReport comm_gain, comm_base, quart_gain, quart_base;
    };
    const int nn = static_cast<int>(ns.size());
    std::vector<Cell> cells(static_cast<std::size_t>(nn) * seeds);

    parallel_for(jobs, nn * seeds, [&](int t) {
        const int ni = t / seeds, si = t % seeds;
        const std::uint64_t seed = seed0 + 2ULL * si;
        const SpaceTimeField u =
            apply_time_window(make_packet(g, mt, tspan, mod_decay, char_decay, seed));
        const SpaceTimeField v =
            apply_time_window(make_packet(g, mt, tspan, mod_decay, char_decay, seed + 1));
        IMultiplier m(ns[ni], s);
        CommutatorProbe cp = probe_commutator(u, v, m, eps);
        CommutatorProbe qp = probe_quartic(u, m, eps);
        cp.gain.seed = cp.baseline.seed = qp.gain.seed = qp.baseline.seed = seed;
        cells[t] = Cell{cp.gain, cp.baseline, qp.gain, qp.baseline};
    });

    std::vector<std::string> rows;
    for (int t = 0; t < nn * seeds; ++t)
        for (const RatioReport* r :
             {&cells[t].comm_gain, &cells[t].comm_base, &cells[t].quart_gain,
              &cells[t].quart_base})
            rows.push_back(r->csv_row());
    em->text("commutator.csv", csv_join(RatioReport::csv_header(), rows));

    std::vector<std::string> fit;
    for (int si = 0; si < seeds; ++si) {
        for (int probe = 0; probe < 2; ++probe) {
            std::vector<double> ratios;
            bool monotone = true;
            for (int ni = 0; ni < nn; ++ni) {
                const Cell& c = cells[static_cast<std::size_t>(ni) * seeds + si];
                const double r = probe == 0 ? c.comm_base.ratio : c.quart_base.ratio;
                if (!ratios.empty() && !(r < ratios.back())) monotone = false;
                ratios.push_back(r);
            }
            const double slope = loglog_slope(ns, ratios);
            fit.push_back(std::string(probe == 0 ? "commutator" : "quartic") + "," +
                          std::to_string(si) + "," + fmt_double(slope) + "," +
                          (monotone ? "1" : "0"));
        }
    }
    em->text("commutator_fit.csv", csv_join("probe,seed,slope,monotone", fit));
}

void sc_counting(const ScenarioConfig& cfg, Emitter* em) {
    const long long cases = cfg.get_int("cases", 1000);
    const long long graph_cases = cfg.get_int("graph_cases", 200);
    if (cases < 1 || graph_cases < 0) bad("cases must be >= 1 and graph_cases >= 0");
    const std::uint64_t seed0 = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    if (!em) return;

    std::uint64_t st = seed0 ^ 0x51ed2700c1a3145bULL;
    std::mt19937_64 eng(splitmix64(st));
    const double lams[4] = {1.0, 2.0, 4.0, 8.0};

    std::vector<std::string> rows;
    long long violations = 0;
    for (long long i = 0; i < cases; ++i) {
        const double a = (uniform01(eng) < 0.5 ? -1.0 : 1.0) *
                         std::exp(std::log(0.25) + uniform01(eng) * std::log(32.0));
        const double b = -10.0 + 20.0 * uniform01(eng);
        const double c = -10.0 + 20.0 * uniform01(eng);
        const double center = -30.0 + 60.0 * uniform01(eng);
        const double half = std::exp(std::log(0.05) + uniform01(eng) * std::log(500.0));
        const double lam = lams[i % 4];
        const double qmax = parabola_window(a, b, c, center - half, center + half) + 1.0;
        const CountReport rep =
            count_parabola(a, b, c, center - half, center + half, lam, qmax);
        if (rep.count > rep.bound) ++violations;
        rows.push_back(rep.csv_row());
    }
    em->text("counts.csv", csv_join(CountReport::csv_header(), rows));

    long long graph_violations = 0;
    for (long long i = 0; i < graph_cases; ++i) {
        const double lam = lams[i % 4];
        const int max_c = 1 + static_cast<int>(eng() % 4);
        const int xcells = 1 + static_cast<int>(eng() % 40);
        const double qlo = -20.0 + 30.0 * uniform01(eng);
        const double qhi = qlo + 20.0 * uniform01(eng);
        std::set<std::pair<long long, int>> sel;
        const long long nlo = static_cast<long long>(std::ceil(qlo * lam - 1e-9));
        const long long nhi = static_cast<long long>(std::floor(qhi * lam + 1e-9));
        for (long long n = nlo; n <= nhi; ++n) {
            const int cnt = static_cast<int>(eng() % (max_c + 1));
            std::set<int> cells;
            while (static_cast<int>(cells.size()) < std::min(cnt, xcells))
                cells.insert(static_cast<int>(eng() % xcells));
            for (int cell : cells) sel.insert({n, cell});
        }
        try {
            const long long total = count_graph_set(
                [&](int cell, double q) {
                    return sel.count({std::llround(q * lam), cell}) > 0;
                },
                xcells, qlo, qhi, lam, max_c);
            const double bound = lam * max_c * (std::abs(qhi - qlo) + 1.0);
            if (static_cast<double>(total) > bound) ++graph_violations;
        } catch (const std::exception&) {
            ++graph_violations;
        }
    }

    // fixed monotone-window spot checks: measure of {x : f(x) in [lo,hi]}
    // against 2 |hi-lo| / inf |f'|
    struct MeasureCase {
        std::function<double(double)> f;
        double jlo, jhi, lo, hi, dmin;
    };
    const std::vector<MeasureCase> mc = {
        {[](double x) { return x * x; }, 1.0, 3.0, 4.0, 4.5, 2.0},
        {[](double x) { return x * x; }, 1.0, 3.0, 1.21, 2.56, 2.0},
        {[](double x) { return x * x * x; }, 1.0, 2.0, 1.0, 8.0, 3.0},
        {[](double x) { return x * x * x; }, 1.0, 2.0, 2.197, 4.913, 3.0},
        {[](double x) { return dispersion(x, 0.0); }, 1.0, 2.0, dispersion(1.2, 0.0),
         dispersion(1.8, 0.0), 3.0},
        {[](double x) { return dispersion(x, 2.0); }, 1.0, 2.0, dispersion(1.25, 2.0),
         dispersion(1.75, 2.0), 7.0},
    };
    long long measure_violations = 0;
    std::vector<std::string> mrows;
    for (std::size_t i = 0; i < mc.size(); ++i) {
        double meas = 0.0;
        bool ok = true;
        try {
            meas = preimage_measure(mc[i].f, mc[i].jlo, mc[i].jhi, mc[i].lo, mc[i].hi,
                                    mc[i].dmin);
        } catch (const std::exception&) {
            ok = false;
        }
        const double bound = 2.0 * (mc[i].hi - mc[i].lo) / mc[i].dmin;
        if (!ok || meas > bound + 1e-6) ++measure_violations;
        mrows.push_back(std::to_string(i) + "," + fmt_double(meas) + "," + fmt_double(bound));
    }
    em->text("measure.csv", csv_join("case,measure,bound", mrows));
    em->text("counting_summary.csv",
             csv_join("parabola_cases,parabola_violations,graph_cases,graph_violations,"
                      "measure_cases,measure_violations",
                      {std::to_string(cases) + "," + std::to_string(violations) + "," +
                       std::to_string(graph_cases) + "," + std::to_string(graph_violations) +
                       "," + std::to_string(mc.size()) + "," +
                       std::to_string(measure_violations)}));
}

void sc_scaling(const ScenarioConfig& cfg, Emitter* em) {
    const GridSpec g = grid_from(cfg, 1.0, 1.0, 512, 64, 1e-3);
    const double n = threshold_from(cfg, 4.0);
    const double s = parse_reg("s", cfg.get("s", "19/20"));
    if (!(s > 0.0 && s < 1.0)) bad("key 's': must lie in (0,1)");
    check_band(n, g, false);
    std::vector<double> lams = cfg.get_list("lambda_list", "1,2,4,8");
    if (lams.empty()) bad("lambda_list must not be empty");
    std::sort(lams.begin(), lams.end());
    for (double lam : lams) {
        try {
            require_dyadic(lam, 1.0, "lambda_list entry");
        } catch (const std::invalid_argument& e) {
            bad(e.what());
        }
    }
    if (!em) return;

    const SpectralField u0 =
        random_field(g, cfg.get_num("amp", 0.5), cfg.get_num("decay", 0.5),
                     cfg.get_num("ximax", 0.0), cfg.get_num("qmax", 0.0),
                     static_cast<std::uint64_t>(cfg.get_int("seed", 5)));
    const IMultiplier m(n, s);
    const double ref_l2 = l2_norm(u0), ref_alt = l2_norm_alt(u0);
    const double hs = hs_norm(u0, s);

    auto grad_i_norm = [&](const SpectralField& f) {
        std::vector<double> terms;
        terms.reserve(f.coeffs.size());
        for (int k = 0; k < f.grid.mx; ++k) {
            const double xi = f.grid.xi(k);
            for (int j = 0; j < f.grid.my; ++j) {
                const double q = f.grid.qy(j);
                const double mv = m.value(weighted_mod(xi, q));
                terms.push_back((xi * xi + q * q) * mv * mv * std::norm(f.at(k, j)));
            }
        }
        return std::sqrt(spectral_measure(f.grid) * pairwise_sum(terms));
    };

    std::vector<std::string> rows;
    double c_min = 0.0, c_max = 0.0;
    for (double lam : lams) {
        const SpectralField ul = rescale(u0, lam);
        const double l2 = l2_norm(ul);
        const double defect = std::abs(l2 - ref_l2 / lam);
        const double defect_alt = std::abs(l2_norm_alt(ul) - ref_alt / lam);
        const double lhs = grad_i_norm(ul);
        const double envelope = std::pow(n, 1.0 - s) * std::pow(lam, -(1.0 + s)) * hs;
        const double big_c = envelope > 0.0 ? lhs / envelope : 0.0;
        if (lam > 1.0) {
            c_min = c_min == 0.0 ? big_c : std::min(c_min, big_c);
            c_max = std::max(c_max, big_c);
        }
        rows.push_back(fmt_double(lam) + "," + fmt_double(l2) + "," + fmt_double(defect) + "," +
                       fmt_double(defect_alt) + "," + fmt_double(lhs) + "," +
                       fmt_double(envelope) + "," + fmt_double(big_c));
    }
    em->text("scaling.csv",
             csv_join("lam,l2,l2_defect,l2_alt_defect,grad_i,envelope,big_c", rows));
    const double spread = c_min > 0.0 ? c_max / c_min : 0.0;
    em->text("scaling_summary.csv", csv_join("c_min,c_max,spread", {fmt_double(c_min) + "," +
                                                                    fmt_double(c_max) + "," +
                                                                    fmt_double(spread)}));
}

void sc_gwp(const ScenarioConfig& cfg, Emitter* em) {
    const double horizon = cfg.get_num("horizon", 100.0);
    if (!(horizon > 1.0)) bad("key 'horizon': must exceed 1");
    const std::string head_text = cfg.get("s", "19/20");
    Rational head;
    try {
        head = Rational::parse(head_text);
    } catch (const std::exception&) {
        bad("key 's': expected a rational or decimal, got '" + head_text + "'");
    }
    GwpRecord head_rec;
    try {
        head_rec = gwp_arithmetic(head, horizon);
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    if (!head_rec.feasible)
        bad("infeasible s = " + head.str() +
            ": the iteration closes only for s > 29/31; pick the table entries via s_list");
    std::vector<Rational> list;
    for (const std::string& word :
         cfg.get_words("s_list", "9/10,29/31,15/16,19/20,31/32,49/50")) {
        try {
            list.push_back(Rational::parse(word));
        } catch (const std::exception&) {
            bad("key 's_list': expected rationals or decimals, got '" + word + "'");
        }
    }
    if (list.empty()) bad("key 's_list': the sweep list must not be empty");
    if (!em) return;

    std::vector<std::string> rows;
    for (const Rational& r : list) rows.push_back(gwp_arithmetic(r, horizon).csv_row());
    em->text("gwp.csv", csv_join(GwpRecord::csv_header(), rows));
    em->text("gwp_summary.csv",
             csv_join("s,horizon," + GwpRecord::csv_header(),
                      {head.str() + "," + fmt_double(horizon) + "," + head_rec.csv_row()}));
}

using ScenarioFn = void (*)(const ScenarioConfig&, Emitter*);

const std::map<std::string, ScenarioFn>& registry() {
    static const std::map<std::string, ScenarioFn> table = {
        {"conserve", sc_conserve},       {"soliton", sc_soliton},
        {"increment", sc_increment},     {"drift_vs_N", sc_drift_vs_n},
        {"bilinear_suite", sc_bilinear}, {"commutator_suite", sc_commutator},
        {"counting_suite", sc_counting}, {"scaling_suite", sc_scaling},
        {"gwp_table", sc_gwp},
    };
    return table;
}

}  // namespace

// --------------------------------------------------------------------------

ScenarioConfig ScenarioConfig::from_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            bad("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad("config line " + std::to_string(lineno) + ": empty key");
        if (cfg.kv.count(key))
            bad("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.kv[key] = value;
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) bad("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_text(buf.str());
}

std::string ScenarioConfig::get(const std::string& key, const std::string& fallback) const {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

double ScenarioConfig::get_num(const std::string& key, double fallback) const {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_num(key, it->second);
}

long long ScenarioConfig::get_int(const std::string& key, long long fallback) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        bad("key '" + key + "': expected an integer, got '" + it->second + "'");
    }
}

bool ScenarioConfig::get_flag(const std::string& key, bool fallback) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    bad("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> ScenarioConfig::get_list(const std::string& key,
                                             const std::string& fallback) const {
    std::vector<double> out;
    for (const std::string& w : get_words(key, fallback)) {
        if (w.empty()) bad("key '" + key + "': empty list entry");
        out.push_back(parse_num(key, w));
    }
    return out;
}

std::vector<std::string> ScenarioConfig::get_words(const std::string& key,
                                                   const std::string& fallback) const {
    const std::string text = get(key, fallback);
    if (trim(text).empty()) return {};
    return split(text, ',');
}

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
    std::vector<std::string> diags;
    const std::string name = cfg.get("scenario", "");
    if (name.empty()) {
        diags.push_back("missing key 'scenario'");
        return diags;
    }
    const auto it = registry().find(name);
    if (it == registry().end()) {
        std::string known;
        for (const auto& [k, fn] : registry()) known += (known.empty() ? "" : ", ") + k;
        diags.push_back("unknown scenario '" + name + "' (known: " + known + ")");
        return diags;
    }
    for (const auto& [k, v] : cfg.kv)
        if (!known_keys().count(k)) diags.push_back("unknown key '" + k + "'");
    if (trim(cfg.get("out_dir", "out")).empty()) diags.push_back("out_dir must not be empty");
    try {
        it->second(cfg, nullptr);
    } catch (const std::exception& e) {
        diags.push_back(e.what());
    }
    return diags;
}

void run_scenario(const ScenarioConfig& cfg) {
    const auto diags = validate_config(cfg);
    if (!diags.empty()) {
        std::string joined;
        for (const auto& d : diags) joined += (joined.empty() ? "" : "; ") + d;
        throw ConfigError(joined);
    }
    const std::string name = cfg.get("scenario", "");
    Emitter em;
    em.dir = cfg.get("out_dir", "out");
    std::error_code ec;
    fs::create_directories(em.dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + em.dir.string());

    const auto start = std::chrono::steady_clock::now();
    const auto flush_manifest = [&](const std::string& error) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ordered_json man;
        man["version"] = version_string();
        man["scenario"] = name;
        man["config"] = ordered_json::object();
        for (const auto& [k, v] : cfg.kv) man["config"][k] = v;
        man["wall_clock_seconds"] = elapsed;
        if (!error.empty()) man["error"] = error;
        man["files"] = ordered_json::array();
        for (const std::string& fname : em.names) {
            ordered_json entry;
            entry["name"] = fname;
            entry["bytes"] = static_cast<std::uint64_t>(fs::file_size(em.dir / fname));
            entry["crc32"] = hex32(crc32_of_file(em.dir / fname));
            man["files"].push_back(entry);
        }
        std::ofstream os(em.dir / "manifest.json", std::ios::binary);
        if (!os) throw std::runtime_error("cannot write manifest.json");
        os << man.dump(2) << '\n';
    };
    try {
        registry().at(name)(cfg, &em);
    } catch (const BlowupError& e) {
        // Leave whatever made it to disk inventoried, then surface the failure.
        flush_manifest(e.what());
        throw;
    }
    flush_manifest("");
}

std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream is(manifest_path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + manifest_path.string());
    ordered_json man;
    try {
        is >> man;
    } catch (const std::exception& e) {
        throw std::runtime_error("malformed manifest: " + std::string(e.what()));
    }
    const fs::path dir = manifest_path.parent_path();
    std::vector<std::string> bad_files;
    for (const auto& entry : man.at("files")) {
        const std::string name = entry.at("name").get<std::string>();
        const fs::path p = dir / name;
        if (!fs::exists(p)) {
            bad_files.push_back(name + ": missing");
            continue;
        }
        const auto bytes = static_cast<std::uint64_t>(fs::file_size(p));
        if (bytes != entry.at("bytes").get<std::uint64_t>()) {
            bad_files.push_back(name + ": size " + std::to_string(bytes) + ", manifest says " +
                                std::to_string(entry.at("bytes").get<std::uint64_t>()));
            continue;
        }
        const std::string crc = hex32(crc32_of_file(p));
        if (crc != entry.at("crc32").get<std::string>())
            bad_files.push_back(name + ": crc32 " + crc + ", manifest says " +
                                entry.at("crc32").get<std::string>());
    }
    return bad_files;
}

}  // namespace zkcyl
