// Config parsing, validation diagnostics, end-to-end scenario runs, manifest
// integrity, and the command line front end's exit codes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zkcyl/dynamics.hpp"
#include "zkcyl/profiles.hpp"
#include "zkcyl/scenario.hpp"
#include "zkcyl/snapshot.hpp"

namespace fs = std::filesystem;
using zkcyl::ConfigError;
using zkcyl::ScenarioConfig;

namespace {

const fs::path& test_root() {
    static const fs::path root = [] {
        fs::path p = fs::temp_directory_path() /
                     ("zkcyl_scenario_" + std::to_string(static_cast<unsigned>(::getpid())));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = test_root() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(static_cast<bool>(is));
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur)) out.push_back(cur);
    return out;
}

template <class Fn>
std::string thrown_message(Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

nlohmann::ordered_json load_manifest(const fs::path& dir) {
    std::ifstream is(dir / "manifest.json");
    REQUIRE(static_cast<bool>(is));
    nlohmann::ordered_json man;
    is >> man;
    return man;
}

// Runs the scenario described by `body` (out_dir appended here) and returns
// the output directory after the common manifest checks.
fs::path run_into(const std::string& dirname, const std::string& body,
                  const std::vector<std::string>& expect_files) {
    const fs::path dir = fresh_dir(dirname);
    ScenarioConfig cfg = ScenarioConfig::from_text(body + "\nout_dir = " + dir.string() + "\n");
    zkcyl::run_scenario(cfg);

    const auto man = load_manifest(dir);
    CHECK(man.at("version").get<std::string>() == zkcyl::version_string());
    CHECK(man.at("scenario").get<std::string>() == cfg.get("scenario", ""));
    CHECK(man.at("wall_clock_seconds").get<double>() >= 0.0);
    CHECK_FALSE(man.contains("error"));
    for (const auto& [k, v] : cfg.kv)
        CHECK(man.at("config").at(k).get<std::string>() == v);

    REQUIRE(man.at("files").size() == expect_files.size());
    for (std::size_t i = 0; i < expect_files.size(); ++i) {
        const auto& entry = man.at("files").at(i);
        CHECK(entry.at("name").get<std::string>() == expect_files[i]);
        CHECK(entry.at("bytes").get<std::uint64_t>() ==
              static_cast<std::uint64_t>(fs::file_size(dir / expect_files[i])));
        CHECK(entry.at("crc32").get<std::string>().size() == 8);
    }
    CHECK(zkcyl::verify_manifest(dir / "manifest.json").empty());
    return dir;
}

// Small, fast parameterizations of each scenario; values chosen so every
// validation gate passes and each run finishes in well under a second.
const char* kTinyConserve =
    "scenario = conserve\nLambda = 4\nlambda = 1\nmx = 64\nmy = 8\n"
    "dt = 0.01\ntend = 0.16\nsnap_every = 4\nN = 8\ns = 19/20\n";
const char* kTinySoliton =
    "scenario = soliton\nLambda = 16\nmx = 256\nmy = 8\n"
    "dt = 0.002\ntend = 0.04\nsnap_every = 10\nc = 1\n";
const char* kTinyIncrement =
    "scenario = increment\nLambda = 4\nlambda = 1\nmx = 64\nmy = 8\n"
    "dt = 0.01\ntend = 0.16\nsnap_every = 2\nN = 8\n";
const char* kTinyDrift =
    "scenario = drift_vs_N\nLambda = 1\nlambda = 1\nmx = 64\nmy = 16\n"
    "dt = 0.01\ntend = 0.1\nN_list = 4,8,16\ns = 0.95\nseed = 7\n";
const char* kTinyBilinear =
    "scenario = bilinear_suite\nLambda = 2\nlambda = 1\nmx = 32\nmy = 32\n"
    "mt = 32\nbands = 4,1,4,1;2,1,8,2\nseeds = 2\nseed = 3\n";
const char* kTinyCommutator =
    "scenario = commutator_suite\nLambda = 1\nlambda = 1\nmx = 32\nmy = 16\n"
    "mt = 16\nN_list = 4,8\nseeds = 1\nseed = 2\n";
const char* kTinyCounting = "scenario = counting_suite\ncases = 60\ngraph_cases = 12\nseed = 9\n";
const char* kTinyScaling =
    "scenario = scaling_suite\nLambda = 1\nlambda = 1\nmx = 64\nmy = 16\n"
    "N = 4\nlambda_list = 1,2,4\nseed = 5\n";
const char* kTinyGwp = "scenario = gwp_table\nhorizon = 2\ns = 19/20\n";

}  // namespace

// ---------------------------------------------------------------------------
// flat key = value parsing

TEST_CASE("config text parsing strips comments and whitespace") {
    const auto cfg = ScenarioConfig::from_text(
        "# leading comment\n"
        "  scenario = conserve  \n"
        "\n"
        "amp=0.5# inline comment\n"
        "bands = 4,1,4,1 ; 8,2,8,1\n"
        "note = a = b\n");
    CHECK(cfg.kv.size() == 4);
    CHECK(cfg.get("scenario", "") == "conserve");
    CHECK(cfg.get("amp", "") == "0.5");
    CHECK(cfg.get("bands", "") == "4,1,4,1 ; 8,2,8,1");
    // only the first '=' splits, so values may contain '='
    CHECK(cfg.get("note", "") == "a = b");
    CHECK(cfg.has("amp"));
    CHECK_FALSE(cfg.has("absent"));
    CHECK(ScenarioConfig::from_text("").kv.empty());
    CHECK(ScenarioConfig::from_text("# only comments\n\n  \n").kv.empty());
}

TEST_CASE("config text parsing rejects malformed lines") {
    CHECK(contains(thrown_message([] { ScenarioConfig::from_text("a = 1\nbroken line\n"); }),
                   "config line 2: expected 'key = value'"));
    CHECK(contains(thrown_message([] { ScenarioConfig::from_text(" = 3\n"); }),
                   "config line 1: empty key"));
    CHECK(contains(thrown_message([] { ScenarioConfig::from_text("a = 1\n\na = 2\n"); }),
                   "config line 3: duplicate key 'a'"));
    CHECK_THROWS_AS(ScenarioConfig::from_text("x\n"), ConfigError);
}

TEST_CASE("config getters convert values and report bad ones") {
    const auto cfg = ScenarioConfig::from_text(
        "num = 2.5e-3\nint = 42\nflag_y = yes\nflag_n = off\n"
        "list = 1, 2,4\nwords = b1, b3\nbad_num = abc\nbad_int = 4.5\n"
        "bad_flag = maybe\nbad_list = 1,,2\n");
    CHECK(cfg.get("missing", "dflt") == "dflt");
    CHECK(cfg.get_num("num", 0.0) == doctest::Approx(2.5e-3).epsilon(1e-15));
    CHECK(cfg.get_num("missing", 7.0) == 7.0);
    CHECK(cfg.get_int("int", 0) == 42);
    CHECK(cfg.get_int("missing", -3) == -3);
    CHECK(cfg.get_flag("flag_y", false));
    CHECK_FALSE(cfg.get_flag("flag_n", true));
    CHECK(cfg.get_flag("missing", true));
    CHECK(cfg.get_list("list", "") == std::vector<double>{1.0, 2.0, 4.0});
    CHECK(cfg.get_list("missing", "8,16") == std::vector<double>{8.0, 16.0});
    CHECK(cfg.get_words("words", "") == std::vector<std::string>{"b1", "b3"});
    CHECK(cfg.get_words("missing", "").empty());

    CHECK(contains(thrown_message([&] { cfg.get_num("bad_num", 0.0); }),
                   "key 'bad_num': expected a number, got 'abc'"));
    CHECK(contains(thrown_message([&] { cfg.get_int("bad_int", 0); }),
                   "key 'bad_int': expected an integer, got '4.5'"));
    CHECK(contains(thrown_message([&] { cfg.get_flag("bad_flag", false); }),
                   "key 'bad_flag': expected a boolean, got 'maybe'"));
    CHECK(contains(thrown_message([&] { cfg.get_list("bad_list", ""); }),
                   "key 'bad_list': empty list entry"));
    // trailing separator counts as an empty entry too
    const auto trail = ScenarioConfig::from_text("l = 1,2,\n");
    CHECK_THROWS_AS(trail.get_list("l", ""), ConfigError);
}

TEST_CASE("config files load through the same parser") {
    const fs::path dir = fresh_dir("cfg_files");
    {
        std::ofstream os(dir / "a.cfg");
        os << "scenario = gwp_table\nhorizon = 2\n";
    }
    const auto cfg = ScenarioConfig::from_file(dir / "a.cfg");
    CHECK(cfg.get("scenario", "") == "gwp_table");
    CHECK(cfg.get_num("horizon", 0.0) == 2.0);
    CHECK(contains(thrown_message([&] { ScenarioConfig::from_file(dir / "nope.cfg"); }),
                   "cannot read config file"));
}

// ---------------------------------------------------------------------------
// validation diagnostics

TEST_CASE("validation reports missing and unknown scenario names") {
    const auto none = zkcyl::validate_config(ScenarioConfig::from_text("amp = 1\n"));
    REQUIRE(none.size() == 1);
    CHECK(none[0] == "missing key 'scenario'");

    const auto unk = zkcyl::validate_config(ScenarioConfig::from_text("scenario = frobnicate\n"));
    REQUIRE(unk.size() == 1);
    CHECK(unk[0] ==
          "unknown scenario 'frobnicate' (known: bilinear_suite, commutator_suite, conserve, "
          "counting_suite, drift_vs_N, gwp_table, increment, scaling_suite, soliton)");
}

TEST_CASE("validation flags unknown keys and an empty out_dir") {
    const auto diags = zkcyl::validate_config(ScenarioConfig::from_text(
        "scenario = gwp_table\nhorizon = 2\nbogus_key = 1\nout_dir =\n"));
    REQUIRE(diags.size() == 2);
    CHECK(diags[0] == "unknown key 'bogus_key'");
    CHECK(diags[1] == "out_dir must not be empty");
}

TEST_CASE("validation dry-runs each scenario's argument checks") {
    auto one_diag = [](const std::string& text) {
        const auto diags = zkcyl::validate_config(ScenarioConfig::from_text(text));
        REQUIRE(diags.size() == 1);
        return diags[0];
    };
    // dyadic gate
    CHECK(contains(one_diag("scenario = conserve\nmx = 64\nmy = 8\nLambda = 4\n"
                            "dt = 0.01\ntend = 0.16\nsnap_every = 4\nN = 6\n"),
                   "dyadic"));
    // weighted Nyquist gate
    CHECK(contains(one_diag("scenario = conserve\nmx = 16\nmy = 8\nLambda = 4\n"
                            "dt = 0.01\ntend = 0.16\nsnap_every = 4\nN = 16\n"),
                   "exceeds the grid's weighted Nyquist band"));
    // snapshot stride must tile the run in multiples of four
    CHECK(contains(one_diag("scenario = conserve\nmx = 64\nmy = 8\nLambda = 4\n"
                            "dt = 0.01\ntend = 0.16\nsnap_every = 3\nN = 8\n"),
                   "snap_every must divide the step count with a multiple-of-4 quotient"));
    CHECK(contains(one_diag("scenario = conserve\nmx = 64\nmy = 8\nLambda = 4\n"
                            "dt = 0.01\ntend = 0.155\nsnap_every = 4\nN = 8\n"),
                   "tend must be an integer number of dt steps"));
    CHECK(contains(one_diag(std::string(kTinyConserve) + "scheme = verlet\n"),
                   "key 'scheme': expected etdrk4 or strang, got 'verlet'"));
    CHECK(contains(one_diag(std::string(kTinyBilinear) + "bands2 = x\n"), "unknown key"));
    CHECK(contains(one_diag("scenario = bilinear_suite\nbands = 1,2,3\n"),
                   "key 'bands': each config needs N1,L1,N2,L2"));
    CHECK(contains(one_diag("scenario = bilinear_suite\ntheta = 1\n"),
                   "key 'theta': must lie in (0,1)"));
    CHECK(contains(one_diag("scenario = gwp_table\ns = 29/31\n"),
                   "infeasible s = 29/31"));
    CHECK(contains(one_diag("scenario = gwp_table\ns_list =\n"),
                   "the sweep list must not be empty"));
    CHECK(contains(one_diag("scenario = gwp_table\nhorizon = 1\n"),
                   "key 'horizon': must exceed 1"));
}

TEST_CASE("tiny configs for every scenario validate cleanly") {
    for (const char* body :
         {kTinyConserve, kTinySoliton, kTinyIncrement, kTinyDrift, kTinyBilinear,
          kTinyCommutator, kTinyCounting, kTinyScaling, kTinyGwp}) {
        const auto diags = zkcyl::validate_config(ScenarioConfig::from_text(body));
        CAPTURE(body);
        CHECK(diags.empty());
    }
}

// ---------------------------------------------------------------------------
// end-to-end runs

TEST_CASE("conserve run emits a ledger, a summary, and snapshots") {
    const fs::path dir = run_into("run_conserve", kTinyConserve,
                                  {"ledger.csv", "conserve_summary.csv", "initial.snap",
                                   "final.snap"});
    const auto led = lines_of(slurp(dir / "ledger.csv"));
    REQUIRE(led.size() == 6);  // header + 5 snapshots
    CHECK(led[0] == "t,M,E,EI,inc3,inc4,cumulative_quadrature,mismatch");
    CHECK(lines_of(slurp(dir / "conserve_summary.csv"))[0] ==
          "max_mass_drift,max_energy_drift,final_reality_defect");

    // the stored initial state is the default bump profile, bit for bit
    CHECK(zkcyl::snapshot_kind((dir / "initial.snap").string()) == "spectral");
    const zkcyl::SpectralField got = zkcyl::read_spectral_snapshot((dir / "initial.snap").string());
    zkcyl::GridSpec g;
    g.Lambda = 4.0;
    g.lambda = 1.0;
    g.mx = 64;
    g.my = 8;
    g.dt = 0.01;
    const zkcyl::SpectralField want = zkcyl::bump_data(g, 0.5, 0.2, 11);
    REQUIRE(got.coeffs.size() == want.coeffs.size());
    for (std::size_t i = 0; i < want.coeffs.size(); ++i) CHECK(got.coeffs[i] == want.coeffs[i]);
}

TEST_CASE("soliton run tracks the traveling error per snapshot") {
    const fs::path dir = run_into("run_soliton", kTinySoliton,
                                  {"soliton.csv", "soliton_summary.csv", "initial.snap",
                                   "final.snap"});
    const auto rows = lines_of(slurp(dir / "soliton.csv"));
    REQUIRE(rows.size() == 4);  // header + t = 0, 0.02, 0.04
    CHECK(rows[0] == "t,l2_error,mass_drift,energy_drift");
    CHECK(rows[1].substr(0, 2) == "0,");
    CHECK(lines_of(slurp(dir / "soliton_summary.csv"))[0] ==
          "residual_l2,max_l2_error,final_l2_error");
}

TEST_CASE("increment run reports the fine and coarse mismatch") {
    const fs::path dir =
        run_into("run_increment", kTinyIncrement, {"ledger.csv", "increment_summary.csv"});
    const auto led = lines_of(slurp(dir / "ledger.csv"));
    REQUIRE(led.size() == 10);  // header + 9 snapshots
    const auto sm = lines_of(slurp(dir / "increment_summary.csv"));
    REQUIRE(sm.size() == 2);
    CHECK(sm[0] == "mismatch_fine,mismatch_coarse,shrink_factor");
    double fine = -1.0, coarse = -1.0, shrink = -1.0;
    REQUIRE(std::sscanf(sm[1].c_str(), "%lf,%lf,%lf", &fine, &coarse, &shrink) == 3);
    CHECK(fine >= 0.0);
    CHECK(coarse >= 0.0);
    CHECK(std::isfinite(shrink));
}

TEST_CASE("drift run sweeps the threshold list in order") {
    const fs::path dir = run_into("run_drift", kTinyDrift, {"drift.csv", "drift_fit.csv"});
    const auto rows = lines_of(slurp(dir / "drift.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "N,s,drift");
    CHECK(rows[1].substr(0, 2) == "4,");
    CHECK(rows[2].substr(0, 2) == "8,");
    CHECK(rows[3].substr(0, 3) == "16,");
    const auto fit = lines_of(slurp(dir / "drift_fit.csv"));
    REQUIRE(fit.size() == 2);
    CHECK(fit[0] == "slope,monotone");
}

TEST_CASE("bilinear run produces base and refined ratio tables") {
    const fs::path dir = run_into("run_bilinear", kTinyBilinear,
                                  {"ratios.csv", "ratios_refined.csv", "bilinear_summary.csv"});
    const auto base = lines_of(slurp(dir / "ratios.csv"));
    const auto refined = lines_of(slurp(dir / "ratios_refined.csv"));
    // config 1 runs b1,b3 only; config 2 separates the bands so b2,b4 join
    REQUIRE(base.size() == 1 + 2 * (2 + 4));
    REQUIRE(refined.size() == base.size());
    CHECK(base[0] == "estimate_id,N1,N2,L1,L2,K,theta,eps,seed,lhs,rhs,ratio,converged");
    for (std::size_t i = 1; i < base.size(); ++i) {
        CHECK(std::count(base[i].begin(), base[i].end(), ',') == 12);
        CHECK(base[i].substr(0, 1) == "b");
    }
    const auto sm = lines_of(slurp(dir / "bilinear_summary.csv"));
    REQUIRE(sm.size() == 1 + 6);  // one row per (config, estimate) pair
    CHECK(sm[0] == "config,estimate_id,max_ratio,max_ratio_refined,all_converged");
}

TEST_CASE("commutator run fits the decay across thresholds") {
    const fs::path dir = run_into("run_commutator", kTinyCommutator,
                                  {"commutator.csv", "commutator_fit.csv"});
    const auto rows = lines_of(slurp(dir / "commutator.csv"));
    REQUIRE(rows.size() == 1 + 2 * 1 * 4);  // 2 thresholds x 1 seed x 4 report rows
    CHECK(rows[0] == "estimate_id,N1,N2,L1,L2,K,theta,eps,seed,lhs,rhs,ratio,converged");
    const auto fit = lines_of(slurp(dir / "commutator_fit.csv"));
    REQUIRE(fit.size() == 3);
    CHECK(fit[0] == "probe,seed,slope,monotone");
    CHECK(fit[1].substr(0, 11) == "commutator,");
    CHECK(fit[2].substr(0, 8) == "quartic,");
}

TEST_CASE("counting run holds every sampled bound") {
    const fs::path dir = run_into("run_counting", kTinyCounting,
                                  {"counts.csv", "measure.csv", "counting_summary.csv"});
    const auto rows = lines_of(slurp(dir / "counts.csv"));
    REQUIRE(rows.size() == 61);
    CHECK(rows[0] == "a,b,c,lo,hi,lambda,count,bound");
    const auto sm = lines_of(slurp(dir / "counting_summary.csv"));
    REQUIRE(sm.size() == 2);
    CHECK(sm[0] ==
          "parabola_cases,parabola_violations,graph_cases,graph_violations,"
          "measure_cases,measure_violations");
    CHECK(sm[1] == "60,0,12,0,6,0");
}

TEST_CASE("scaling run reports exact L2 rescaling and a stable constant") {
    const fs::path dir = run_into("run_scaling", kTinyScaling,
                                  {"scaling.csv", "scaling_summary.csv"});
    const auto rows = lines_of(slurp(dir / "scaling.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "lam,l2,l2_defect,l2_alt_defect,grad_i,envelope,big_c");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double lam = 0, l2 = 0, d1 = -1, d2 = -1;
        REQUIRE(std::sscanf(rows[i].c_str(), "%lf,%lf,%lf,%lf", &lam, &l2, &d1, &d2) == 4);
        CHECK(d1 <= 1e-12 * l2);
        CHECK(d2 <= 1e-12 * l2);
    }
    const auto sm = lines_of(slurp(dir / "scaling_summary.csv"));
    REQUIRE(sm.size() == 2);
    CHECK(sm[0] == "c_min,c_max,spread");
}

TEST_CASE("gwp run tabulates the closure arithmetic exactly") {
    const fs::path dir = run_into("run_gwp", kTinyGwp, {"gwp.csv", "gwp_summary.csv"});
    const auto rows = lines_of(slurp(dir / "gwp.csv"));
    REQUIRE(rows.size() == 7);  // header + default six-entry sweep
    CHECK(rows[0] == "s,feasible,lambda_exponent,n_exponent,growth_exponent,n_of_t");
    CHECK(rows[1].substr(0, 7) == "9/10,0,");   // below the closure boundary
    CHECK(rows[2].substr(0, 8) == "29/31,0,");  // the boundary itself is excluded
    CHECK(rows[4].substr(0, 24) == "19/20,1,1/39,130/3,10/9,");
    const auto sm = lines_of(slurp(dir / "gwp_summary.csv"));
    REQUIRE(sm.size() == 2);
    CHECK(sm[0] == "s,horizon,s,feasible,lambda_exponent,n_exponent,growth_exponent,n_of_t");
    CHECK(sm[1].substr(0, 21) == "19/20,2,19/20,1,1/39,");
}

// ---------------------------------------------------------------------------
// determinism and integrity

TEST_CASE("reruns reproduce every output byte") {
    const fs::path a = run_into("rerun_a", kTinyCounting,
                                {"counts.csv", "measure.csv", "counting_summary.csv"});
    const fs::path b = run_into("rerun_b", kTinyCounting,
                                {"counts.csv", "measure.csv", "counting_summary.csv"});
    CHECK(slurp(a / "counts.csv") == slurp(b / "counts.csv"));
    CHECK(slurp(a / "measure.csv") == slurp(b / "measure.csv"));
}

TEST_CASE("the worker count cannot influence sweep output") {
    const fs::path a = run_into("jobs_1", kTinyBilinear,
                                {"ratios.csv", "ratios_refined.csv", "bilinear_summary.csv"});
    const fs::path b = run_into("jobs_4", std::string(kTinyBilinear) + "jobs = 4\n",
                                {"ratios.csv", "ratios_refined.csv", "bilinear_summary.csv"});
    CHECK(slurp(a / "ratios.csv") == slurp(b / "ratios.csv"));
    CHECK(slurp(a / "ratios_refined.csv") == slurp(b / "ratios_refined.csv"));
    CHECK(slurp(a / "bilinear_summary.csv") == slurp(b / "bilinear_summary.csv"));
}

TEST_CASE("manifest verification detects tampering") {
    const fs::path dir = run_into("tamper", kTinyGwp, {"gwp.csv", "gwp_summary.csv"});

    // flip one byte in place: size matches, checksum does not
    std::string text = slurp(dir / "gwp.csv");
    text[text.size() - 2] = text[text.size() - 2] == '9' ? '8' : '9';
    {
        std::ofstream os(dir / "gwp.csv", std::ios::binary);
        os << text;
    }
    auto bad = zkcyl::verify_manifest(dir / "manifest.json");
    REQUIRE(bad.size() == 1);
    CHECK(contains(bad[0], "gwp.csv: crc32"));

    // grow the file: reported as a size mismatch
    {
        std::ofstream os(dir / "gwp.csv", std::ios::binary | std::ios::app);
        os << "tail\n";
    }
    bad = zkcyl::verify_manifest(dir / "manifest.json");
    REQUIRE(bad.size() == 1);
    CHECK(contains(bad[0], "gwp.csv: size"));

    fs::remove(dir / "gwp.csv");
    bad = zkcyl::verify_manifest(dir / "manifest.json");
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == "gwp.csv: missing");

    CHECK_THROWS_AS(zkcyl::verify_manifest(dir / "absent.json"), std::runtime_error);
}

TEST_CASE("run_scenario joins validation failures into one error") {
    ScenarioConfig cfg = ScenarioConfig::from_text(
        "scenario = conserve\nmx = 64\nmy = 8\nLambda = 4\ndt = 0.01\n"
        "tend = 0.16\nsnap_every = 4\nN = 6\nbogus = 1\n");
    const std::string msg = thrown_message([&] { zkcyl::run_scenario(cfg); });
    CHECK(contains(msg, "unknown key 'bogus'"));
    CHECK(contains(msg, "; "));
    CHECK(contains(msg, "dyadic"));
}

TEST_CASE("a blow-up still leaves an inventoried manifest behind") {
    const fs::path dir = fresh_dir("blowup");
    ScenarioConfig cfg = ScenarioConfig::from_text(
        "scenario = conserve\nLambda = 1\nlambda = 1\nmx = 32\nmy = 8\n"
        "dt = 10\ntend = 160\nsnap_every = 4\nN = 4\nscheme = strang\n"
        "data = random\namp = 1e6\nout_dir = " +
        dir.string() + "\n");
    CHECK(zkcyl::validate_config(cfg).empty());
    CHECK_THROWS_AS(zkcyl::run_scenario(cfg), zkcyl::BlowupError);
    const auto man = load_manifest(dir);
    CHECK(man.contains("error"));
    CHECK_FALSE(man.at("error").get<std::string>().empty());
    CHECK(man.at("files").empty());  // nothing was emitted before the failure
}

// ---------------------------------------------------------------------------
// command line front end

#ifdef ZKCYL_CLI_PATH

namespace {

int cli(const std::string& args, const fs::path& capture) {
    const std::string cmd =
        std::string(ZKCYL_CLI_PATH) + " " + args + " >" + capture.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("cli exit codes separate config problems from numerical ones") {
    const fs::path dir = fresh_dir("cli");
    const fs::path log = dir / "log.txt";

    CHECK(cli("version", log) == 0);
    CHECK(contains(slurp(log), "zkcyl " + std::string(zkcyl::version_string())));

    {
        std::ofstream os(dir / "good.cfg");
        os << kTinyGwp;
    }
    CHECK(cli("validate " + (dir / "good.cfg").string(), log) == 0);
    CHECK(contains(slurp(log), "ok: "));

    {
        std::ofstream os(dir / "bad.cfg");
        os << "scenario = conserve\nN = 6\n";
    }
    CHECK(cli("validate " + (dir / "bad.cfg").string(), log) == 2);
    CHECK(contains(slurp(log), "config error: "));
    CHECK(cli("run " + (dir / "bad.cfg").string(), log) == 2);
    CHECK(cli("run " + (dir / "missing.cfg").string(), log) == 2);
    CHECK(cli("frobnicate", log) == 2);
    CHECK(cli("run", log) == 2);  // the config argument is required

    const fs::path out = dir / "gwp_out";
    CHECK(cli("run " + (dir / "good.cfg").string() + " --out " + out.string(), log) == 0);
    CHECK(contains(slurp(log), "wrote "));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(zkcyl::verify_manifest(out / "manifest.json").empty());

    {
        std::ofstream os(dir / "blow.cfg");
        os << "scenario = conserve\nLambda = 1\nlambda = 1\nmx = 32\nmy = 8\n"
              "dt = 10\ntend = 160\nsnap_every = 4\nN = 4\nscheme = strang\n"
              "data = random\namp = 1e6\nout_dir = "
           << (dir / "blow_out").string() << "\n";
    }
    CHECK(cli("run " + (dir / "blow.cfg").string(), log) == 3);
    CHECK(contains(slurp(log), "numerical failure: "));

    {
        std::ofstream os(dir / "jobs.cfg");
        os << kTinyCounting;
    }
    CHECK(cli("run " + (dir / "jobs.cfg").string() + " --jobs 2 --out " +
                  (dir / "count_out").string(),
              log) == 0);
    const auto man = load_manifest(dir / "count_out");
    CHECK(man.at("config").at("jobs").get<std::string>() == "2");
}

#endif  // ZKCYL_CLI_PATH
