// Command line front end: run a scenario config, validate one, or print the
// library version.  Exit codes: 0 success, 2 configuration problem, 3
// numerical failure (blow-up or non-convergence).

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "zkcyl/dynamics.hpp"
#include "zkcyl/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

int do_run(const std::string& config_path, int jobs, const std::string& out_dir) {
    zkcyl::ScenarioConfig cfg;
    try {
        cfg = zkcyl::ScenarioConfig::from_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
    if (jobs > 0) cfg.kv["jobs"] = std::to_string(jobs);
    if (!out_dir.empty()) cfg.kv["out_dir"] = out_dir;
    try {
        zkcyl::run_scenario(cfg);
    } catch (const zkcyl::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const zkcyl::BlowupError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalError;
    }
    std::printf("wrote %s/manifest.json\n", cfg.get("out_dir", "out").c_str());
    return kOk;
}

int do_validate(const std::string& config_path) {
    zkcyl::ScenarioConfig cfg;
    try {
        cfg = zkcyl::ScenarioConfig::from_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
    const auto diags = zkcyl::validate_config(cfg);
    if (diags.empty()) {
        std::printf("ok: %s\n", config_path.c_str());
        return kOk;
    }
    for (const auto& d : diags) std::fprintf(stderr, "config error: %s\n", d.c_str());
    return kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cylinder dispersive-flow workbench"};
    app.require_subcommand(1);

    std::string run_config, out_dir;
    int jobs = 0;
    auto* run = app.add_subcommand("run", "execute a scenario config");
    run->add_option("config", run_config, "flat key = value config file")->required();
    run->add_option("--jobs", jobs, "worker threads for sweep scenarios");
    run->add_option("--out", out_dir, "override the output directory");

    std::string val_config;
    auto* validate = app.add_subcommand("validate", "diagnose a config without running it");
    validate->add_option("config", val_config, "flat key = value config file")->required();

    auto* version = app.add_subcommand("version", "print the library version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (run->parsed()) return do_run(run_config, jobs, out_dir);
    if (validate->parsed()) return do_validate(val_config);
    if (version->parsed()) {
        std::printf("zkcyl %s\n", zkcyl::version_string());
        return kOk;
    }
    return kConfigError;
}
