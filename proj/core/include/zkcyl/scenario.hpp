#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace zkcyl {

const char* version_string();

// Configuration problems (malformed file, unknown scenario, inconsistent
// parameters).  The command line maps these to exit code 2; numerical
// failures (BlowupError, non-convergence) map to exit code 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat "key = value" configuration.  '#' starts a comment, blank lines are
// skipped, later duplicates of a key are rejected.  Missing keys fall back to
// per-scenario defaults; the command line can override out_dir and jobs.
struct ScenarioConfig {
    std::map<std::string, std::string> kv;

    static ScenarioConfig from_file(const std::filesystem::path& path);
    static ScenarioConfig from_text(const std::string& text);

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_num(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_flag(const std::string& key, bool fallback) const;
    // comma-separated values; the fallback is parsed the same way
    std::vector<double> get_list(const std::string& key, const std::string& fallback) const;
    std::vector<std::string> get_words(const std::string& key, const std::string& fallback) const;
};

// Side-effect-free diagnostics; empty means runnable.  Flags unknown keys and
// scenarios, malformed values, bad grids, thresholds beyond the grid's
// weighted Nyquist band, infeasible regularity for the growth table, and
// inconsistent sweep lists.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

// Runs the configured scenario, writing its CSV / snapshot outputs plus a
// manifest.json (config echo, version, wall clock, size and crc32 per file)
// under out_dir.  Throws ConfigError when validation fails.
void run_scenario(const ScenarioConfig& cfg);

// Recomputes size and crc32 of every file listed in a manifest; returns
// mismatch descriptions (empty when the tree is intact).
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace zkcyl
