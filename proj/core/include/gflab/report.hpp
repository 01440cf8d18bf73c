#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gflab/experiments.hpp"

namespace gflab {

/// FNV-1a content digest, printed as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);
std::string digest_file(const std::filesystem::path& path);

/// Fixed CSV schema:
///   scenario,epsilon,region_or_cell,alpha,norm_kind,norm_value,fit_slope,fit_r2,verdict
/// Numbers are written with %.17g so identical runs emit identical bytes.
std::string csv_text(const std::vector<EvidenceRow>& rows);

/// Write-then-rename; the target directory is created when missing.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

/// Log-log norm-vs-epsilon lines for every (region_or_cell, norm_kind)
/// series with at least two positive points.
std::string scenario_svg(const ScenarioResult& result);

struct BundleEntry {
    std::string name;
    std::string digest;
};

struct ManifestScenario {
    std::string id;
    std::string verdict; // pass / fail / error
    std::string error;
    double runtime_ms = 0.0;
    std::vector<std::pair<std::string, double>> key_orders;
    std::vector<std::string> notes;
    std::vector<BundleEntry> files;
};

/// Writes per-scenario CSV tables (and SVG plots when requested) plus
/// manifest.json; returns the manifest entries.
struct ReportBundle {
    std::filesystem::path directory;
    bool all_pass = true;
    std::vector<ManifestScenario> scenarios;
};

ReportBundle write_bundle(const std::filesystem::path& dir,
                          const std::vector<ScenarioResult>& results,
                          const std::vector<std::string>& errors, // parallel to results, "" = ok
                          const std::string& config_echo_json, bool plots);

/// Reads a bundle back, verifying every listed digest. Throws ConfigError
/// on missing or tampered files.
struct LoadedManifest {
    bool all_pass = false;
    std::string config_echo;
    std::vector<ManifestScenario> scenarios;
};

LoadedManifest load_bundle(const std::filesystem::path& dir);

} // namespace gflab
