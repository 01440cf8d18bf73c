// Command line front end: validates configurations, runs scenario suites
// and prints verdict tables from previously written bundles.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gflab/config.hpp"
#include "gflab/errors.hpp"
#include "gflab/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

int do_validate(const std::string& config_path) {
    try {
        const auto cfg = gflab::parse_config(config_path);
        std::printf("config ok: %zu scenario(s), output_dir '%s'\n", cfg.scenarios.size(),
                    cfg.output_dir.c_str());
        return kExitPass;
    } catch (const gflab::Error& e) {
        std::fprintf(stderr, "invalid config: %s\n", e.what());
        return kExitError;
    }
}

int do_run(const std::string& config_path, bool plots_flag) {
    gflab::RunConfig cfg;
    try {
        cfg = gflab::parse_config(config_path);
    } catch (const gflab::Error& e) {
        std::fprintf(stderr, "invalid config: %s\n", e.what());
        return kExitError;
    }
    if (plots_flag) cfg.plots = true;
    // the output directory is the one setting an environment may override
    if (const char* env = std::getenv("GFLAB_OUTPUT_DIR"); env && *env) cfg.output_dir = env;

    std::vector<gflab::ScenarioResult> results(cfg.scenarios.size());
    std::vector<std::string> errors(cfg.scenarios.size());
    bool any_error = false;
    for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
        const auto& spec = cfg.scenarios[i];
        std::printf("running %-26s ...", gflab::to_string(spec.id).c_str());
        std::fflush(stdout);
        try {
            results[i] = gflab::run_scenario(spec);
            std::printf(" %s (%.1f s)\n", results[i].pass ? "pass" : "FAIL",
                        results[i].runtime_ms / 1000.0);
        } catch (const gflab::Error& e) {
            results[i].id = spec.id;
            results[i].spec = spec;
            errors[i] = e.what();
            any_error = true;
            std::printf(" ERROR: %s\n", e.what());
        }
    }

    try {
        const auto bundle =
            gflab::write_bundle(cfg.output_dir, results, errors, cfg.echo, cfg.plots);
        std::printf("bundle written to %s (%zu scenario table(s))\n",
                    bundle.directory.string().c_str(), bundle.scenarios.size());
        if (any_error) return kExitError;
        return bundle.all_pass ? kExitPass : kExitFail;
    } catch (const gflab::Error& e) {
        std::fprintf(stderr, "cannot write bundle: %s\n", e.what());
        return kExitError;
    }
}

int do_report(const std::string& dir) {
    try {
        const auto m = gflab::load_bundle(dir);
        std::printf("%-26s %-7s %10s  key orders\n", "scenario", "verdict", "runtime");
        for (const auto& s : m.scenarios) {
            std::string orders;
            for (const auto& [k, v] : s.key_orders) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%s=%.3g ", k.c_str(), v);
                orders += buf;
            }
            std::printf("%-26s %-7s %8.1f s  %s\n", s.id.c_str(), s.verdict.c_str(),
                        s.runtime_ms / 1000.0, orders.c_str());
            if (!s.error.empty()) std::printf("    error: %s\n", s.error.c_str());
            for (const auto& n : s.notes) std::printf("    note: %s\n", n.c_str());
        }
        std::printf("overall: %s\n", m.all_pass ? "pass" : "fail");
        return m.all_pass ? kExitPass : kExitFail;
    } catch (const gflab::Error& e) {
        std::fprintf(stderr, "cannot read bundle: %s\n", e.what());
        return kExitError;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"epsilon-family laboratory for singular wave data"};
    app.require_subcommand(1);

    std::string config_path, report_dir;
    bool plots = false;

    auto* run = app.add_subcommand("run", "execute the scenarios of a config file");
    run->add_option("config", config_path, "JSON configuration")->required();
    run->add_flag("--plots", plots, "also write SVG plots");

    auto* validate = app.add_subcommand("validate", "schema-check a config file");
    validate->add_option("config", config_path, "JSON configuration")->required();

    auto* report = app.add_subcommand("report", "print the verdict table of a bundle");
    report->add_option("dir", report_dir, "bundle directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return do_run(config_path, plots);
    if (validate->parsed()) return do_validate(config_path);
    return do_report(report_dir);
}
