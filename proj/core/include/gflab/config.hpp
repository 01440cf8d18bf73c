#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "gflab/experiments.hpp"

namespace gflab {

/// One run of the laboratory: a shared numeric profile plus the scenario
/// list. `echo` is the canonical JSON of the effective configuration and is
/// embedded in the manifest.
struct RunConfig {
    LabSettings lab;
    std::vector<ScenarioSpec> scenarios;
    std::string output_dir = "gflab-out";
    bool plots = false;
    std::string echo;
};

/// Parses and validates a configuration file. Schema violations throw
/// ConfigError with the offending field path; scenario hypothesis
/// violations throw HypothesisError.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

} // namespace gflab
