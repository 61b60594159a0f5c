#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "treelab/experiments.hpp"

namespace treelab::app {

enum ExitCode : int { kSuccess = 0, kCheckFailed = 1, kConfigError = 2 };

struct RunManifest {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string started;   // ISO 8601, UTC
    std::string finished;
    std::string artifact_version;
    std::vector<std::string> outputs;  // file names relative to the output directory
    double wall_time_seconds = 0.0;
    bool checks_passed = true;
    std::string experiment;
};

struct DispatchResult {
    RunManifest manifest;
    int exit_code = kSuccess;
    std::string summary;
};

const char* artifact_version() noexcept;

// Runs cfg.experiment and writes its CSV/JSON files plus manifest.json into
// out_dir (created if missing). Throws IoError when out_dir is not usable;
// numerical errors propagate.
DispatchResult dispatch(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                        const std::string& config_digest);

std::string manifest_json(const RunManifest& m);

// Whole command line: --config, --out, --seed, --threads. Returns the exit code.
int run_cli(int argc, char** argv);

}  // namespace treelab::app
