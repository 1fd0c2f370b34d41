#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "suptrap/config.hpp"

namespace suptrap::harness {

inline constexpr const char* kToolName = "suptrap";
inline constexpr const char* kToolVersion = "0.1.0";

// Build identifier injected by the build system.
std::string build_id();

// exit code 0 = success, 1 = validation error, 2 = runtime error
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct RunOutput {
    std::vector<std::filesystem::path> artifacts;  // relative to out_dir
};

// Executes one subcommand pipeline, writing artifacts (atomically) plus a
// manifest.json with the config echo, seed, build id and per-artifact
// checksums. Requires the matching config block; throws on runtime errors.
RunOutput run(const std::string& subcommand, const ExperimentConfig& config,
              const std::filesystem::path& out_dir);

}  // namespace suptrap::harness
