#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "suptrap/atomtrap.hpp"
#include "suptrap/optical.hpp"
#include "suptrap/wavefield.hpp"

namespace suptrap::harness {

enum class OutputFormat { Csv, Json };

std::string to_string(OutputFormat format);

struct StateSpec {
    enum class Type { BoxEigenstate, BoxSuperposition, Gaussian, Hydrogen2s };
    Type type = Type::BoxEigenstate;
    int n = 1;                    // box eigenstate index
    std::vector<int> modes;       // superposition
    std::vector<double> weights;
    double x0 = 0.0, sigma = 1.0, k0 = 0.0;  // gaussian

    wavefield::GridWavefunction build(const wavefield::Grid1D& grid,
                                      double mass) const;
};

struct BubbleConfig {
    wavefield::Grid1D grid;
    double mass = 1.0;
    StateSpec state;
    wavefield::BubbleBoundary boundary;
    double dt = 1e-4;
    int n_steps = 100;
};

struct PathsumConfig {
    int instances = 200;
    int max_sites = 4;
    int max_steps = 8;
};

struct OpticalRunConfig {
    optical::OpticalTrapConfig trap;
    long n_photons = 1000;
};

struct AtomRunConfig {
    atomtrap::AtomTrapConfig trap;
    long n_atoms = 1000;
};

struct EstimateConfig {
    std::string input;          // path of an atom/optical series artifact
    std::string kind = "atom";  // "atom" | "optical"
    double eta = 1.0;
    double confidence = 0.95;
    bool profile_likelihood = false;
    double cycle_duration = 1.0;  // pass duration for optical inputs
};

struct SweepConfig {
    std::string target = "atom";  // "atom" | "optical"
    std::string parameter;        // dotted path into the target block
    std::vector<double> values;
    nlohmann::ordered_json base;  // the target block to patch per point
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    OutputFormat format = OutputFormat::Csv;
    std::optional<BubbleConfig> bubble;
    std::optional<PathsumConfig> pathsum;
    std::optional<OpticalRunConfig> optical;
    std::optional<AtomRunConfig> atom;
    std::optional<EstimateConfig> estimate;
    std::optional<SweepConfig> sweep;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty() && config.has_value(); }
};

// Parses and fully validates a JSON config. Collects every error (with a
// path-qualified message) instead of stopping at the first one; unknown keys
// are rejected.
ParseResult parse_config(const std::string& text);

// Normalized echo of a parsed config (defaults filled in).
nlohmann::ordered_json config_echo(const ExperimentConfig& config);

}  // namespace suptrap::harness
