#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "suptrap/harness.hpp"
#include "suptrap/io.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string format;
};

int run_subcommand(const std::string& name, const CliOptions& opts) {
    using namespace suptrap;

    std::string text;
    try {
        text = io::read_file(opts.config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return harness::kExitValidation;
    }

    harness::ParseResult parsed = harness::parse_config(text);
    if (!parsed.ok()) {
        std::cerr << "invalid config " << opts.config_path << ":\n";
        for (const auto& err : parsed.errors) std::cerr << "  " << err << "\n";
        return harness::kExitValidation;
    }

    harness::ExperimentConfig config = *parsed.config;
    if (opts.seed_set) config.seed = opts.seed;
    if (!opts.format.empty())
        config.format = opts.format == "json" ? harness::OutputFormat::Json
                                              : harness::OutputFormat::Csv;

    try {
        const auto out = harness::run(name, config, opts.out_dir);
        for (const auto& rel : out.artifacts)
            std::cout << (std::filesystem::path(opts.out_dir) / rel).string() << "\n";
        return harness::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return harness::kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"superposition-trap simulation and analysis toolkit"};
    app.set_version_flag("--version", std::string(suptrap::harness::kToolVersion) +
                                          " (" + suptrap::harness::build_id() + ")");
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subcommands = {
        {"bubble", "grid-state null-boundary trace"},
        {"pathsum", "lattice path-sum factorization and screening report"},
        {"optical", "optical loop trap ensemble"},
        {"atom", "strontium-style pulse-sequence trap ensemble"},
        {"estimate", "fit escape rates from a series artifact"},
        {"sweep", "run a parameter sweep of atom/optical ensembles"},
    };

    std::map<std::string, CliOptions> options;
    for (const auto& [name, description] : subcommands) {
        CLI::App* sub = app.add_subcommand(name, description);
        CliOptions& opt = options[name];
        sub->add_option("--config", opt.config_path, "JSON config file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory (default: .)");
        sub->add_option("--seed", opt.seed, "override the config seed")
            ->each([&opt](const std::string&) { opt.seed_set = true; });
        sub->add_option("--format", opt.format, "artifact format")
            ->check(CLI::IsMember({"csv", "json"}));
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, description] : subcommands)
        if (app.got_subcommand(name)) return run_subcommand(name, options[name]);
    return suptrap::harness::kExitValidation;
}
