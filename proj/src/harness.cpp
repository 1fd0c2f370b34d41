#include "suptrap/harness.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "suptrap/inference.hpp"
#include "suptrap/io.hpp"
#include "suptrap/parallel.hpp"
#include "suptrap/pathsum.hpp"

#ifndef SUPTRAP_BUILD_ID
#define SUPTRAP_BUILD_ID "dev"
#endif

namespace suptrap::harness {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string build_id() { return SUPTRAP_BUILD_ID; }

namespace {

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

// Tabular artifact that can be emitted as CSV or as a JSON array of rows.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const {
        io::CsvWriter w(columns);
        for (const auto& row : rows) w.add_row(row);
        return w.str();
    }

    std::string to_json() const {
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json obj;
            for (std::size_t i = 0; i < columns.size(); ++i) {
                // keep numerics as numbers where they parse cleanly
                try {
                    std::size_t used = 0;
                    const double x = std::stod(row[i], &used);
                    if (used == row[i].size()) {
                        if (row[i].find_first_of(".eE") == std::string::npos)
                            obj[columns[i]] = std::stol(row[i]);
                        else
                            obj[columns[i]] = x;
                        continue;
                    }
                } catch (...) {
                }
                obj[columns[i]] = row[i];
            }
            arr.push_back(obj);
        }
        return dump_json(arr);
    }
};

class ArtifactSink {
public:
    ArtifactSink(fs::path out_dir, OutputFormat format)
        : out_dir_(std::move(out_dir)), format_(format) {}

    // Writes the table in the configured format; returns the relative path.
    fs::path write_table(const std::string& stem, const Table& table) {
        const bool json = format_ == OutputFormat::Json;
        const fs::path rel = stem + (json ? ".json" : ".csv");
        write(rel, json ? table.to_json() : table.to_csv());
        return rel;
    }

    fs::path write_json(const std::string& name, const ordered_json& j) {
        const fs::path rel = name;
        write(rel, dump_json(j));
        return rel;
    }

    void write(const fs::path& rel, const std::string& content) {
        io::write_file_atomic(out_dir_ / rel, content);
        artifacts_.push_back(rel);
    }

    // Adds an already-written file (e.g. from a nested run) to the manifest.
    void register_artifact(const fs::path& rel) { artifacts_.push_back(rel); }

    const std::vector<fs::path>& artifacts() const { return artifacts_; }

    void write_manifest(const std::string& subcommand,
                        const ExperimentConfig& config) {
        ordered_json manifest;
        manifest["tool"] = kToolName;
        manifest["version"] = kToolVersion;
        manifest["build"] = build_id();
        manifest["subcommand"] = subcommand;
        manifest["seed"] = config.seed;
        manifest["config"] = config_echo(config);
        ordered_json arts = ordered_json::array();
        for (const auto& rel : artifacts_) {
            ordered_json entry;
            entry["path"] = rel.generic_string();
            entry["sha256"] = io::sha256_hex(io::read_file(out_dir_ / rel));
            arts.push_back(entry);
        }
        manifest["artifacts"] = arts;
        io::write_file_atomic(out_dir_ / "manifest.json", dump_json(manifest));
        artifacts_.emplace_back("manifest.json");
    }

private:
    fs::path out_dir_;
    OutputFormat format_;
    std::vector<fs::path> artifacts_;
};

std::string fmt(double x) { return io::format_double(x); }
std::string fmt(long x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

ordered_json estimate_json(const inference::RateEstimate& est) {
    ordered_json j;
    j["q_hat"] = est.q_hat;
    j["p_hat"] = est.p_hat;
    j["lambda_hat"] = est.lambda_hat;
    j["ci_low"] = est.ci_low;
    j["ci_high"] = est.ci_high;
    j["p_ci_low"] = est.p_ci_low;
    j["p_ci_high"] = est.p_ci_high;
    j["lambda_ci_low"] = est.lambda_ci_low;
    j["lambda_ci_high"] = est.lambda_ci_high;
    j["log_likelihood"] = est.log_likelihood;
    j["n_samples"] = est.n_samples;
    j["confidence"] = est.confidence;
    j["p_clipped"] = est.p_clipped;
    return j;
}

Table atom_series_table(const atomtrap::LeakageSeries& series) {
    Table t;
    t.columns = {"cycle", "removed", "remaining", "events", "expected_removed"};
    const double p = series.config.per_cycle_collapse_probability();
    for (const auto& rec : series.records) {
        const double expected =
            atomtrap::expected_leakage(p, static_cast<double>(series.n_atoms0),
                                       rec.cycle, series.config.push_efficiency);
        t.rows.push_back({fmt(rec.cycle), fmt(rec.n_removed), fmt(rec.n_remaining),
                          fmt(rec.n_collapse_events), fmt(expected)});
    }
    return t;
}

Table optical_series_table(const optical::LeakageSeries& series) {
    Table t;
    t.columns = {"pass", "escapes_D1", "escapes_D2", "survivors"};
    for (int k = 0; k < series.max_passes; ++k)
        t.rows.push_back({fmt(k + 1), fmt(series.escapes_d1[k]),
                          fmt(series.escapes_d2[k]), fmt(series.survivors_after[k])});
    return t;
}

void run_bubble(const ExperimentConfig& config, ArtifactSink& sink) {
    const BubbleConfig& cfg = *config.bubble;
    const auto psi0 = cfg.state.build(cfg.grid, cfg.mass);
    const auto v = wavefield::Potential::zero(cfg.grid);
    const auto trace =
        wavefield::bubble_trace(psi0, v, cfg.boundary, cfg.dt, cfg.n_steps);

    Table t;
    t.columns = {"step", "time", "enclosed_probability", "boundary_current_max",
                 "norm"};
    for (std::size_t i = 0; i < trace.steps.size(); ++i)
        t.rows.push_back({fmt(trace.steps[i]), fmt(trace.times[i]),
                          fmt(trace.enclosed[i]), fmt(trace.boundary_current_max[i]),
                          fmt(trace.norms[i])});
    sink.write_table("bubble_trace", t);
}

void run_pathsum(const ExperimentConfig& config, ArtifactSink& sink) {
    const PathsumConfig& cfg = *config.pathsum;
    RngStream rng(config.seed, 0);
    const auto report =
        pathsum::run_study(cfg.instances, cfg.max_sites, cfg.max_steps, rng);
    ordered_json j;
    j["instances"] = report.instances;
    j["max_factorization_error"] = report.max_factorization_error;
    j["max_decomposition_error"] = report.max_decomposition_error;
    j["max_propagation_error"] = report.max_propagation_error;
    j["max_screening_deviation"] = report.max_screening_deviation;
    sink.write_json("pathsum_report.json", j);
}

void run_optical(const ExperimentConfig& config, ArtifactSink& sink) {
    OpticalRunConfig cfg = *config.optical;
    cfg.trap.seed = config.seed;
    const auto series =
        optical::simulate_ensemble(cfg.trap, cfg.n_photons, RngStream(config.seed, 0));
    sink.write_table("optical_series", optical_series_table(series));

    ordered_json summary;
    summary["seed"] = config.seed;
    summary["n_photons"] = series.n_photons;
    summary["escaped_D1"] = series.total_escaped_d1;
    summary["escaped_D2"] = series.total_escaped_d2;
    summary["survivors"] = series.survivors;
    summary["absorbed"] = series.absorbed;
    summary["collapse_events"] = series.total_collapse_events;
    summary["config"] = config_echo(config)["optical"];
    sink.write_json("optical_summary.json", summary);
}

void run_atom(const ExperimentConfig& config, ArtifactSink& sink) {
    AtomRunConfig cfg = *config.atom;
    cfg.trap.seed = config.seed;
    const auto series = atomtrap::run_protocol(cfg.trap, cfg.n_atoms);
    sink.write_table("atom_series", atom_series_table(series));

    long events = 0;
    for (const auto& rec : series.records) events += rec.n_collapse_events;
    ordered_json summary;
    summary["seed"] = config.seed;
    summary["n_atoms"] = series.n_atoms0;
    summary["n_cycles"] = cfg.trap.n_cycles;
    summary["total_removed"] = series.total_removed;
    summary["survivors"] = series.survivors;
    summary["collapse_events"] = events;
    summary["per_cycle_collapse_probability"] =
        cfg.trap.per_cycle_collapse_probability();
    summary["config"] = config_echo(config)["atom"];
    sink.write_json("atom_summary.json", summary);
}

atomtrap::LeakageSeries atom_series_from_rows(
    const std::vector<std::array<long, 4>>& rows, double cycle_duration) {
    atomtrap::LeakageSeries series;
    series.config.cycle_duration = cycle_duration;
    if (rows.empty()) throw std::runtime_error("estimate: empty atom series");
    series.n_atoms0 = rows.front()[1] + rows.front()[2];
    long removed_total = 0;
    for (const auto& r : rows) {
        atomtrap::CycleRecord rec;
        rec.cycle = static_cast<int>(r[0]);
        rec.n_removed = r[1];
        rec.n_remaining = r[2];
        rec.n_collapse_events = r[3];
        removed_total += rec.n_removed;
        series.records.push_back(rec);
    }
    series.total_removed = removed_total;
    series.survivors = series.records.back().n_remaining;
    return series;
}

std::vector<std::vector<std::string>> load_rows(const fs::path& input,
                                                const std::vector<std::string>& columns) {
    const std::string text = io::read_file(input);
    std::vector<std::vector<std::string>> out;
    if (input.extension() == ".json") {
        const ordered_json rows = ordered_json::parse(text);
        if (!rows.is_array()) throw std::runtime_error("estimate: input is not a row array");
        for (const auto& row : rows) {
            std::vector<std::string> cells;
            for (const auto& c : columns) {
                if (!row.contains(c))
                    throw std::runtime_error("estimate: input rows lack column " + c);
                cells.push_back(row[c].dump());
            }
            out.push_back(std::move(cells));
        }
    } else {
        const io::CsvTable table = io::read_csv(text);
        std::vector<std::size_t> idx;
        for (const auto& c : columns) idx.push_back(table.column_index(c));
        for (std::size_t rws = 0; rws < table.rows.size(); ++rws) {
            std::vector<std::string> cells;
            for (std::size_t k : idx) cells.push_back(table.rows[rws][k]);
            out.push_back(std::move(cells));
        }
    }
    return out;
}

inference::RateEstimate estimate_from_config(const EstimateConfig& cfg) {
    inference::EstimateOptions opts;
    opts.confidence = cfg.confidence;
    opts.eta = cfg.eta;
    opts.cycle_duration = cfg.cycle_duration;
    opts.profile_likelihood = cfg.profile_likelihood;

    if (cfg.kind == "atom") {
        const auto raw = load_rows(cfg.input, {"cycle", "removed", "remaining", "events"});
        std::vector<std::array<long, 4>> rows;
        for (const auto& cells : raw)
            rows.push_back({std::stol(cells[0]), std::stol(cells[1]),
                            std::stol(cells[2]), std::stol(cells[3])});
        const auto series = atom_series_from_rows(rows, cfg.cycle_duration);
        return inference::binomial_mle(series, cfg.eta, opts);
    }

    const auto raw = load_rows(cfg.input, {"pass", "escapes_D1", "escapes_D2", "survivors"});
    optical::LeakageSeries series;
    series.max_passes = static_cast<int>(raw.size());
    for (const auto& cells : raw) {
        series.escapes_d1.push_back(std::stol(cells[1]));
        series.escapes_d2.push_back(std::stol(cells[2]));
        series.survivors_after.push_back(std::stol(cells[3]));
        series.total_escaped_d1 += series.escapes_d1.back();
        series.total_escaped_d2 += series.escapes_d2.back();
    }
    if (raw.empty()) throw std::runtime_error("estimate: empty optical series");
    series.survivors = series.survivors_after.back();
    series.n_photons = series.total_escaped_d1 + series.total_escaped_d2 + series.survivors;
    return inference::geometric_mle_from_optical(series, opts);
}

void run_estimate(const ExperimentConfig& config, ArtifactSink& sink) {
    const EstimateConfig& cfg = *config.estimate;
    const auto est = estimate_from_config(cfg);
    ordered_json j = estimate_json(est);
    j["input"] = cfg.input;
    j["kind"] = cfg.kind;
    j["eta"] = cfg.eta;
    j["cycle_duration"] = cfg.cycle_duration;
    sink.write_json("estimate.json", j);
}

void run_sweep(const ExperimentConfig& config, ArtifactSink& sink,
               const fs::path& out_dir) {
    const SweepConfig& cfg = *config.sweep;

    // dotted-path patch into a copy of the base block
    auto patched_block = [&](double value) {
        ordered_json block = cfg.base;
        ordered_json* node = &block;
        std::string rest = cfg.parameter;
        while (true) {
            const auto dot = rest.find('.');
            const std::string key = rest.substr(0, dot);
            if (dot == std::string::npos) {
                (*node)[key] = value;
                break;
            }
            if (!node->contains(key)) (*node)[key] = ordered_json::object();
            node = &(*node)[key];
            rest = rest.substr(dot + 1);
        }
        return block;
    };

    struct Point {
        inference::RateEstimate estimate;
        std::vector<fs::path> artifacts;
    };

    auto run_point = [&](long i) {
        ordered_json root;
        root["seed"] = mix_seed(config.seed, static_cast<std::uint64_t>(i) + 1);
        root["format"] = to_string(config.format);
        root[cfg.target] = patched_block(cfg.values[static_cast<std::size_t>(i)]);
        const ParseResult parsed = parse_config(root.dump());
        if (!parsed.ok()) {
            std::string msg = "sweep point " + std::to_string(i) + " invalid:";
            for (const auto& e : parsed.errors) msg += "\n  " + e;
            throw std::runtime_error(msg);
        }

        char dirname[32];
        std::snprintf(dirname, sizeof(dirname), "point_%03ld", i);
        const fs::path point_dir = fs::path(dirname);
        const RunOutput out = run(cfg.target, *parsed.config, out_dir / point_dir);

        Point point;
        for (const auto& rel : out.artifacts) point.artifacts.push_back(point_dir / rel);

        // fit the point's own artifact, exactly as a standalone estimate would
        EstimateConfig ecfg;
        ecfg.kind = cfg.target;
        const char* stem = cfg.target == "atom" ? "atom_series" : "optical_series";
        const char* ext = config.format == OutputFormat::Json ? ".json" : ".csv";
        ecfg.input = (out_dir / point_dir / (std::string(stem) + ext)).string();
        if (cfg.target == "atom") {
            ecfg.eta = parsed.config->atom->trap.push_efficiency > 0
                           ? parsed.config->atom->trap.push_efficiency
                           : 1.0;
            ecfg.cycle_duration = parsed.config->atom->trap.cycle_duration;
        } else {
            ecfg.cycle_duration = parsed.config->optical->trap.pass_duration;
        }
        point.estimate = estimate_from_config(ecfg);
        return point;
    };

    // parallel across points, never within a point
    const long n = static_cast<long>(cfg.values.size());
    std::vector<Point> points(static_cast<std::size_t>(n));
    parallel_map_chunks<int>(n, [&](long begin, long end) {
        for (long i = begin; i < end; ++i)
            points[static_cast<std::size_t>(i)] = run_point(i);
        return 0;
    });

    Table summary;
    summary.columns = {"index", "value", "q_hat", "p_hat", "lambda_hat",
                       "ci_low", "ci_high", "n_samples"};
    for (long i = 0; i < n; ++i) {
        const auto& est = points[static_cast<std::size_t>(i)].estimate;
        summary.rows.push_back({fmt(i), fmt(cfg.values[static_cast<std::size_t>(i)]),
                                fmt(est.q_hat), fmt(est.p_hat), fmt(est.lambda_hat),
                                fmt(est.ci_low), fmt(est.ci_high),
                                fmt(est.n_samples)});
    }
    for (const auto& p : points)
        for (const auto& rel : p.artifacts) sink.register_artifact(rel);
    sink.write_table("sweep_summary", summary);
}

}  // namespace

RunOutput run(const std::string& subcommand, const ExperimentConfig& config,
              const fs::path& out_dir) {
    fs::create_directories(out_dir);
    ArtifactSink sink(out_dir, config.format);

    auto missing = [&](const char* block) {
        throw std::runtime_error(std::string("config has no \"") + block +
                                 "\" block for subcommand " + subcommand);
    };

    if (subcommand == "bubble") {
        if (!config.bubble) missing("bubble");
        run_bubble(config, sink);
    } else if (subcommand == "pathsum") {
        if (!config.pathsum) missing("pathsum");
        run_pathsum(config, sink);
    } else if (subcommand == "optical") {
        if (!config.optical) missing("optical");
        run_optical(config, sink);
    } else if (subcommand == "atom") {
        if (!config.atom) missing("atom");
        run_atom(config, sink);
    } else if (subcommand == "estimate") {
        if (!config.estimate) missing("estimate");
        run_estimate(config, sink);
    } else if (subcommand == "sweep") {
        if (!config.sweep) missing("sweep");
        run_sweep(config, sink, out_dir);
    } else {
        throw std::runtime_error("unknown subcommand: " + subcommand);
    }

    sink.write_manifest(subcommand, config);
    RunOutput out;
    out.artifacts = sink.artifacts();
    return out;
}

}  // namespace suptrap::harness
