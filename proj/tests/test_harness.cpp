#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "suptrap/atomtrap.hpp"
#include "suptrap/harness.hpp"
#include "suptrap/io.hpp"

using namespace suptrap;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() /
                         ("suptrap_test_" + std::to_string(::getpid()) + "_" + tag +
                          "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

harness::ExperimentConfig parse_or_die(const std::string& text) {
    const auto result = harness::parse_config(text);
    REQUIRE_MESSAGE(result.ok(), "config must parse");
    return *result.config;
}

const char* kAtomConfig = R"({
  "seed": 123,
  "atom": {
    "model": {"kind": "projective_events", "lambda": 0.15},
    "n_cycles": 12,
    "n_atoms": 2000
  }
})";

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("atom run writes the promised artifacts") {
    const fs::path dir = fresh_dir("atom");
    const auto cfg = parse_or_die(kAtomConfig);
    const auto out = harness::run("atom", cfg, dir);

    CHECK(fs::exists(dir / "atom_series.csv"));
    CHECK(fs::exists(dir / "atom_summary.json"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(out.artifacts.size() == 3);

    const auto table = io::read_csv(io::read_file(dir / "atom_series.csv"));
    CHECK(table.columns ==
          std::vector<std::string>{"cycle", "removed", "remaining", "events",
                                   "expected_removed"});
    CHECK(table.rows.size() == 12);
    fs::remove_all(dir);
}

TEST_CASE("atom run with no collapse leaves an all-zero removal column") {
    const fs::path dir = fresh_dir("atom_none");
    const auto cfg = parse_or_die(R"({"atom": {"n_cycles": 8, "n_atoms": 500}})");
    harness::run("atom", cfg, dir);
    const auto table = io::read_csv(io::read_file(dir / "atom_series.csv"));
    const auto removed = table.column_index("removed");
    for (const auto& row : table.rows) CHECK(row[removed] == "0");
    fs::remove_all(dir);
}

TEST_CASE("same seed twice produces byte-identical artifacts") {
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    const auto cfg = parse_or_die(kAtomConfig);
    harness::run("atom", cfg, a);
    harness::run("atom", cfg, b);
    for (const char* name : {"atom_series.csv", "atom_summary.json", "manifest.json"})
        CHECK(io::read_file(a / name) == io::read_file(b / name));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("manifest checksums match the artifacts on disk") {
    const fs::path dir = fresh_dir("manifest");
    const auto cfg = parse_or_die(kAtomConfig);
    harness::run("atom", cfg, dir);

    const auto manifest =
        nlohmann::json::parse(io::read_file(dir / "manifest.json"));
    CHECK(manifest["seed"] == 123);
    CHECK(manifest["subcommand"] == "atom");
    CHECK(manifest["config"]["atom"]["n_atoms"] == 2000);
    REQUIRE(manifest["artifacts"].size() == 2);
    for (const auto& entry : manifest["artifacts"]) {
        const std::string path = entry["path"];
        const std::string recomputed = io::sha256_hex(io::read_file(dir / path));
        CHECK(entry["sha256"] == recomputed);
    }
    fs::remove_all(dir);
}

TEST_CASE("estimate on a manifest-listed artifact reproduces itself exactly") {
    const fs::path dir = fresh_dir("estimate");
    const auto cfg = parse_or_die(kAtomConfig);
    harness::run("atom", cfg, dir);

    const std::string estimate_config = R"({
      "estimate": {"input": ")" + (dir / "atom_series.csv").string() + R"(",
                    "kind": "atom", "eta": 1.0}
    })";
    const fs::path e1 = fresh_dir("estimate_run1");
    const fs::path e2 = fresh_dir("estimate_run2");
    const auto ecfg = parse_or_die(estimate_config);
    harness::run("estimate", ecfg, e1);
    harness::run("estimate", ecfg, e2);
    CHECK(io::read_file(e1 / "estimate.json") == io::read_file(e2 / "estimate.json"));

    const auto est = nlohmann::json::parse(io::read_file(e1 / "estimate.json"));
    CHECK(est["q_hat"].get<double>() > 0.0);
    CHECK(est["n_samples"].get<long>() > 0);
    fs::remove_all(dir);
    fs::remove_all(e1);
    fs::remove_all(e2);
}

TEST_CASE("optical run emits the pass histogram") {
    const fs::path dir = fresh_dir("optical");
    const auto cfg = parse_or_die(R"({
      "seed": 5,
      "optical": {"model": {"kind": "projective_events", "lambda": 0.3},
                   "max_passes": 40, "n_photons": 3000}
    })");
    harness::run("optical", cfg, dir);
    const auto table = io::read_csv(io::read_file(dir / "optical_series.csv"));
    CHECK(table.columns == std::vector<std::string>{"pass", "escapes_D1",
                                                    "escapes_D2", "survivors"});
    CHECK(table.rows.size() == 40);
    fs::remove_all(dir);
}

TEST_CASE("json format emits row objects instead of csv") {
    const fs::path dir = fresh_dir("json_fmt");
    const auto cfg = parse_or_die(
        R"({"format": "json", "atom": {"n_cycles": 3, "n_atoms": 50}})");
    harness::run("atom", cfg, dir);
    CHECK(fs::exists(dir / "atom_series.json"));
    const auto rows = nlohmann::json::parse(io::read_file(dir / "atom_series.json"));
    REQUIRE(rows.is_array());
    CHECK(rows.size() == 3);
    CHECK(rows[0].contains("cycle"));
    CHECK(rows[0].contains("removed"));
    fs::remove_all(dir);
}

TEST_CASE("bubble run records the trace schema") {
    const fs::path dir = fresh_dir("bubble");
    const auto cfg = parse_or_die(R"({
      "bubble": {"grid": {"x_min": 0.0, "length": 1.0, "n_points": 129},
                 "state": {"type": "box_superposition", "modes": [2, 4]},
                 "boundary": {"a": 0.0, "b": 0.5},
                 "dt": 1e-4, "n_steps": 20}
    })");
    harness::run("bubble", cfg, dir);
    const auto table = io::read_csv(io::read_file(dir / "bubble_trace.csv"));
    CHECK(table.columns ==
          std::vector<std::string>{"step", "time", "enclosed_probability",
                                   "boundary_current_max", "norm"});
    CHECK(table.rows.size() == 21);  // initial sample plus one per step
    fs::remove_all(dir);
}

TEST_CASE("pathsum run reports the study errors") {
    const fs::path dir = fresh_dir("pathsum");
    const auto cfg = parse_or_die(R"({"pathsum": {"instances": 20}})");
    harness::run("pathsum", cfg, dir);
    const auto report =
        nlohmann::json::parse(io::read_file(dir / "pathsum_report.json"));
    CHECK(report["instances"] == 20);
    CHECK(report["max_factorization_error"].get<double>() <= 1e-12);
    CHECK(report["max_screening_deviation"].get<double>() <= 1e-10);
    fs::remove_all(dir);
}

TEST_CASE("sweep produces per-point artifacts and a summary") {
    const fs::path dir = fresh_dir("sweep");
    const auto cfg = parse_or_die(R"({
      "seed": 77,
      "sweep": {"target": "atom", "parameter": "model.lambda",
                "values": [0.05, 0.1, 0.2],
                "base": {"model": {"kind": "projective_events", "lambda": 0.0},
                         "n_cycles": 10, "n_atoms": 1000}}
    })");
    harness::run("sweep", cfg, dir);

    for (const char* point : {"point_000", "point_001", "point_002"}) {
        CHECK(fs::exists(dir / point / "atom_series.csv"));
        CHECK(fs::exists(dir / point / "manifest.json"));
    }
    const auto summary = io::read_csv(io::read_file(dir / "sweep_summary.csv"));
    CHECK(summary.rows.size() == 3);
    const auto value_col = summary.column_index("value");
    CHECK(summary.rows[2][value_col] == "0.2");

    // larger collapse rate leaks faster
    const auto q_col = summary.column_index("q_hat");
    CHECK(std::stod(summary.rows[2][q_col]) > std::stod(summary.rows[0][q_col]));
    fs::remove_all(dir);
}

TEST_CASE("sweep over an optical parameter fits each point") {
    const fs::path dir = fresh_dir("sweep_opt");
    const auto cfg = parse_or_die(R"({
      "seed": 31,
      "sweep": {"target": "optical", "parameter": "model.gamma",
                "values": [0.1, 0.4],
                "base": {"model": {"kind": "dephasing", "gamma": 0.0},
                         "max_passes": 80, "n_photons": 2000}}
    })");
    harness::run("sweep", cfg, dir);
    const auto summary = io::read_csv(io::read_file(dir / "sweep_summary.csv"));
    REQUIRE(summary.rows.size() == 2);
    const auto q_col = summary.column_index("q_hat");
    CHECK(std::stod(summary.rows[1][q_col]) > std::stod(summary.rows[0][q_col]));
    fs::remove_all(dir);
}

TEST_CASE("missing config block is a runtime error") {
    const fs::path dir = fresh_dir("missing");
    const auto cfg = parse_or_die(R"({"atom": {}})");
    CHECK_THROWS_AS(harness::run("optical", cfg, dir), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("worker count does not change any counts") {
    auto run_with_threads = [](const char* n) {
        setenv("SUPTRAP_THREADS", n, 1);
        atomtrap::AtomTrapConfig cfg;
        cfg.model = collapse::CollapseModel::projective_events(0.2);
        cfg.n_cycles = 15;
        cfg.seed = 99;
        const auto series = atomtrap::run_protocol(cfg, 4'000);
        unsetenv("SUPTRAP_THREADS");
        return series;
    };
    const auto one = run_with_threads("1");
    const auto four = run_with_threads("4");
    REQUIRE(one.records.size() == four.records.size());
    for (std::size_t k = 0; k < one.records.size(); ++k) {
        CHECK(one.records[k].n_removed == four.records[k].n_removed);
        CHECK(one.records[k].n_collapse_events == four.records[k].n_collapse_events);
    }
}

TEST_CASE("atomic writes leave no temporaries behind") {
    const fs::path dir = fresh_dir("atomic");
    io::write_file_atomic(dir / "artifact.csv", "a,b\n1,2\n");
    CHECK(io::read_file(dir / "artifact.csv") == "a,b\n1,2\n");
    int entries = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        ++entries;
        CHECK(entry.path().extension() != ".tmp");
    }
    CHECK(entries == 1);
    fs::remove_all(dir);
}

TEST_SUITE_END();
