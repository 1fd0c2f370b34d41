#include <doctest.h>

#include <algorithm>

#include "suptrap/config.hpp"

using namespace suptrap;
using harness::parse_config;

namespace {

bool any_error_contains(const std::vector<std::string>& errors,
                        const std::string& needle) {
    return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) {
        return e.find(needle) != std::string::npos;
    });
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal atom config fills in the documented defaults") {
    const auto result = parse_config(R"({"atom": {}})");
    REQUIRE(result.ok());
    const auto& cfg = *result.config;
    CHECK(cfg.seed == 1);
    CHECK(cfg.format == harness::OutputFormat::Csv);
    REQUIRE(cfg.atom.has_value());
    CHECK(cfg.atom->trap.model.kind == collapse::ModelKind::None);
    CHECK(cfg.atom->trap.cycle_duration == 1.0);
    CHECK(cfg.atom->trap.n_cycles == 10);
    CHECK(cfg.atom->trap.push_efficiency == 1.0);
    CHECK(cfg.atom->trap.pulse_fidelity == 1.0);
    CHECK(cfg.atom->trap.excited_loss == 0.0);
    CHECK(cfg.atom->n_atoms == 1000);
}

TEST_CASE("out-of-range value reports the field and the legal range") {
    const auto result =
        parse_config(R"({"atom": {"push_efficiency": 1.5}})");
    CHECK_FALSE(result.ok());
    REQUIRE(result.errors.size() == 1);
    CHECK(any_error_contains(result.errors, "atom.push_efficiency"));
    CHECK(any_error_contains(result.errors, "[0, 1]"));
    CHECK(any_error_contains(result.errors, "1.5"));
}

TEST_CASE("all errors are reported in one pass") {
    const auto result = parse_config(
        R"({"atom": {"push_efficiency": 2.0, "n_cycles": 0},
            "optical": {"pass_duration": -1.0}})");
    CHECK_FALSE(result.ok());
    CHECK(result.errors.size() == 3);
    CHECK(any_error_contains(result.errors, "atom.push_efficiency"));
    CHECK(any_error_contains(result.errors, "atom.n_cycles"));
    CHECK(any_error_contains(result.errors, "optical.pass_duration"));
}

TEST_CASE("unknown keys are rejected, with their path") {
    const auto result = parse_config(R"({"atom": {"push_eff": 0.5}})");
    CHECK_FALSE(result.ok());
    CHECK(any_error_contains(result.errors, "atom.push_eff"));
    CHECK(any_error_contains(result.errors, "unknown key"));

    const auto top = parse_config(R"({"seeed": 3, "atom": {}})");
    CHECK_FALSE(top.ok());
    CHECK(any_error_contains(top.errors, "seeed"));
}

TEST_CASE("invalid JSON is a single clear error") {
    const auto result = parse_config("{not json");
    CHECK_FALSE(result.ok());
    REQUIRE(result.errors.size() == 1);
    CHECK(any_error_contains(result.errors, "invalid JSON"));
}

TEST_CASE("model block selects the channel kind") {
    const auto result = parse_config(
        R"({"atom": {"model": {"kind": "projective_events", "lambda": 0.25}}})");
    REQUIRE(result.ok());
    CHECK(result.config->atom->trap.model.kind ==
          collapse::ModelKind::ProjectiveEvents);
    CHECK(result.config->atom->trap.model.lambda == 0.25);

    const auto csl = parse_config(
        R"({"optical": {"model": {"kind": "csl_like", "lambda0": 0.1,
                                   "mass_factor": 2.0, "sep_factor": 0.5}}})");
    REQUIRE(csl.ok());
    CHECK(csl.config->optical->trap.model.event_rate() == doctest::Approx(0.1));

    const auto bad = parse_config(R"({"atom": {"model": {"kind": "grw"}}})");
    CHECK_FALSE(bad.ok());
    CHECK(any_error_contains(bad.errors, "atom.model.kind"));
}

TEST_CASE("missing required fields are reported") {
    const auto result = parse_config(
        R"({"estimate": {"kind": "atom"}})");
    CHECK_FALSE(result.ok());
    CHECK(any_error_contains(result.errors, "estimate.input"));
    CHECK(any_error_contains(result.errors, "missing required field"));
}

TEST_CASE("bubble grid wants exactly one of dx or length") {
    const auto both = parse_config(
        R"({"bubble": {"grid": {"x_min": 0, "dx": 0.1, "length": 1.0, "n_points": 64},
                       "state": {"type": "box_eigenstate", "n": 2},
                       "boundary": {"a": 0.0, "b": 0.5},
                       "dt": 1e-4, "n_steps": 10}})");
    CHECK_FALSE(both.ok());
    CHECK(any_error_contains(both.errors, "exactly one of dx or length"));

    const auto ok = parse_config(
        R"({"bubble": {"grid": {"x_min": 0, "length": 1.0, "n_points": 65},
                       "state": {"type": "box_superposition", "modes": [2, 4]},
                       "boundary": {"a": 0.0, "b": 0.5},
                       "dt": 1e-4, "n_steps": 10}})");
    REQUIRE(ok.ok());
    CHECK(ok.config->bubble->grid.dx == doctest::Approx(1.0 / 64.0));
    // weights default to equal
    CHECK(ok.config->bubble->state.weights == std::vector<double>{1.0, 1.0});
}

TEST_CASE("boundary outside the grid is caught") {
    const auto result = parse_config(
        R"({"bubble": {"grid": {"x_min": 0, "length": 1.0, "n_points": 65},
                       "state": {"type": "box_eigenstate", "n": 2},
                       "boundary": {"a": 0.0, "b": 1.5},
                       "dt": 1e-4, "n_steps": 10}})");
    CHECK_FALSE(result.ok());
    CHECK(any_error_contains(result.errors, "bubble.boundary"));
}

TEST_CASE("sweep config validates its base block") {
    const auto result = parse_config(
        R"({"sweep": {"target": "atom", "parameter": "model.lambda",
                      "values": [0.1, 0.2],
                      "base": {"model": {"kind": "projective_events", "lambda": 0.0},
                               "n_cycles": 5, "n_atoms": 100}}})");
    REQUIRE(result.ok());
    CHECK(result.config->sweep->values.size() == 2);

    const auto bad = parse_config(
        R"({"sweep": {"target": "atom", "parameter": "model.lambda",
                      "values": [0.1],
                      "base": {"n_cycles": 0}}})");
    CHECK_FALSE(bad.ok());
    CHECK(any_error_contains(bad.errors, "sweep.base.n_cycles"));
}

TEST_CASE("config echo round-trips through the parser") {
    const auto result = parse_config(
        R"({"seed": 9, "format": "json",
            "atom": {"model": {"kind": "dephasing", "gamma": 0.3}, "n_atoms": 50}})");
    REQUIRE(result.ok());
    const auto echo = harness::config_echo(*result.config);
    const auto reparsed = parse_config(echo.dump());
    REQUIRE(reparsed.ok());
    CHECK(reparsed.config->seed == 9);
    CHECK(reparsed.config->format == harness::OutputFormat::Json);
    CHECK(reparsed.config->atom->trap.model.gamma == 0.3);
    CHECK(reparsed.config->atom->n_atoms == 50);
    CHECK(harness::config_echo(*reparsed.config) == echo);
}

TEST_SUITE_END();
