#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "suptrap/inference.hpp"

using namespace suptrap;
using inference::EstimateOptions;
using inference::RateEstimate;

namespace {

// Independent sampler: escape cycle ~ Geometric(q) via inversion.
long sample_geometric(double q, RngStream& rng) {
    return 1 + static_cast<long>(std::floor(std::log(1.0 - rng.uniform()) /
                                            std::log(1.0 - q)));
}

// Builds a leakage series distributed exactly like the trap protocol with
// per-cycle escape probability q: every atom's escape cycle is iid geometric,
// censored at n_cycles.
atomtrap::LeakageSeries synthetic_series(double q, long n_atoms, int n_cycles,
                                         RngStream& rng) {
    std::vector<long> removed(static_cast<std::size_t>(n_cycles), 0);
    for (long i = 0; i < n_atoms; ++i) {
        const long k = sample_geometric(q, rng);
        if (k <= n_cycles) ++removed[static_cast<std::size_t>(k - 1)];
    }
    atomtrap::LeakageSeries series;
    series.n_atoms0 = n_atoms;
    series.config.cycle_duration = 1.0;
    long remaining = n_atoms;
    for (int k = 0; k < n_cycles; ++k) {
        remaining -= removed[static_cast<std::size_t>(k)];
        series.records.push_back(
            {k + 1, removed[static_cast<std::size_t>(k)], remaining, 0});
        series.total_removed += removed[static_cast<std::size_t>(k)];
    }
    series.survivors = remaining;
    return series;
}

}  // namespace

TEST_SUITE_BEGIN("inference");

TEST_CASE("normal quantile matches tabulated values") {
    CHECK(std::abs(inference::normal_quantile(0.975) - 1.959963985) < 1e-7);
    CHECK(std::abs(inference::normal_quantile(0.5)) < 1e-12);
    CHECK(std::abs(inference::normal_quantile(0.841344746) - 1.0) < 1e-6);
}

TEST_CASE("geometric mle closed forms") {
    const auto boundary = inference::geometric_mle({1, 1, 1, 1}, 0, 0);
    CHECK(boundary.q_hat == doctest::Approx(1.0));

    const auto half = inference::geometric_mle({2, 2, 2, 2}, 0, 0);
    CHECK(half.q_hat == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(half.ci_low <= half.q_hat);
    CHECK(half.ci_high >= half.q_hat);

    CHECK_THROWS_WITH_AS(inference::geometric_mle({}, 0, 0), "no events",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(inference::geometric_mle({}, 100, 50), "no events",
                         std::invalid_argument);
}

TEST_CASE("censored bisection agrees with the closed form") {
    RngStream rng(3, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double q = 0.02 + 0.3 * rng.uniform();
        const int max_cycle = 20;
        std::vector<long> escapes;
        long censored = 0;
        for (int i = 0; i < 2000; ++i) {
            const long k = sample_geometric(q, rng);
            if (k <= max_cycle)
                escapes.push_back(k);
            else
                ++censored;
        }
        if (escapes.empty()) continue;
        const auto est = inference::geometric_mle(escapes, censored, max_cycle);

        long sum_k = 0;
        for (long k : escapes) sum_k += k;
        const double closed =
            static_cast<double>(escapes.size()) /
            static_cast<double>(sum_k + censored * max_cycle);
        CHECK(std::abs(est.q_hat - closed) < 1e-10);
    }
}

TEST_CASE("geometric mle: coverage of the 95% interval") {
    const double q_true = 0.05;
    const int reps = 500;
    const int n = 10'000;
    int covered = 0;
    double worst_err = 0.0;
    RngStream rng(7, 0);
    for (int r = 0; r < reps; ++r) {
        std::vector<long> escapes(n);
        for (int i = 0; i < n; ++i) escapes[static_cast<std::size_t>(i)] =
            sample_geometric(q_true, rng);
        const auto est = inference::geometric_mle(escapes, 0, 0);
        if (est.ci_low <= q_true && q_true <= est.ci_high) ++covered;
        worst_err = std::max(worst_err, std::abs(est.q_hat - q_true));
        // 4 half-widths ~ 4 standard errors
        CHECK(std::abs(est.q_hat - q_true) < 2.0 * (est.ci_high - est.ci_low));
    }
    const double coverage = covered / static_cast<double>(reps);
    CHECK(coverage > 0.92);
    CHECK(coverage < 0.98);
}

TEST_CASE("profile-likelihood interval also covers") {
    EstimateOptions opts;
    opts.profile_likelihood = true;
    const double q_true = 0.2;
    RngStream rng(11, 0);
    int covered = 0;
    const int reps = 300;
    for (int r = 0; r < reps; ++r) {
        std::vector<long> escapes(300);
        for (auto& k : escapes) k = sample_geometric(q_true, rng);
        const auto est = inference::geometric_mle(escapes, 0, 0, opts);
        if (est.ci_low <= q_true && q_true <= est.ci_high) ++covered;
    }
    CHECK(covered / static_cast<double>(reps) > 0.90);
}

TEST_CASE("permuting the escape cycles leaves the fit bit-identical") {
    RngStream rng(13, 0);
    std::vector<long> escapes(1000);
    for (auto& k : escapes) k = sample_geometric(0.1, rng);
    const auto before = inference::geometric_mle(escapes, 25, 60);

    std::mt19937_64 shuffler(99);
    std::shuffle(escapes.begin(), escapes.end(), shuffler);
    const auto after = inference::geometric_mle(escapes, 25, 60);

    CHECK(before.q_hat == after.q_hat);
    CHECK(before.ci_low == after.ci_low);
    CHECK(before.ci_high == after.ci_high);
    CHECK(before.lambda_hat == after.lambda_hat);
}

TEST_CASE("binomial mle: zero removals give a zero estimate") {
    atomtrap::LeakageSeries series;
    series.n_atoms0 = 5000;
    series.config.cycle_duration = 1.0;
    for (int k = 1; k <= 10; ++k) series.records.push_back({k, 0, 5000, 0});
    const auto est = inference::binomial_mle(series, 1.0);
    CHECK(est.q_hat == 0.0);
    CHECK(est.p_hat == 0.0);
    CHECK(est.lambda_hat == 0.0);
    CHECK(est.ci_high > 0.0);
}

TEST_CASE("binomial mle: coverage at protocol-sized statistics") {
    const double p_true = 0.1;
    const double q_true = p_true / 2.0;
    const int reps = 200;
    int covered = 0;
    RngStream rng(17, 0);
    for (int r = 0; r < reps; ++r) {
        const auto series = synthetic_series(q_true, 100'000, 50, rng);
        const auto est = inference::binomial_mle(series, 1.0);
        if (est.p_ci_low <= p_true && p_true <= est.p_ci_high) ++covered;
        CHECK(std::abs(est.p_hat - p_true) < 0.01);
    }
    const double coverage = covered / static_cast<double>(reps);
    CHECK(coverage > 0.92);
    CHECK(coverage < 0.98);
}

TEST_CASE("halving eta doubles the collapse-probability estimate") {
    RngStream rng(19, 0);
    const auto series = synthetic_series(0.04, 50'000, 40, rng);
    const auto full = inference::binomial_mle(series, 1.0);
    const auto half = inference::binomial_mle(series, 0.5);
    CHECK(full.q_hat == half.q_hat);
    CHECK(half.p_hat == doctest::Approx(2.0 * full.p_hat).epsilon(1e-12));
}

TEST_CASE("p is clipped when 2q/eta exceeds one") {
    atomtrap::LeakageSeries series;
    series.n_atoms0 = 10;
    series.config.cycle_duration = 1.0;
    series.records.push_back({1, 9, 1, 0});
    const auto est = inference::binomial_mle(series, 1.0);
    CHECK(est.p_clipped);
    CHECK(est.p_hat == 1.0);
}

TEST_CASE("rate conversion and its inverse") {
    CHECK(inference::rate_from_percycle(0.0, 1.0) == 0.0);
    CHECK(std::abs(inference::rate_from_percycle(-std::expm1(-2.0), 1.0) - 2.0) <
          1e-12);

    for (double lambda : {0.01, 0.3, 2.5}) {
        for (double tau : {0.5, 1.0, 3.0}) {
            const double p = -std::expm1(-lambda * tau);
            CHECK(std::abs(inference::rate_from_percycle(p, tau) - lambda) < 1e-12);
        }
    }

    CHECK_THROWS_WITH_AS(inference::rate_from_percycle(1.0, 1.0), "rate unbounded",
                         std::invalid_argument);
    CHECK_THROWS_AS(inference::rate_from_percycle(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("optical series feed the geometric fit") {
    optical::LeakageSeries series;
    series.max_passes = 3;
    series.n_photons = 10;
    series.escapes_d1 = {2, 1, 0};
    series.escapes_d2 = {1, 1, 1};
    series.survivors_after = {7, 5, 4};
    series.survivors = 4;
    series.total_escaped_d1 = 3;
    series.total_escaped_d2 = 3;

    const auto est = inference::geometric_mle_from_optical(series);
    // escapes at passes {1,1,1,2,2,3}, 4 censored at 3:
    // q = 6 / (10 + 12) = 3/11
    CHECK(est.q_hat == doctest::Approx(6.0 / 22.0).epsilon(1e-9));
    CHECK(est.n_samples == 10);
}

TEST_SUITE_END();
