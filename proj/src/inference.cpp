#include "suptrap/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace suptrap::inference {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Log-likelihood of q for n escapes with `failures` accumulated no-escape
// cycles (sum of (k_i - 1) plus censored exposure).
double geometric_loglik(double q, double n, double failures) {
    double ll = 0.0;
    if (n > 0) ll += n * std::log(q);
    if (failures > 0) ll += failures * std::log1p(-q);
    return ll;
}

// Two-sided profile-likelihood interval around q_hat.
std::pair<double, double> profile_interval(double q_hat, double n, double failures,
                                           double confidence) {
    const double z = normal_quantile(0.5 + confidence / 2.0);
    const double target = geometric_loglik(q_hat, n, failures) - 0.5 * z * z;
    auto below = [&](double q) { return geometric_loglik(q, n, failures) < target; };

    const double eps = 1e-15;
    double lo = q_hat, hi = q_hat;
    // lower edge
    {
        double a = eps, b = q_hat;
        if (!below(a)) {
            lo = 0.0;
        } else {
            for (int i = 0; i < 200; ++i) {
                const double m = 0.5 * (a + b);
                (below(m) ? a : b) = m;
            }
            lo = 0.5 * (a + b);
        }
    }
    // upper edge
    {
        double a = q_hat, b = 1.0 - eps;
        if (!below(b)) {
            hi = 1.0;
        } else {
            for (int i = 0; i < 200; ++i) {
                const double m = 0.5 * (a + b);
                (below(m) ? b : a) = m;
            }
            hi = 0.5 * (a + b);
        }
    }
    return {lo, hi};
}

RateEstimate finish_estimate(double q_hat, double n, double failures,
                             long n_samples, const EstimateOptions& options) {
    RateEstimate est;
    est.q_hat = q_hat;
    est.n_samples = n_samples;
    est.confidence = options.confidence;
    est.log_likelihood = geometric_loglik(std::clamp(q_hat, 1e-300, 1.0), n, failures);

    const bool at_boundary = q_hat <= 1e-12 || q_hat >= 1.0 - 1e-12;
    if (options.profile_likelihood || at_boundary) {
        auto [lo, hi] = profile_interval(std::clamp(q_hat, 1e-12, 1.0 - 1e-12),
                                         n, failures, options.confidence);
        est.ci_low = lo;
        est.ci_high = hi;
    } else {
        // observed Fisher information of the censored-geometric likelihood
        const double info = n / (q_hat * q_hat) + failures / ((1.0 - q_hat) * (1.0 - q_hat));
        const double z = normal_quantile(0.5 + options.confidence / 2.0);
        const double se = 1.0 / std::sqrt(info);
        est.ci_low = clamp01(q_hat - z * se);
        est.ci_high = clamp01(q_hat + z * se);
    }

    if (options.eta <= 0.0 || options.eta > 1.0)
        throw std::invalid_argument("estimate: eta must be in (0,1]");
    auto q_to_p = [&](double q) {
        const double p = 2.0 * q / options.eta;
        return p;
    };
    const double p_raw = q_to_p(est.q_hat);
    est.p_clipped = p_raw > 1.0;
    est.p_hat = clamp01(p_raw);
    est.p_ci_low = clamp01(q_to_p(est.ci_low));
    est.p_ci_high = clamp01(q_to_p(est.ci_high));

    auto p_to_lambda = [&](double p) {
        // keep the rate finite when p was clipped to 1
        return rate_from_percycle(std::min(p, 1.0 - 1e-12), options.cycle_duration);
    };
    est.lambda_hat = p_to_lambda(est.p_hat);
    est.lambda_ci_low = p_to_lambda(est.p_ci_low);
    est.lambda_ci_high = p_to_lambda(est.p_ci_high);
    return est;
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    double z = 0.0;
    for (int i = 0; i < 80; ++i) {
        const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
        const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        const double step = (cdf - p) / std::max(pdf, 1e-300);
        z -= std::clamp(step, -4.0, 4.0);
        if (std::abs(step) < 1e-14) break;
    }
    return z;
}

double rate_from_percycle(double p_hat, double cycle_duration) {
    if (!(cycle_duration > 0.0))
        throw std::invalid_argument("rate_from_percycle: cycle_duration must be positive");
    if (p_hat < 0.0 || p_hat > 1.0)
        throw std::invalid_argument("rate_from_percycle: p_hat must be in [0,1)");
    if (p_hat == 1.0) throw std::invalid_argument("rate unbounded");
    return -std::log1p(-p_hat) / cycle_duration;
}

RateEstimate geometric_mle(const std::vector<long>& escape_cycles,
                           long n_censored, long max_cycle,
                           const EstimateOptions& options) {
    if (escape_cycles.empty()) throw std::invalid_argument("no events");
    if (n_censored < 0) throw std::invalid_argument("geometric_mle: negative censor count");
    if (n_censored > 0 && max_cycle < 1)
        throw std::invalid_argument("geometric_mle: max_cycle must be >= 1 when censoring");

    long sum_k = 0;
    for (long k : escape_cycles) {
        if (k < 1) throw std::invalid_argument("geometric_mle: escape cycles must be >= 1");
        sum_k += k;
    }
    const double n = static_cast<double>(escape_cycles.size());
    const double failures =
        static_cast<double>(sum_k - static_cast<long>(escape_cycles.size())) +
        static_cast<double>(n_censored) * static_cast<double>(max_cycle);

    double q_hat;
    if (n_censored == 0) {
        q_hat = n / static_cast<double>(sum_k);
    } else {
        // score(q) = n/q - failures/(1-q), strictly decreasing on (0,1)
        auto score = [&](double q) { return n / q - failures / (1.0 - q); };
        double lo = 1e-15, hi = 1.0 - 1e-15;
        if (score(hi) >= 0.0) {
            q_hat = 1.0;
        } else {
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (score(mid) > 0.0 ? lo : hi) = mid;
            }
            q_hat = 0.5 * (lo + hi);
        }
    }

    return finish_estimate(q_hat, n, failures,
                           static_cast<long>(escape_cycles.size()) + n_censored,
                           options);
}

RateEstimate binomial_mle(const atomtrap::LeakageSeries& series, double eta,
                          const EstimateOptions& options) {
    if (series.records.empty())
        throw std::invalid_argument("binomial_mle: empty series");

    long removed = 0;
    long at_risk = 0;
    long population = series.n_atoms0;
    for (const auto& rec : series.records) {
        at_risk += population;
        removed += rec.n_removed;
        population = rec.n_remaining;
    }
    if (at_risk <= 0) throw std::invalid_argument("binomial_mle: zero at-risk population");

    EstimateOptions opts = options;
    opts.eta = eta;
    if (series.config.cycle_duration > 0.0)
        opts.cycle_duration = series.config.cycle_duration;

    const double q_hat = static_cast<double>(removed) / static_cast<double>(at_risk);
    return finish_estimate(q_hat, static_cast<double>(removed),
                           static_cast<double>(at_risk - removed), at_risk, opts);
}

RateEstimate geometric_mle_from_optical(const optical::LeakageSeries& series,
                                        const EstimateOptions& options) {
    if (series.absorbed > 0)
        throw std::invalid_argument(
            "estimate does not support runs with absorbed photons");
    std::vector<long> escapes;
    for (int k = 0; k < series.max_passes; ++k) {
        const long count = series.escapes_d1[k] + series.escapes_d2[k];
        escapes.insert(escapes.end(), static_cast<std::size_t>(count),
                       static_cast<long>(k + 1));
    }
    if (escapes.empty()) throw std::invalid_argument("no events");
    return geometric_mle(escapes, series.survivors, series.max_passes, options);
}

}  // namespace suptrap::inference
