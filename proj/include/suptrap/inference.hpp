#pragma once

#include <vector>

#include "suptrap/atomtrap.hpp"
#include "suptrap/optical.hpp"

namespace suptrap::inference {

struct EstimateOptions {
    double confidence = 0.95;
    double eta = 1.0;              // push efficiency used to map q -> p
    double cycle_duration = 1.0;   // used to map p -> continuous rate
    bool profile_likelihood = false;  // Wald by default
};

struct RateEstimate {
    double q_hat = 0.0;       // per-cycle escape probability
    double p_hat = 0.0;       // per-cycle collapse probability, 2 q / eta
    double lambda_hat = 0.0;  // continuous rate
    double ci_low = 0.0;      // interval on q
    double ci_high = 0.0;
    double p_ci_low = 0.0;
    double p_ci_high = 0.0;
    double lambda_ci_low = 0.0;
    double lambda_ci_high = 0.0;
    double log_likelihood = 0.0;
    long n_samples = 0;
    double confidence = 0.95;
    bool p_clipped = false;   // set when 2 q / eta had to be clipped into [0,1]
};

// Censored-geometric maximum likelihood for escape cycles k_i >= 1 plus
// n_censored trajectories that never escaped within max_cycle cycles.
// Uncensored data uses the closed form n / sum(k); the censored case solves
// the score equation by bisection. Intervals are Wald from the observed
// Fisher information (profile likelihood on request or at the boundary).
RateEstimate geometric_mle(const std::vector<long>& escape_cycles,
                           long n_censored, long max_cycle,
                           const EstimateOptions& options = {});

// Pooled binomial MLE over the per-cycle removal counts of a leakage series:
// q = total removed / total at-risk. eta and the cycle duration come from the
// caller / the series config.
RateEstimate binomial_mle(const atomtrap::LeakageSeries& series, double eta,
                          const EstimateOptions& options = {});

// Escape-pass histogram of an optical run fitted as censored-geometric.
RateEstimate geometric_mle_from_optical(const optical::LeakageSeries& series,
                                        const EstimateOptions& options = {});

// lambda = -ln(1 - p) / tau, the inverse of p = 1 - exp(-lambda tau).
double rate_from_percycle(double p_hat, double cycle_duration);

// Inverse standard normal CDF (Newton on erfc); used for interval quantiles.
double normal_quantile(double p);

}  // namespace suptrap::inference
