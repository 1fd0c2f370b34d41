#pragma once

#include <string>
#include <utility>
#include <vector>

#include "suptrap/quantum.hpp"
#include "suptrap/rng.hpp"

namespace suptrap::collapse {

enum class ModelKind { None, Dephasing, ProjectiveEvents, CslLike };

std::string to_string(ModelKind kind);

// Stochastic collapse/decoherence channel specification.
//
// ProjectiveEvents and CslLike are Poisson streams of full projective
// measurements in `collapse_basis`; Dephasing is unraveled per interval as
// "no jump, or one projection" with p = 1 - exp(-gamma * duration), which
// reproduces the phase-damping channel exactly in ensemble average.
struct CollapseModel {
    ModelKind kind = ModelKind::None;
    double gamma = 0.0;             // dephasing rate (1/time)
    double lambda = 0.0;            // projective event rate (1/time)
    double csl_lambda0 = 0.0;       // CSL-like base rate (1/time)
    double csl_mass_factor = 1.0;   // dimensionless
    double csl_sep_factor = 1.0;    // dimensionless, in [0,1]
    // Labels of the basis collapse projects onto; empty means "the state's
    // own labels" (the which-path/arm basis in the trap simulators).
    std::vector<std::string> collapse_basis;

    static CollapseModel none();
    static CollapseModel dephasing(double gamma);
    static CollapseModel projective_events(double lambda);
    static CollapseModel csl_like(double lambda0, double mass_factor,
                                  double sep_factor);

    void validate() const;

    // Poisson event rate (zero for None and Dephasing).
    double event_rate() const;

    // Rate at which coherences decay under the ensemble-average channel.
    double coherence_decay_rate() const;
};

struct CollapseEvent {
    double time = 0.0;     // within the simulated interval
    std::string outcome;   // basis label of the projection outcome
};

// Homogeneous-Poisson event times in [0, duration), sorted ascending.
std::vector<double> sample_events(const CollapseModel& model, double duration,
                                  RngStream& rng);

// Single-trajectory unraveling over one interval.
std::pair<quantum::PureState, std::vector<CollapseEvent>> apply_model_trajectory(
    const quantum::PureState& state, const CollapseModel& model,
    double duration, RngStream& rng);

// Deterministic ensemble-average counterpart.
quantum::DensityMatrix apply_model_density(const quantum::DensityMatrix& rho,
                                           const CollapseModel& model,
                                           double duration);

}  // namespace suptrap::collapse
