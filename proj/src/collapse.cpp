#include "suptrap/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace suptrap::collapse {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::None: return "none";
        case ModelKind::Dephasing: return "dephasing";
        case ModelKind::ProjectiveEvents: return "projective_events";
        case ModelKind::CslLike: return "csl_like";
    }
    return "unknown";
}

CollapseModel CollapseModel::none() { return CollapseModel{}; }

CollapseModel CollapseModel::dephasing(double gamma) {
    CollapseModel m;
    m.kind = ModelKind::Dephasing;
    m.gamma = gamma;
    m.validate();
    return m;
}

CollapseModel CollapseModel::projective_events(double lambda) {
    CollapseModel m;
    m.kind = ModelKind::ProjectiveEvents;
    m.lambda = lambda;
    m.validate();
    return m;
}

CollapseModel CollapseModel::csl_like(double lambda0, double mass_factor,
                                      double sep_factor) {
    CollapseModel m;
    m.kind = ModelKind::CslLike;
    m.csl_lambda0 = lambda0;
    m.csl_mass_factor = mass_factor;
    m.csl_sep_factor = sep_factor;
    m.validate();
    return m;
}

void CollapseModel::validate() const {
    if (gamma < 0.0 || lambda < 0.0 || csl_lambda0 < 0.0 || csl_mass_factor < 0.0)
        throw std::invalid_argument("collapse model rates must be nonnegative");
    if (!std::isfinite(gamma) || !std::isfinite(lambda) ||
        !std::isfinite(csl_lambda0) || !std::isfinite(csl_mass_factor))
        throw std::invalid_argument("collapse model rates must be finite");
    if (csl_sep_factor < 0.0 || csl_sep_factor > 1.0)
        throw std::invalid_argument("csl_sep_factor must be in [0,1]");
}

double CollapseModel::event_rate() const {
    switch (kind) {
        case ModelKind::None:
        case ModelKind::Dephasing:
            return 0.0;
        case ModelKind::ProjectiveEvents:
            return lambda;
        case ModelKind::CslLike:
            return csl_lambda0 * csl_mass_factor * csl_sep_factor;
    }
    return 0.0;
}

double CollapseModel::coherence_decay_rate() const {
    return kind == ModelKind::Dephasing ? gamma : event_rate();
}

std::vector<double> sample_events(const CollapseModel& model, double duration,
                                  RngStream& rng) {
    if (duration < 0.0)
        throw std::invalid_argument("sample_events: duration must be nonnegative");
    model.validate();
    std::vector<double> times;
    const double rate = model.event_rate();
    if (rate <= 0.0 || duration == 0.0) return times;
    double t = rng.exponential(rate);
    while (t < duration) {
        times.push_back(t);
        t += rng.exponential(rate);
    }
    return times;
}

std::pair<quantum::PureState, std::vector<CollapseEvent>> apply_model_trajectory(
    const quantum::PureState& state, const CollapseModel& model,
    double duration, RngStream& rng) {
    if (duration < 0.0)
        throw std::invalid_argument("apply_model_trajectory: negative duration");
    model.validate();

    std::vector<CollapseEvent> events;
    if (model.kind == ModelKind::None || duration == 0.0) return {state, events};

    const auto& basis =
        model.collapse_basis.empty() ? state.labels() : model.collapse_basis;
    const bool own_basis = basis == state.labels();

    auto measure = [&](const quantum::PureState& s) {
        if (own_basis) {
            auto [i, post] = quantum::measure_in_own_basis(s, rng);
            return std::pair<std::size_t, quantum::PureState>{
                static_cast<std::size_t>(i), std::move(post)};
        }
        return quantum::measure_partition(s, quantum::singleton_partition(basis),
                                          rng);
    };

    if (model.kind == ModelKind::Dephasing) {
        const double p = -std::expm1(-model.gamma * duration);
        if (rng.bernoulli(p)) {
            // Conditional first-arrival time given at least one event.
            const double u = rng.uniform();
            const double t = -std::log1p(-u * p) / model.gamma;
            auto [g, post] = measure(state);
            events.push_back({t, basis[g]});
            return {std::move(post), std::move(events)};
        }
        return {state, std::move(events)};
    }

    // ProjectiveEvents / CslLike: apply every sampled event. Events after the
    // first leave an already-collapsed state unchanged but are still logged.
    quantum::PureState current = state;
    for (double t : sample_events(model, duration, rng)) {
        auto [g, post] = measure(current);
        events.push_back({t, basis[g]});
        current = std::move(post);
    }
    return {std::move(current), std::move(events)};
}

quantum::DensityMatrix apply_model_density(const quantum::DensityMatrix& rho,
                                           const CollapseModel& model,
                                           double duration) {
    if (duration < 0.0)
        throw std::invalid_argument("apply_model_density: negative duration");
    model.validate();
    if (model.kind == ModelKind::None || duration == 0.0) return rho;

    const auto& basis = model.collapse_basis.empty() ? rho.labels : model.collapse_basis;
    return quantum::dephase(rho, model.coherence_decay_rate() * duration, basis);
}

}  // namespace suptrap::collapse
