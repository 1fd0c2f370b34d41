#include "suptrap/optical.hpp"

#include <cmath>
#include <stdexcept>

#include "suptrap/parallel.hpp"

namespace suptrap::optical {

namespace {

using Complex = std::complex<double>;

constexpr int kDetectorPort = 0;
constexpr int kRecircPort = 1;

}  // namespace

std::vector<std::string> arm_labels() { return {kArmA, kArmB}; }

void OpticalTrapConfig::validate() const {
    model.validate();
    if (!(pass_duration > 0.0))
        throw std::invalid_argument("optical: pass_duration must be positive");
    if (max_passes < 1)
        throw std::invalid_argument("optical: max_passes must be >= 1");
}

RoundtripResult ideal_roundtrip(const quantum::PureState& port_state,
                                double arm_phase) {
    const Eigen::Matrix2cd bs = quantum::beam_splitter();
    Eigen::Vector2cd v;
    v << port_state.amplitude(kArmA), port_state.amplitude(kArmB);
    v = bs * v;                                // BS1 -> arms
    v[1] *= std::polar(1.0, arm_phase);        // relative arm phase
    v = bs * v;                                // BS2 -> (detector, recirc)

    Eigen::Vector2cd next;
    next << v[kRecircPort], 0.0;
    return RoundtripResult{quantum::PureState(arm_labels(), next),
                           v[kDetectorPort]};
}

std::vector<PassRecord> simulate_photon(const OpticalTrapConfig& config,
                                        RngStream& rng) {
    config.validate();

    const Eigen::Matrix2cd bs = quantum::beam_splitter();
    const auto labels = arm_labels();
    collapse::CollapseModel model = config.model;
    if (model.collapse_basis.empty()) model.collapse_basis = labels;

    std::vector<PassRecord> passes;
    quantum::PureState state = quantum::PureState::basis_state(labels, kArmA);

    for (int pass = 1; pass <= config.max_passes; ++pass) {
        PassRecord rec;
        rec.pass = pass;

        // into the arms
        quantum::PureState arms = apply_unitary(state, bs, labels);
        auto [after, events] =
            collapse::apply_model_trajectory(arms, model, config.pass_duration, rng);
        rec.events = std::move(events);

        // arm phase, then recombination
        Eigen::Vector2cd v;
        v << after.amplitude(kArmA),
            after.amplitude(kArmB) * std::polar(1.0, config.arm_phase);
        v = bs * v;

        const double norm2 = std::norm(v[0]) + std::norm(v[1]);
        const double p_detect = std::norm(v[kDetectorPort]) / norm2;

        if (p_detect > 0.0 && rng.bernoulli(p_detect)) {
            rec.escaped = true;
            rec.detector = rng.uniform_index(2) == 0 ? "D1" : "D2";
            passes.push_back(std::move(rec));
            return passes;
        }

        if (!rec.events.empty() && config.absorb_collapsed_recirculation) {
            rec.absorbed = true;
            passes.push_back(std::move(rec));
            return passes;
        }

        // recirculate: the surviving amplitude re-enters as a pure port state
        Eigen::Vector2cd next;
        next << v[kRecircPort] / std::abs(v[kRecircPort]), 0.0;
        state = quantum::PureState(labels, next);
        passes.push_back(std::move(rec));
    }
    return passes;
}

LeakageSeries simulate_ensemble(const OpticalTrapConfig& config, long n_photons,
                                const RngStream& rng) {
    config.validate();
    if (n_photons < 1)
        throw std::invalid_argument("optical: n_photons must be >= 1");

    LeakageSeries series;
    series.n_photons = n_photons;
    series.max_passes = config.max_passes;
    series.seed = rng.seed();
    series.escapes_d1.assign(config.max_passes, 0);
    series.escapes_d2.assign(config.max_passes, 0);

    const std::uint64_t base = mix_seed(rng.seed(), rng.stream());

    struct Tally {
        std::vector<long> d1, d2, absorbed_at;
        long events = 0;
    };

    std::vector<Tally> tallies = parallel_map_chunks<Tally>(
        n_photons, [&](long begin, long end) {
            Tally t;
            t.d1.assign(config.max_passes, 0);
            t.d2.assign(config.max_passes, 0);
            t.absorbed_at.assign(config.max_passes, 0);
            for (long i = begin; i < end; ++i) {
                RngStream photon_rng(base, static_cast<std::uint64_t>(i));
                const auto passes = simulate_photon(config, photon_rng);
                for (const auto& p : passes) t.events += static_cast<long>(p.events.size());
                const auto& last = passes.back();
                if (last.escaped) {
                    auto& hist = (last.detector == "D1") ? t.d1 : t.d2;
                    ++hist[last.pass - 1];
                } else if (last.absorbed) {
                    ++t.absorbed_at[last.pass - 1];
                }
            }
            return t;
        });

    std::vector<long> absorbed_at(config.max_passes, 0);
    for (const auto& t : tallies) {
        for (int k = 0; k < config.max_passes; ++k) {
            series.escapes_d1[k] += t.d1[k];
            series.escapes_d2[k] += t.d2[k];
            absorbed_at[k] += t.absorbed_at[k];
        }
        series.total_collapse_events += t.events;
    }

    series.survivors_after.assign(config.max_passes, 0);
    long gone = 0;
    for (int k = 0; k < config.max_passes; ++k) {
        gone += series.escapes_d1[k] + series.escapes_d2[k] + absorbed_at[k];
        series.survivors_after[k] = n_photons - gone;
        series.total_escaped_d1 += series.escapes_d1[k];
        series.total_escaped_d2 += series.escapes_d2[k];
        series.absorbed += absorbed_at[k];
    }
    series.survivors =
        n_photons - series.total_escaped_d1 - series.total_escaped_d2 - series.absorbed;
    return series;
}

}  // namespace suptrap::optical
