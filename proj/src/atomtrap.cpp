#include "suptrap/atomtrap.hpp"

#include <cmath>
#include <stdexcept>

#include "suptrap/parallel.hpp"

namespace suptrap::atomtrap {

std::vector<std::string> internal_labels() { return {kGround, kExcited}; }

void AtomTrapConfig::validate() const {
    model.validate();
    if (!(cycle_duration > 0.0))
        throw std::invalid_argument("atom: cycle_duration must be positive");
    if (n_cycles < 1) throw std::invalid_argument("atom: n_cycles must be >= 1");
    auto probability = [](double p, const char* name) {
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument(std::string("atom: ") + name +
                                        " must be in [0,1]");
    };
    probability(push_efficiency, "push_efficiency");
    probability(pulse_fidelity, "pulse_fidelity");
    probability(excited_loss, "excited_loss");
}

double AtomTrapConfig::per_cycle_collapse_probability() const {
    const double rate = model.kind == collapse::ModelKind::Dephasing
                            ? model.gamma
                            : model.event_rate();
    return -std::expm1(-rate * cycle_duration);
}

AtomState AtomState::ground() {
    return AtomState{quantum::PureState::basis_state(internal_labels(), kGround),
                     AtomStatus::Trapped};
}

AtomState AtomState::excited() {
    return AtomState{quantum::PureState::basis_state(internal_labels(), kExcited),
                     AtomStatus::Trapped};
}

namespace {

const double kPi = M_PI;

quantum::PureState apply_pulse(const quantum::PureState& psi,
                               const Eigen::Matrix2cd& u,
                               const AtomTrapConfig& config, RngStream& rng) {
    if (config.pulse_fidelity < 1.0 && !rng.bernoulli(config.pulse_fidelity))
        return psi;  // imperfect pulse acts as identity
    return quantum::apply_unitary(psi, u, internal_labels());
}

}  // namespace

std::pair<AtomState, std::vector<collapse::CollapseEvent>> mz_cycle(
    const AtomState& atom, const AtomTrapConfig& config, RngStream& rng) {
    config.validate();
    if (atom.status != AtomStatus::Trapped)
        throw std::invalid_argument("mz_cycle: atom is not trapped");

    collapse::CollapseModel model = config.model;
    if (model.collapse_basis.empty()) model.collapse_basis = internal_labels();

    // Entering in e: the plain pi/2 - pi - pi/2 chain already maps e -> e.
    // Entering in g (fresh atoms, or stragglers missed by the push): flip the
    // final pulse phase so the composite maps g -> e instead.
    const bool entering_excited = atom.internal.probability(kExcited) >= 0.5;
    const double final_phase =
        (entering_excited ? 0.0 : kPi) + config.arm_phase;

    const Eigen::Matrix2cd half = quantum::rotation_matrix({kPi / 2.0, 0.0});
    const Eigen::Matrix2cd full = quantum::rotation_matrix({kPi, 0.0});
    const Eigen::Matrix2cd last = quantum::rotation_matrix({kPi / 2.0, final_phase});
    const double half_tau = config.cycle_duration / 2.0;

    std::vector<collapse::CollapseEvent> events;
    quantum::PureState psi = apply_pulse(atom.internal, half, config, rng);

    auto free_evolution = [&](quantum::PureState state) {
        auto [out, ev] = collapse::apply_model_trajectory(state, model, half_tau, rng);
        for (auto& e : ev) events.push_back(std::move(e));
        return out;
    };

    psi = free_evolution(std::move(psi));
    psi = apply_pulse(psi, full, config, rng);
    psi = free_evolution(std::move(psi));
    psi = apply_pulse(psi, last, config, rng);

    return {AtomState{std::move(psi), AtomStatus::Trapped}, std::move(events)};
}

long push_pulse(std::vector<AtomState>& ensemble, double eta, RngStream& rng) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("push_pulse: eta must be in [0,1]");
    long removed = 0;
    for (auto& atom : ensemble) {
        if (atom.status != AtomStatus::Trapped) continue;
        if (atom.internal.probability(kGround) > 0.5 && rng.bernoulli(eta)) {
            atom.status = AtomStatus::Removed;
            ++removed;
        }
    }
    return removed;
}

LeakageSeries run_protocol(const AtomTrapConfig& config, long n_atoms) {
    config.validate();
    if (n_atoms < 1) throw std::invalid_argument("run_protocol: n_atoms must be >= 1");

    const std::uint64_t base = mix_seed(config.seed, 0);
    const auto labels = internal_labels();

    struct Tally {
        std::vector<long> removed;
        std::vector<long> events;
    };

    std::vector<Tally> tallies = parallel_map_chunks<Tally>(
        n_atoms, [&](long begin, long end) {
            Tally tally;
            tally.removed.assign(config.n_cycles, 0);
            tally.events.assign(config.n_cycles, 0);
            for (long i = begin; i < end; ++i) {
                RngStream rng(base, static_cast<std::uint64_t>(i));
                AtomState atom = AtomState::ground();
                for (int k = 0; k < config.n_cycles; ++k) {
                    auto [after, events] = mz_cycle(atom, config, rng);
                    tally.events[k] += static_cast<long>(events.size());

                    // cycle-end branching: the push is measurement-like
                    auto [outcome, collapsed] =
                        quantum::projective_measure(after.internal, labels, rng);
                    atom = AtomState{std::move(collapsed), AtomStatus::Trapped};

                    const double p_remove = outcome == kGround
                                                ? config.push_efficiency
                                                : config.excited_loss;
                    if (p_remove > 0.0 && rng.bernoulli(p_remove)) {
                        atom.status = AtomStatus::Removed;
                        ++tally.removed[k];
                        break;
                    }
                }
                if (atom.status == AtomStatus::Trapped)
                    atom.status = AtomStatus::Survived;
            }
            return tally;
        });

    LeakageSeries series;
    series.config = config;
    series.seed = config.seed;
    series.n_atoms0 = n_atoms;
    long remaining = n_atoms;
    for (int k = 0; k < config.n_cycles; ++k) {
        CycleRecord rec;
        rec.cycle = k + 1;
        for (const auto& t : tallies) {
            rec.n_removed += t.removed[k];
            rec.n_collapse_events += t.events[k];
        }
        remaining -= rec.n_removed;
        rec.n_remaining = remaining;
        series.total_removed += rec.n_removed;
        series.records.push_back(rec);
    }
    series.survivors = remaining;
    return series;
}

double expected_leakage(double p, double n0, long k, double eta) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("expected_leakage: p must be in [0,1]");
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("expected_leakage: eta must be in [0,1]");
    if (k < 1) throw std::invalid_argument("expected_leakage: k must be >= 1");
    const double q = eta * p / 2.0;
    return n0 * q * std::pow(1.0 - q, static_cast<double>(k - 1));
}

}  // namespace suptrap::atomtrap
