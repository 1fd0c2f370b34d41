#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "suptrap/collapse.hpp"
#include "suptrap/quantum.hpp"
#include "suptrap/rng.hpp"

namespace suptrap::atomtrap {

inline const std::string kGround = "g";    // 1S0
inline const std::string kExcited = "e";   // 3P0

std::vector<std::string> internal_labels();

struct AtomTrapConfig {
    collapse::CollapseModel model;
    double cycle_duration = 1.0;   // free evolution per cycle, split around the pi pulse
    int n_cycles = 1;
    double push_efficiency = 1.0;  // probability a g atom is actually removed
    double pulse_fidelity = 1.0;   // per pulse: ideal with this probability, else identity
    double excited_loss = 0.0;     // residual push loss for e atoms
    double arm_phase = 0.0;        // extra interferometer phase on the final pulse
    std::uint64_t seed = 1;

    void validate() const;
    // Probability that at least one collapse event hits one cycle.
    double per_cycle_collapse_probability() const;
};

enum class AtomStatus { Trapped, Removed, Survived };

struct AtomState {
    quantum::PureState internal;
    AtomStatus status = AtomStatus::Trapped;

    static AtomState ground();
    static AtomState excited();
};

struct CycleRecord {
    int cycle = 0;
    long n_removed = 0;
    long n_remaining = 0;
    long n_collapse_events = 0;
};

struct LeakageSeries {
    std::vector<CycleRecord> records;
    AtomTrapConfig config;
    std::uint64_t seed = 0;
    long n_atoms0 = 0;
    long total_removed = 0;
    long survivors = 0;
};

// One pi/2 - tau/2 - pi - tau/2 - pi/2 interferometer cycle. The final pulse
// phase tracks the atom's entry eigenstate so that an unperturbed atom ends
// in e with probability 1; a collapse anywhere mid-cycle leaves the atom at
// 50:50 in g/e after the last pulse.
std::pair<AtomState, std::vector<collapse::CollapseEvent>> mz_cycle(
    const AtomState& atom, const AtomTrapConfig& config, RngStream& rng);

// Marks every trapped g atom removed with probability eta; returns the count.
long push_pulse(std::vector<AtomState>& ensemble, double eta, RngStream& rng);

// Full protocol: repeat { cycle every trapped atom, branch into g/e, push }
// for n_cycles. Deterministic given the config seed; atom i draws from the
// substream (mix(seed, 0), i).
LeakageSeries run_protocol(const AtomTrapConfig& config, long n_atoms);

// Analytic leakage law: expected removals at cycle k out of n0 atoms with
// per-cycle collapse probability p and push efficiency eta,
//   n0 * (eta p / 2) * (1 - eta p / 2)^(k-1).
double expected_leakage(double p, double n0, long k, double eta = 1.0);

}  // namespace suptrap::atomtrap
