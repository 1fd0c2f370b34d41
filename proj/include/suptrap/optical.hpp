#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "suptrap/collapse.hpp"
#include "suptrap/quantum.hpp"
#include "suptrap/rng.hpp"

namespace suptrap::optical {

inline const std::string kArmA = "armA";
inline const std::string kArmB = "armB";

std::vector<std::string> arm_labels();

struct OpticalTrapConfig {
    collapse::CollapseModel model;
    double pass_duration = 1.0;   // time per round trip
    int max_passes = 1000;
    double arm_phase = 0.0;       // relative phase between the arms
    std::uint64_t seed = 1;
    // What to do with the recirculating half of a collapsed photon: keep it
    // circulating as a fresh pure state (default) or absorb it.
    bool absorb_collapsed_recirculation = false;

    void validate() const;
};

struct PassRecord {
    int pass = 0;
    bool escaped = false;
    bool absorbed = false;
    std::string detector;  // "D1" or "D2" iff escaped
    std::vector<collapse::CollapseEvent> events;
};

struct RoundtripResult {
    quantum::PureState trapped;  // recirculating component, not renormalized
    std::complex<double> detector_amplitude;
};

// One pass through the loop: BS1 -> arm phase -> BS2 acting on the state in
// the circulating-port basis. With arm_phase = 0 the detector amplitude of a
// port-injected state is exactly zero and everything recirculates; the
// one-way element re-injects the recirculating amplitude unchanged.
RoundtripResult ideal_roundtrip(const quantum::PureState& port_state,
                                double arm_phase = 0.0);

// Per-pass records of one photon until it escapes, is absorbed, or survives
// max_passes.
std::vector<PassRecord> simulate_photon(const OpticalTrapConfig& config,
                                        RngStream& rng);

struct LeakageSeries {
    long n_photons = 0;
    int max_passes = 0;
    std::vector<long> escapes_d1;      // indexed by pass - 1
    std::vector<long> escapes_d2;
    std::vector<long> survivors_after; // photons still trapped after each pass
    long total_escaped_d1 = 0;
    long total_escaped_d2 = 0;
    long survivors = 0;
    long absorbed = 0;
    long total_collapse_events = 0;
    std::uint64_t seed = 0;
};

// Deterministic given the stream identity: photon i draws from the substream
// (mix(seed, stream), i).
LeakageSeries simulate_ensemble(const OpticalTrapConfig& config, long n_photons,
                                const RngStream& rng);

}  // namespace suptrap::optical
