#pragma once

// One scenario run: per-tick geometry, fading draws, pilot-block estimation,
// packet delivery and VRS labelling, returning the observation rows together
// with the ground truth that generated them.

#include <vector>

#include "vrsjam/scenario.hpp"
#include "vrsjam/types.hpp"

namespace vrsjam::simulation {

struct TickTruth {
    double t = 0.0;
    double own_speed = 0.0;      // m/s
    double true_delta_u = 0.0;   // m/s, emitter vs receiver
    double emitter_dist = 0.0;   // m, LOS distance emitter -> receiver
    double emitter_power = 0.0;  // mW transmitted
    double signal_mw = 0.0;      // Tx power at the receiver
    double jam_mw = 0.0;         // jammer/interferer power at the receiver, unaveraged
    double jammed_fraction = 0.0;
    bool detected = false;       // estimator found an emitter signal
    bool delivered = false;
};

struct RunTrace {
    scenario::ScenarioConfig cfg;
    std::vector<ObservationRecord> records;
    std::vector<TickTruth> truth;
};

/// Fixed pseudo-random BPSK pilot sequence of length k (seeded, never all-equal).
std::vector<double> pilot_sequence(int k);

/// Runs cfg.kind for cfg.duration. Deterministic in cfg (including cfg.seed).
RunTrace simulate_run(const scenario::ScenarioConfig& cfg);

}  // namespace vrsjam::simulation
