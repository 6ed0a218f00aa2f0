#pragma once

// Straight-road kinematics for the Tx/Rx pair, the pursuing jammers and the
// static interference source, plus the reactive (smart) jammer state machine.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "vrsjam/channel.hpp"
#include "vrsjam/types.hpp"

namespace vrsjam::scenario {

enum class Role { Transmitter, Receiver, Jammer, Interferer };

struct VehicleState {
    double pos = 0.0;    // m, road coordinate
    double speed = 0.0;  // m/s
    Role role = Role::Receiver;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Interference;
    double base_speed = 15.0;       // m/s, Tx and Rx
    double dist_initial = 200.0;    // m, jammer behind the receiver at t = 0
    double duration = 100.0;        // s
    double sample_period = 0.1;     // s
    channel::RadioConfig radio;
    std::uint64_t seed = 1;
    std::uint64_t route_seed = 0;   // own-speed profile stream; 0 = derive from seed

    double dist_tx_rx = 35.0;           // m, Tx ahead of Rx
    double pursuit_speed_ratio = 1.4;   // jammer speed while closing in, x base_speed
    double approach_distance = 10.0;    // m, smart jammer turn-around gap
    double safe_distance = 25.0;        // m, smart jammer hold gap
    double retreat_speed = 5.0;         // m/s, smart jammer falls back at u_Rx - this
    double follow_distance = 10.0;      // m, constant jammer switch-to-full-power gap
    double p_min = 17.0;                // mW, constant jammer approach power
    double interferer_power = 100.0;    // mW
    double interferer_offset = 10.0;    // m, lateral offset of the static source
    double reflector_offset = 60.0;     // m, lateral offset of the static reflector
    double speed_variation = 0.55;      // std of own-speed fluctuation, fraction of base_speed
    double pursuit_jitter = 0.3;        // std of the pursuer's closing-speed fluctuation, fraction
    double speed_correlation_time = 10.0;  // s
    double sense_threshold_dbm = -86.0;
    double t_detection = 12e-6;         // s
    double t_duration = 84e-6;          // s
    double rx_sensitivity_dbm = -85.0;  // receiver carrier-sense level (P_th)

    int pilot_length = 32;      // K
    int pilot_blocks = 8;       // estimation blocks per observation
    double dt_block = 0.5e-3;   // s, spacing of estimation blocks
    int packet_bits = 500;
    int pdr_window = 10;        // packets

    double vrs_epsilon = 0.5;   // m/s
    double vrs_num_na = 0.0;
    double vrs_num_a = 100.0;

    int observations() const;
    double pursuit_speed() const { return pursuit_speed_ratio * base_speed; }
    void validate() const;
};

/// Key/value view of a config using the field names above (radio fields unprefixed).
std::map<std::string, std::string> to_kv(const ScenarioConfig& cfg);
/// Applies keys onto `base`; throws ConfigError naming the first unknown or malformed key.
ScenarioConfig from_kv(const std::map<std::string, std::string>& kv, ScenarioConfig base = {});

/// Parses "key = value" lines; '#' starts a comment. Throws ConfigError on bad lines.
std::map<std::string, std::string> parse_kv(std::istream& in);
void write_kv(std::ostream& out, const std::map<std::string, std::string>& kv);
ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {});

std::vector<VehicleState> step_kinematics(std::vector<VehicleState> states, double dt);

/// Per-tick receiver (and transmitter) speed u[k]. Constant when speed_variation == 0,
/// otherwise a mean-reverting fluctuation around base_speed. Deterministic in
/// cfg.route_seed (or cfg.seed when route_seed is 0).
std::vector<double> own_speed_profile(const ScenarioConfig& cfg);

enum class JammerPhase { Pursue, Retreat, Follow };

struct JammerTick {
    double pos = 0.0;         // m
    double speed = 0.0;       // m/s over [t_k, t_k + dt)
    double gap = 0.0;         // m, receiver pos - jammer pos
    double rel_speed = 0.0;   // m/s, |u_Jx - u_Rx|
    double power_mw = 0.0;
    JammerPhase phase = JammerPhase::Pursue;
};

struct InterferenceTick {
    double source_x = 0.0;    // m
    double source_y = 0.0;    // m, lateral
    double power_mw = 0.0;
    double rel_speed = 0.0;   // m/s, receiver speed vs static source
};

/// Receiver positions at each tick for a speed profile (Rx starts at 0).
std::vector<double> receiver_positions(const ScenarioConfig& cfg, const std::vector<double>& own_speed);

std::vector<JammerTick> smart_jammer_trajectory(const ScenarioConfig& cfg,
                                                const std::vector<double>& own_speed);
std::vector<JammerTick> smart_jammer_trajectory(const ScenarioConfig& cfg);

std::vector<JammerTick> constant_jammer_trajectory(const ScenarioConfig& cfg,
                                                   const std::vector<double>& own_speed);
std::vector<JammerTick> constant_jammer_trajectory(const ScenarioConfig& cfg);

std::vector<InterferenceTick> interference_trajectory(const ScenarioConfig& cfg,
                                                      const std::vector<double>& own_speed);
std::vector<InterferenceTick> interference_trajectory(const ScenarioConfig& cfg);

/// Reactive jammer: accumulates time with sensed energy above threshold; once a
/// full t_detection window is busy it transmits for exactly t_duration, then
/// waits for the medium to go idle before arming again (one burst per frame).
struct SmartJammerState {
    double sense_threshold = -86.0;  // dBm
    double t_detection = 12e-6;      // s
    double t_duration = 84e-6;       // s
    double energy_timer = 0.0;       // s of continuous busy medium observed
    double tx_timer = 0.0;           // s of burst remaining
    bool awaiting_idle = false;
};

struct JammerDecision {
    SmartJammerState state;
    bool transmitting = false;
};

/// Advances the reactive jammer by one step of length dt (dt <= t_detection).
JammerDecision smart_jammer_decision(SmartJammerState state, double sensed_dbm, double dt);

/// Runs the reactive jammer over a frame of `frame_len` symbols whose energy at the
/// jammer is `sensed_dbm`, starting from an idle medium. Returns the per-symbol
/// transmit mask.
std::vector<bool> reactive_burst_mask(const ScenarioConfig& cfg, double sensed_dbm, int frame_len);

double mw_to_dbm(double mw);
double dbm_to_mw(double dbm);

}  // namespace vrsjam::scenario
