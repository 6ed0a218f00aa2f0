#pragma once

// Per-observation link metrics: SINR, RSSI, packet delivery and the windowed PDR.

#include <deque>
#include <optional>
#include <random>
#include <span>

#include "vrsjam/estimator.hpp"
#include "vrsjam/types.hpp"

namespace vrsjam::features {

inline constexpr double kSinrFloorDb = -40.0;
inline constexpr double kSinrCapDb = 60.0;

/// 10 log10(signal / (jam + noise)), clamped to [-40, 60] dB.
double compute_sinr(double signal_mw, double jam_mw, double noise_mw);

/// 10 log10(signal + jam + noise) in dBm.
double compute_rssi(double signal_mw, double jam_mw, double noise_mw);

/// Gaussian tail probability Q(x).
double q_function(double x);

/// Coherent BPSK bit error probability Q(sqrt(2 sinr)).
double bpsk_ber(double sinr_linear);

/// Success probability of a packet whose first `jammed_bits` see `jammed_sinr`
/// and the remaining bits see `clean_sinr` (both linear).
double packet_success_probability(double clean_sinr, int bits, double jammed_sinr = 0.0, int jammed_bits = 0);

bool packet_delivered(double mean_sinr_linear, int bits, std::mt19937_64& rng);
bool packet_delivered(double clean_sinr, int bits, double jammed_sinr, int jammed_bits, std::mt19937_64& rng);

/// delivered / total; throws std::invalid_argument on an empty window.
double compute_pdr(std::span<const bool> window);

/// Trailing delivery window holding the most recent `capacity` outcomes.
class PdrWindow {
public:
    explicit PdrWindow(int capacity);
    void push(bool delivered);
    double ratio() const;
    std::size_t size() const { return outcomes_.size(); }

private:
    std::size_t capacity_;
    std::deque<bool> outcomes_;
};

/// Received powers at the receiver for one observation tick (mW). `jam_mw` is
/// the packet-averaged jamming or interference power.
struct ChannelState {
    double signal_mw = 0.0;
    double jam_mw = 0.0;
    double noise_mw = 0.0;
};

/// Joins the metrics of tick t into a record. An absent jammer signal maps the
/// relative speed to the receiver's own speed (a static or missing emitter).
ObservationRecord assemble_observation(double t, const ChannelState& state,
                                       const std::optional<estimator::SpeedEstimate>& speed,
                                       double pdr, double own_speed, ScenarioKind label);

}  // namespace vrsjam::features
