#include "vrsjam/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vrsjam::features {

double compute_sinr(double signal_mw, double jam_mw, double noise_mw) {
    if (!(noise_mw > 0.0)) throw std::invalid_argument("compute_sinr: noise power must be positive");
    if (signal_mw < 0.0 || jam_mw < 0.0) throw std::invalid_argument("compute_sinr: negative power");
    if (signal_mw == 0.0) return kSinrFloorDb;
    const double db = 10.0 * std::log10(signal_mw / (jam_mw + noise_mw));
    return std::clamp(db, kSinrFloorDb, kSinrCapDb);
}

double compute_rssi(double signal_mw, double jam_mw, double noise_mw) {
    const double total = signal_mw + jam_mw + noise_mw;
    if (!(total > 0.0)) throw std::invalid_argument("compute_rssi: total power must be positive");
    return 10.0 * std::log10(total);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double bpsk_ber(double sinr_linear) { return q_function(std::sqrt(2.0 * std::max(sinr_linear, 0.0))); }

double packet_success_probability(double clean_sinr, int bits, double jammed_sinr, int jammed_bits) {
    if (bits < 1) throw std::invalid_argument("packet must carry at least one bit");
    jammed_bits = std::clamp(jammed_bits, 0, bits);
    const int clean_bits = bits - jammed_bits;
    // log1p keeps (1 - ber)^bits accurate when ber is tiny.
    const double lp = clean_bits * std::log1p(-bpsk_ber(clean_sinr)) +
                      (jammed_bits > 0 ? jammed_bits * std::log1p(-bpsk_ber(jammed_sinr)) : 0.0);
    return std::exp(lp);
}

bool packet_delivered(double mean_sinr_linear, int bits, std::mt19937_64& rng) {
    return packet_delivered(mean_sinr_linear, bits, 0.0, 0, rng);
}

bool packet_delivered(double clean_sinr, int bits, double jammed_sinr, int jammed_bits, std::mt19937_64& rng) {
    const double p = packet_success_probability(clean_sinr, bits, jammed_sinr, jammed_bits);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < p;
}

double compute_pdr(std::span<const bool> window) {
    if (window.empty()) throw std::invalid_argument("compute_pdr: empty delivery window");
    const auto delivered = std::count(window.begin(), window.end(), true);
    return static_cast<double>(delivered) / static_cast<double>(window.size());
}

PdrWindow::PdrWindow(int capacity) : capacity_(static_cast<std::size_t>(capacity)) {
    if (capacity < 1) throw std::invalid_argument("PDR window capacity must be >= 1");
}

void PdrWindow::push(bool delivered) {
    outcomes_.push_back(delivered);
    if (outcomes_.size() > capacity_) outcomes_.pop_front();
}

double PdrWindow::ratio() const {
    if (outcomes_.empty()) throw std::invalid_argument("compute_pdr: empty delivery window");
    const auto delivered = std::count(outcomes_.begin(), outcomes_.end(), true);
    return static_cast<double>(delivered) / static_cast<double>(outcomes_.size());
}

ObservationRecord assemble_observation(double t, const ChannelState& state,
                                       const std::optional<estimator::SpeedEstimate>& speed,
                                       double pdr, double own_speed, ScenarioKind label) {
    ObservationRecord r;
    r.t = t;
    r.rssi = compute_rssi(state.signal_mw, state.jam_mw, state.noise_mw);
    r.sinr = compute_sinr(state.signal_mw, state.jam_mw, state.noise_mw);
    r.pdr = std::clamp(pdr, 0.0, 1.0);
    r.delta_u = speed ? speed->delta_u_hat : own_speed;
    r.own_speed = own_speed;
    r.class_label = label;
    return r;
}

}  // namespace vrsjam::features
